use std::f64::consts::TAU;

use super::Point;
use crate::error::{DdmError, Result};

const SAMPLES: usize = 4096;
const CHUNK: usize = 64;

/// Star-shaped curve `r(theta) = r0 - r1 sin(lobes theta)` around `center`.
///
/// Distances are nearest-point distances: a dense sampling of the curve is
/// searched (with bounding-circle pruning over contiguous chunks of samples)
/// and the best parameter is polished with Newton's method on
/// `(p(theta) - x) . p'(theta) = 0`.
#[derive(Clone, Debug)]
pub struct FlowerCurve {
    pub center: Point,
    pub r0: f64,
    pub r1: f64,
    pub lobes: u32,
    samples: Vec<Point>,
    chunks: Vec<(Point, f64)>,
}

impl FlowerCurve {
    pub fn new(center: Point, r0: f64, r1: f64, lobes: u32) -> Result<Self> {
        if !(r0.is_finite() && r1.is_finite() && r1 >= 0.0 && r0 > r1) {
            return Err(DdmError::Geometry(format!(
                "flower radii must satisfy r0 > r1 >= 0, got r0 = {r0}, r1 = {r1}"
            )));
        }
        if lobes == 0 {
            return Err(DdmError::Geometry("flower needs at least one lobe".into()));
        }
        let mut curve = Self { center, r0, r1, lobes, samples: Vec::new(), chunks: Vec::new() };
        curve.samples = (0..SAMPLES).map(|k| curve.point(TAU * k as f64 / SAMPLES as f64)).collect();
        curve.chunks = curve
            .samples
            .chunks(CHUNK)
            .enumerate()
            .map(|(c, pts)| {
                // include the first sample of the next chunk so segments are covered
                let next = curve.samples[((c + 1) * CHUNK) % SAMPLES];
                let n = pts.len() as f64 + 1.0;
                let sum = pts.iter().fold(next, |acc, &p| acc + p);
                let mid = sum.scale(1.0 / n);
                let rad = pts.iter().chain(std::iter::once(&next)).map(|p| p.dist(mid)).fold(0.0, f64::max);
                (mid, rad)
            })
            .collect();
        Ok(curve)
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.r0 - self.r1 * (self.lobes as f64 * theta).sin()
    }

    /// Boundary point at parameter `theta`.
    pub fn point(&self, theta: f64) -> Point {
        let r = self.radius(theta);
        self.center + Point::new(r * theta.cos(), r * theta.sin())
    }

    fn derivatives(&self, theta: f64) -> (Point, Point, Point) {
        let k = self.lobes as f64;
        let (s, c) = theta.sin_cos();
        let r = self.radius(theta);
        let dr = -self.r1 * k * (k * theta).cos();
        let ddr = self.r1 * k * k * (k * theta).sin();
        let p = self.center + Point::new(r * c, r * s);
        let dp = Point::new(dr * c - r * s, dr * s + r * c);
        let ddp = Point::new(ddr * c - 2.0 * dr * s - r * c, ddr * s + 2.0 * dr * c - r * s);
        (p, dp, ddp)
    }

    /// Whether `p` lies strictly inside the curve.
    pub fn contains(&self, p: Point) -> bool {
        let v = p - self.center;
        v.norm() < self.radius(v.y.atan2(v.x))
    }

    /// Parameter of the nearest boundary point and the distance to it.
    pub fn nearest(&self, p: Point) -> (f64, f64) {
        let mut order: Vec<(f64, usize)> = self
            .chunks
            .iter()
            .enumerate()
            .map(|(i, (mid, rad))| ((p.dist(*mid) - rad).max(0.0), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut best = (f64::INFINITY, 0usize);
        for &(lb, c) in &order {
            if lb >= best.0 {
                break;
            }
            let start = c * CHUNK;
            for k in start..=start + CHUNK {
                let d = p.dist(self.samples[k % SAMPLES]);
                if d < best.0 {
                    best = (d, k % SAMPLES);
                }
            }
        }

        let step = TAU / SAMPLES as f64;
        let theta0 = best.1 as f64 * step;
        let mut theta = theta0;
        let mut dist = best.0;
        for _ in 0..20 {
            let (q, dq, ddq) = self.derivatives(theta);
            let diff = q - p;
            let g = diff.dot(dq);
            let h = dq.dot(dq) + diff.dot(ddq);
            if h <= 0.0 {
                break;
            }
            let delta = (g / h).clamp(-2.0 * step, 2.0 * step);
            let cand = (theta - delta).clamp(theta0 - 2.0 * step, theta0 + 2.0 * step);
            let cd = self.point(cand).dist(p);
            if cd > dist {
                break;
            }
            let moved = (cand - theta).abs();
            theta = cand;
            dist = cd;
            if moved < 1e-15 {
                break;
            }
        }
        (theta.rem_euclid(TAU), dist)
    }

    pub fn signed_distance(&self, p: Point) -> f64 {
        let (_, dist) = self.nearest(p);
        if self.contains(p) {
            -dist
        } else {
            dist
        }
    }

    /// Signed distance and its (unit) gradient.
    pub fn signed_distance_with_gradient(&self, p: Point) -> (f64, Point) {
        let (theta, dist) = self.nearest(p);
        let inside = self.contains(p);
        let grad = if dist > 1e-12 {
            let away = p - self.point(theta);
            let dir = away.scale(1.0 / away.norm());
            if inside {
                dir.scale(-1.0)
            } else {
                dir
            }
        } else {
            let (_, dp, _) = self.derivatives(theta);
            let n = Point::new(dp.y, -dp.x);
            n.scale(1.0 / n.norm())
        };
        (if inside { -dist } else { dist }, grad)
    }
}
