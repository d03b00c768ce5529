//! Signed distance fields and the phase-field weight built on top of them.
//!
//! Sign convention: `d < 0` inside the physical domain, `d = 0` on its
//! boundary and `d > 0` outside. The phase field is
//! `omega = (1 - tanh(3 d / eps)) / 2`, which tends to one inside the domain
//! and to zero outside across a band of width roughly `eps`.

mod flower;
mod pgm;
mod raster;

pub use flower::FlowerCurve;
pub use pgm::{read_pgm, Mask};
pub use raster::RasterDistance;

use crate::error::{DdmError, Result};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Smooth monotone transition `S(s) = tanh(3 s)`.
pub fn transition(s: f64) -> f64 {
    (3.0 * s).tanh()
}

/// Signed distance to the boundary of a planar domain.
#[derive(Clone, Debug)]
pub enum DistanceField {
    Circle { center: Point, radius: f64 },
    Flower(FlowerCurve),
    Raster(RasterDistance),
}

impl DistanceField {
    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DdmError::Geometry(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Self::Circle { center, radius })
    }

    pub fn flower(center: Point, r0: f64, r1: f64, lobes: u32) -> Result<Self> {
        Ok(Self::Flower(FlowerCurve::new(center, r0, r1, lobes)?))
    }

    pub fn raster(mask: &Mask, cell: f64, origin: Point) -> Result<Self> {
        Ok(Self::Raster(RasterDistance::from_mask(mask, cell, origin)?))
    }

    /// Signed distance at `p`.
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            Self::Circle { center, radius } => p.dist(*center) - radius,
            Self::Flower(curve) => curve.signed_distance(p),
            Self::Raster(r) => r.eval(p),
        }
    }

    /// Signed distance and its gradient at `p`.
    ///
    /// Analytic fields return a unit gradient (zero at points where the
    /// nearest boundary point is not unique and the direction is undefined,
    /// e.g. the circle center). Raster fields return the interpolated
    /// central-difference gradient, which is only approximately unit length.
    pub fn eval_with_gradient(&self, p: Point) -> (f64, Point) {
        match self {
            Self::Circle { center, radius } => {
                let v = p - *center;
                let r = v.norm();
                let grad = if r > 0.0 { v.scale(1.0 / r) } else { Point::default() };
                (r - radius, grad)
            }
            Self::Flower(curve) => curve.signed_distance_with_gradient(p),
            Self::Raster(r) => r.eval_with_gradient(p),
        }
    }
}

/// Values of a domain weight at one point.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct WeightSample {
    /// Volume weight `omega`.
    pub omega: f64,
    /// Surface weight `|grad omega|`.
    pub grad_mag: f64,
    /// Unit outward normal extended off the boundary (`grad d / |grad d|`).
    pub normal: Point,
    /// Closest boundary point `x - d n`, the foot of the normal through `x`.
    pub foot: Point,
}

/// Anything that can serve as the integration weight of the diffuse problem.
pub trait Weight: Sync {
    fn sample(&self, p: Point) -> WeightSample;
}

/// Constant unit weight with no surface part; reduces every weighted
/// integral to a plain integral over the box.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitWeight;

impl Weight for UnitWeight {
    fn sample(&self, p: Point) -> WeightSample {
        WeightSample { omega: 1.0, grad_mag: 0.0, normal: Point::default(), foot: p }
    }
}

/// Phase-field weight `omega_eps` derived from a signed distance.
#[derive(Clone, Debug)]
pub struct PhaseField {
    pub distance: DistanceField,
    pub epsilon: f64,
}

impl PhaseField {
    pub fn new(distance: DistanceField, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(DdmError::Geometry(format!("interface thickness must be positive, got {epsilon}")));
        }
        Ok(Self { distance, epsilon })
    }

    pub fn omega(&self, p: Point) -> f64 {
        omega_of_distance(self.distance.eval(p), self.epsilon)
    }

    pub fn grad_omega_mag(&self, p: Point) -> f64 {
        let (d, grad) = self.distance.eval_with_gradient(p);
        let gnorm = match self.distance {
            DistanceField::Raster(_) => grad.norm(),
            _ => 1.0,
        };
        grad_omega_of_distance(d, self.epsilon) * gnorm
    }
}

impl Weight for PhaseField {
    fn sample(&self, p: Point) -> WeightSample {
        let (d, grad) = self.distance.eval_with_gradient(p);
        let gnorm = grad.norm();
        let (scale, normal) = match self.distance {
            DistanceField::Raster(_) => {
                (gnorm, if gnorm > 0.0 { grad.scale(1.0 / gnorm) } else { Point::default() })
            }
            _ => (1.0, grad),
        };
        WeightSample {
            omega: omega_of_distance(d, self.epsilon),
            grad_mag: grad_omega_of_distance(d, self.epsilon) * scale,
            normal,
            foot: p - normal.scale(d),
        }
    }
}

/// `(1 - tanh(3 d / eps)) / 2`, written as a logistic so that the exterior
/// tail stays strictly positive instead of rounding to zero.
pub fn omega_of_distance(d: f64, epsilon: f64) -> f64 {
    1.0 / (1.0 + (6.0 * d / epsilon).exp())
}

/// `|d omega / d d| = 3/(2 eps) sech^2(3 d / eps)`.
pub fn grad_omega_of_distance(d: f64, epsilon: f64) -> f64 {
    let s = (-6.0 * (d / epsilon).abs()).exp();
    let sech2 = 4.0 * s / ((1.0 + s) * (1.0 + s));
    1.5 / epsilon * sech2
}
