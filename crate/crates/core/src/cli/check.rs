//! Numerical probes behind `ddm check`.
//!
//! Each probe compares a diffuse quantity with a sharp-interface oracle or
//! checks that a family of ratios stays bounded as the interface thins.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{diffuse_volume_integral, format_epsilon, halving_rate, WeightedMoments};
use crate::assembly::{assemble_boundary_load, Discretization};
use crate::error::Result;
use crate::geometry::{DistanceField, PhaseField, Point, Weight};
use crate::grid::Grid;
use crate::problems::{self, pde_residual, DomainShape, CENTERED_BOX};

/// Interface thicknesses of the ratio and order probes.
pub const PROBE_EPS: [f64; 4] = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
/// Cells per side of the probe grid.
pub const PROBE_CELLS: usize = 256;
/// Largest allowed max/min spread of a bounded-ratio family.
pub const RATIO_SPREAD: f64 = 3.0;
/// Smallest accepted observed order of the volume-integral error.
pub const VOLUME_ORDER: f64 = 1.4;
/// Relative tolerance of the diffuse perimeter.
pub const PERIMETER_TOL: f64 = 0.02;

const CIRCLE_RADIUS: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl ProbeResult {
    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

type TestFunction = (&'static str, fn(Point) -> f64, fn(Point) -> Point);

fn trace_family() -> [TestFunction; 4] {
    [
        ("1", |_| 1.0, |_| Point::default()),
        ("x", |p| p.x, |_| Point::new(1.0, 0.0)),
        ("x^2", |p| p.x * p.x, |p| Point::new(2.0 * p.x, 0.0)),
        ("sin(pi x)cos(pi y)", |p| (PI * p.x).sin() * (PI * p.y).cos(), |p| {
            Point::new(PI * (PI * p.x).cos() * (PI * p.y).cos(), -PI * (PI * p.x).sin() * (PI * p.y).sin())
        }),
    ]
}

fn poincare_family() -> [TestFunction; 4] {
    [
        ("x", |p| p.x, |_| Point::new(1.0, 0.0)),
        ("y", |p| p.y, |_| Point::new(0.0, 1.0)),
        ("x^2-y^2", |p| p.x * p.x - p.y * p.y, |p| Point::new(2.0 * p.x, -2.0 * p.y)),
        ("sin(pi x)", |p| (PI * p.x).sin(), |p| Point::new(PI * (PI * p.x).cos(), 0.0)),
    ]
}

/// Discretizations of the circle on the probe grid, one per thickness.
pub fn circle_discretizations(eps: &[f64], cells: usize) -> Result<Vec<(f64, Discretization)>> {
    let grid = Grid::new(CENTERED_BOX, cells, cells)?;
    eps.iter()
        .map(|&e| {
            let pf = PhaseField::new(DomainShape::Circle.distance()?, e)?;
            Ok((e, Discretization::new(grid.clone(), &pf, 4)?))
        })
        .collect()
}

/// `max / min` of positive values.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

fn ratio_probes(
    kind: &str,
    discs: &[(f64, Discretization)],
    family: &[TestFunction],
    ratio: fn(&WeightedMoments) -> f64,
) -> Vec<ProbeResult> {
    family
        .iter()
        .map(|(name, v, grad)| {
            let ratios: Vec<f64> = discs.iter().map(|(_, d)| ratio(&WeightedMoments::compute(d, v, grad))).collect();
            let s = spread(&ratios);
            let listed: Vec<String> = ratios.iter().map(|r| format!("{r:.4e}")).collect();
            ProbeResult {
                name: format!("{kind} ratio, v = {name}"),
                passed: s.is_finite() && s < RATIO_SPREAD,
                detail: format!("ratios [{}], max/min = {s:.3}", listed.join(", ")),
            }
        })
        .collect()
}

/// Diffuse volume integrals of `1` and `x^2` against the disk values
/// `pi r^2` and `pi r^4 / 4`.
pub fn volume_order_probes(discs: &[(f64, Discretization)]) -> Vec<ProbeResult> {
    let r = CIRCLE_RADIUS;
    let cases: [(&str, fn(Point) -> f64, f64); 2] =
        [("1", |_| 1.0, PI * r * r), ("x^2", |p| p.x * p.x, PI * r.powi(4) / 4.0)];
    cases
        .iter()
        .map(|(name, h, exact)| {
            let errors: Vec<f64> = discs.iter().map(|(_, d)| (diffuse_volume_integral(d, h) - exact).abs()).collect();
            let orders: Vec<f64> = errors.windows(2).map(|w| halving_rate(w[0], w[1])).collect();
            let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
            let fmt = |v: &[f64], p: usize| v.iter().map(|e| format!("{e:.prec$e}", prec = p)).collect::<Vec<_>>().join(", ");
            ProbeResult {
                name: format!("volume integral order, h = {name}"),
                passed: min_order >= VOLUME_ORDER,
                detail: format!("errors [{}], orders [{}]", fmt(&errors, 3), fmt(&orders, 2)),
            }
        })
        .collect()
}

/// Sum of the boundary load with `g = 1` against the circumference.
pub fn perimeter_probe(disc: &Discretization) -> Result<ProbeResult> {
    let load = assemble_boundary_load(disc, &|_, _, _| 1.0, 0.0)?;
    let total: f64 = load.iter().sum();
    let exact = 2.0 * PI * CIRCLE_RADIUS;
    let rel = (total - exact).abs() / exact;
    Ok(ProbeResult {
        name: "diffuse perimeter".into(),
        passed: rel <= PERIMETER_TOL,
        detail: format!("sum = {total:.6}, 2 pi r = {exact:.6}, relative error {rel:.2e}"),
    })
}

/// `|grad omega|` against a central difference of `omega` at random points
/// of the interface band.
pub fn gradient_probe(seed: u64) -> Result<ProbeResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = 1.0 / 16.0;
    let mut worst = 0.0_f64;
    for shape in [DomainShape::Circle, DomainShape::Flower] {
        let pf = PhaseField::new(shape.distance()?, eps)?;
        for _ in 0..100 {
            let p = band_point(&mut rng, &pf.distance, eps);
            let h = 1e-6 * eps;
            let fd = Point::new(
                (pf.omega(p + Point::new(h, 0.0)) - pf.omega(p - Point::new(h, 0.0))) / (2.0 * h),
                (pf.omega(p + Point::new(0.0, h)) - pf.omega(p - Point::new(0.0, h))) / (2.0 * h),
            );
            let g = pf.sample(p).grad_mag;
            worst = worst.max((fd.norm() - g).abs() / g);
        }
    }
    Ok(ProbeResult {
        name: "phase-field gradient".into(),
        passed: worst < 1e-5,
        detail: format!("worst relative deviation from central differences {worst:.2e}"),
    })
}

fn band_point(rng: &mut ChaCha8Rng, d: &DistanceField, eps: f64) -> Point {
    loop {
        let p = Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if d.eval(p).abs() < eps {
            return p;
        }
    }
}

/// PDE residual of each built-in exact solution at random space-time points.
pub fn residual_probe(seed: u64) -> Result<Vec<ProbeResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (name, p, tol, ht, h) in [
        ("example1", problems::example1(DomainShape::Circle)?, 1e-6, 1e-5, 1e-3),
        ("example2", problems::example2(DomainShape::Circle)?, 1e-6, 1e-5, 1e-4),
    ] {
        let worst = (0..100)
            .map(|_| {
                let t = rng.gen_range(0.01..p.spec.final_time);
                let x = Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
                pde_residual(&p.spec, t, x, ht, h).abs()
            })
            .fold(0.0, f64::max);
        out.push(ProbeResult {
            name: format!("{name} residual"),
            passed: worst < tol,
            detail: format!("max |u_t - div(A grad u) - f| = {worst:.2e} (tolerance {tol:e})"),
        });
    }
    let p = problems::example3()?;
    let width = problems::ALLEN_CAHN_WIDTH;
    let speed = 3.0 / (2.0_f64.sqrt() * width);
    let tol = 1e-4 / (width * width);
    let worst = (0..100)
        .map(|_| {
            let t = rng.gen_range(0.0..0.002);
            let x = Point::new(speed * t + rng.gen_range(-0.05..0.05), rng.gen_range(-0.5..0.5));
            pde_residual(&p.spec, t, x, 1e-6, 1e-4).abs()
        })
        .fold(0.0, f64::max);
    out.push(ProbeResult {
        name: "example3 residual".into(),
        passed: worst < tol,
        detail: format!("max residual near the front {worst:.2e} (tolerance {tol:e})"),
    });
    Ok(out)
}

/// Every probe, in a fixed order.
pub fn run_checks(seed: u64) -> Result<Vec<ProbeResult>> {
    let discs = circle_discretizations(&PROBE_EPS, PROBE_CELLS)?;
    let mut out = ratio_probes("trace", &discs, &trace_family(), WeightedMoments::trace_ratio);
    out.extend(ratio_probes("poincare", &discs, &poincare_family(), WeightedMoments::poincare_ratio));
    out.extend(volume_order_probes(&discs));
    let (_, at_32) = discs.iter().find(|(e, _)| *e == 1.0 / 32.0).expect("1/32 is a probe thickness");
    out.push(perimeter_probe(at_32)?);
    out.push(gradient_probe(seed)?);
    out.extend(residual_probe(seed)?);
    for r in &mut out {
        if r.name.contains("ratio") || r.name.contains("volume") {
            r.detail = format!("{} (eps {}..{})", r.detail, format_epsilon(PROBE_EPS[0]), format_epsilon(PROBE_EPS[3]));
        }
    }
    Ok(out)
}
