//! Built-in problems with analytic exact solutions, and the mask-driven
//! Fisher-KPP demo.
//!
//! Neumann data are `A grad u . n` evaluated at a boundary point with its
//! outward normal. The assembly carries them into the interface band along
//! normals (see [`crate::assembly::NeumannData`]), so the diffuse problem
//! differs from the sharp one at `O(eps^2)`.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use crate::assembly::{ExactSolution, ProblemSpec};
use crate::error::Result;
use crate::geometry::{read_pgm, DistanceField, Point};
use crate::grid::BoxDomain;

/// Box used by every analytic example.
pub const CENTERED_BOX: BoxDomain = BoxDomain::new(-0.5, 0.5, -0.5, 0.5);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainShape {
    /// Disk of radius 1/4 at the origin.
    Circle,
    /// `r(theta) = 0.18 - 0.03 sin(4 theta)`.
    Flower,
}

impl DomainShape {
    pub fn distance(self) -> Result<DistanceField> {
        match self {
            Self::Circle => DistanceField::circle(Point::default(), 0.25),
            Self::Flower => DistanceField::flower(Point::default(), 0.18, 0.03, 4),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Circle => "circle",
            Self::Flower => "flower",
        }
    }
}

/// A problem bundled with its domain and default discretization.
#[derive(Clone)]
pub struct NamedProblem {
    pub name: String,
    pub spec: ProblemSpec,
    pub domain: DistanceField,
    pub domain_box: BoxDomain,
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub eps: Vec<f64>,
}

const PAPER_EPS: [f64; 4] = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];

/// `u_t = 3 Lap u + f(t, x, y, u)` with
/// `u = exp(-pi^2 t) (5/2 x^2 - 5x)(5/2 y^2 - 5y)`, `T = 0.5`.
pub fn example1(shape: DomainShape) -> Result<NamedProblem> {
    let p = |s: f64| 2.5 * s * s - 5.0 * s;
    let dp = |s: f64| 5.0 * s - 5.0;
    let decay = |t: f64| (-PI * PI * t).exp();

    let value = move |t: f64, x: Point| decay(t) * p(x.x) * p(x.y);
    let grad = move |t: f64, x: Point| {
        let e = decay(t);
        Point::new(e * dp(x.x) * p(x.y), e * p(x.x) * dp(x.y))
    };
    let spec = ProblemSpec {
        diffusion: Arc::new(|_| 3.0),
        kappa: 1.0 / 3.0,
        reaction: Arc::new(move |t, x, u| {
            let (px, py) = (p(x.x), p(x.y));
            u - decay(t) * ((PI * PI + 1.0) * px * py + 15.0 * px + 15.0 * py)
        }),
        reaction_derivative: None,
        neumann: Arc::new(move |t, x, n| 3.0 * grad(t, x).dot(n)),
        initial: Arc::new(move |x| value(0.0, x)),
        exact: Some(ExactSolution { value: Arc::new(value), gradient: Some(Arc::new(grad)) }),
        final_time: 0.5,
        blowup_limit: None,
    };
    Ok(NamedProblem {
        name: format!("example1-{}", shape.name()),
        spec,
        domain: shape.distance()?,
        domain_box: CENTERED_BOX,
        nx: 512,
        ny: 512,
        nt: 512,
        eps: PAPER_EPS.to_vec(),
    })
}

/// `u_t = div((x^2 + y^2 + 4) grad u) + f(t, x, y)` with
/// `u = exp(-pi^2 t)(2x^2 - 4x)(2y^2 - 4y)`, `T = 0.5`.
///
/// The initial datum is the exact solution at `t = 0`.
pub fn example2(shape: DomainShape) -> Result<NamedProblem> {
    let p = |s: f64| 2.0 * s * s - 4.0 * s;
    let dp = |s: f64| 4.0 * s - 4.0;
    let a = |x: Point| x.x * x.x + x.y * x.y + 4.0;
    let decay = |t: f64| (-PI * PI * t).exp();

    let value = move |t: f64, x: Point| decay(t) * p(x.x) * p(x.y);
    let grad = move |t: f64, x: Point| {
        let e = decay(t);
        Point::new(e * dp(x.x) * p(x.y), e * p(x.x) * dp(x.y))
    };
    let spec = ProblemSpec {
        diffusion: Arc::new(a),
        kappa: 0.2,
        reaction: Arc::new(move |t, x, _u| {
            let (px, py) = (p(x.x), p(x.y));
            let av = a(x);
            -decay(t)
                * (PI * PI * px * py
                    + (4.0 * av + 2.0 * x.x * (4.0 * x.x - 4.0)) * py
                    + (4.0 * av + 2.0 * x.y * (4.0 * x.y - 4.0)) * px)
        }),
        reaction_derivative: None,
        neumann: Arc::new(move |t, x, n| a(x) * grad(t, x).dot(n)),
        initial: Arc::new(move |x| value(0.0, x)),
        exact: Some(ExactSolution { value: Arc::new(value), gradient: Some(Arc::new(grad)) }),
        final_time: 0.5,
        blowup_limit: None,
    };
    Ok(NamedProblem {
        name: format!("example2-{}", shape.name()),
        spec,
        domain: shape.distance()?,
        domain_box: CENTERED_BOX,
        nx: 512,
        ny: 512,
        nt: 512,
        eps: PAPER_EPS.to_vec(),
    })
}

/// Allen-Cahn interface width of the traveling-wave example.
pub const ALLEN_CAHN_WIDTH: f64 = 0.01;
/// Default final time of the traveling-wave example.
pub const ALLEN_CAHN_FINAL_TIME: f64 = 0.185;

/// `u_t = Lap u - (u^3 - u) / w^2` on the flower, with the traveling wave
/// `u = (1 - tanh((x - s t) / (2 sqrt(2) w))) / 2`, `s = 3 / (sqrt(2) w)`.
pub fn example3() -> Result<NamedProblem> {
    let w = ALLEN_CAHN_WIDTH;
    let speed = 3.0 / (2.0_f64.sqrt() * w);
    let scale = 2.0 * 2.0_f64.sqrt() * w;

    let value = move |t: f64, x: Point| 0.5 * (1.0 - ((x.x - speed * t) / scale).tanh());
    let grad = move |t: f64, x: Point| {
        let th = ((x.x - speed * t) / scale).tanh();
        Point::new(-0.5 * (1.0 - th * th) / scale, 0.0)
    };
    let spec = ProblemSpec {
        diffusion: Arc::new(|_| 1.0),
        kappa: 1.0,
        reaction: Arc::new(move |_, _, u| -(u * u * u - u) / (w * w)),
        reaction_derivative: Some(Arc::new(move |_, _, u| -(3.0 * u * u - 1.0) / (w * w))),
        neumann: Arc::new(move |t, x, n| grad(t, x).dot(n)),
        initial: Arc::new(move |x| value(0.0, x)),
        exact: Some(ExactSolution { value: Arc::new(value), gradient: Some(Arc::new(grad)) }),
        final_time: ALLEN_CAHN_FINAL_TIME,
        blowup_limit: Some(10.0),
    };
    Ok(NamedProblem {
        name: "example3-flower".into(),
        spec,
        domain: DomainShape::Flower.distance()?,
        domain_box: CENTERED_BOX,
        nx: 256,
        ny: 64,
        nt: 1024,
        eps: vec![1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0],
    })
}

/// Parameters of the Fisher-KPP demo.
#[derive(Clone, Debug, PartialEq)]
pub struct FisherKppParams {
    pub rho: f64,
    pub diffusion: f64,
    pub seed_center: Point,
    pub seed_width: f64,
    pub seed_amplitude: f64,
    pub final_time: f64,
}

impl Default for FisherKppParams {
    fn default() -> Self {
        Self {
            rho: 1.0,
            diffusion: 1e-3,
            seed_center: Point::default(),
            seed_width: 0.05,
            seed_amplitude: 1.0,
            final_time: 1.0,
        }
    }
}

/// `u_t = div(A grad u) + rho u (1 - u)` with zero flux, on a given domain.
pub fn fisher_kpp_on(domain: DistanceField, domain_box: BoxDomain, params: &FisherKppParams) -> NamedProblem {
    let FisherKppParams { rho, diffusion, seed_center, seed_width, seed_amplitude, final_time } = params.clone();
    let spec = ProblemSpec {
        diffusion: Arc::new(move |_| diffusion),
        kappa: diffusion.min(1.0 / diffusion),
        reaction: Arc::new(move |_, _, u| rho * u * (1.0 - u)),
        reaction_derivative: Some(Arc::new(move |_, _, u| rho * (1.0 - 2.0 * u))),
        neumann: Arc::new(|_, _, _| 0.0),
        initial: Arc::new(move |x| {
            let r2 = (x - seed_center).dot(x - seed_center);
            seed_amplitude * (-r2 / (2.0 * seed_width * seed_width)).exp()
        }),
        exact: None,
        final_time,
        blowup_limit: None,
    };
    NamedProblem {
        name: "fisher_kpp".into(),
        spec,
        domain,
        domain_box,
        nx: 128,
        ny: 128,
        nt: 200,
        eps: vec![],
    }
}

/// Fisher-KPP on the domain given by a PGM mask with square pixels of size
/// `cell`, placed with its lower-left corner at `origin`. The covering box is
/// the raster extent.
pub fn fisher_kpp(mask_path: &Path, cell: f64, origin: Point, params: &FisherKppParams) -> Result<NamedProblem> {
    let mask = read_pgm(mask_path)?;
    let domain = DistanceField::raster(&mask, cell, origin)?;
    let DistanceField::Raster(r) = &domain else { unreachable!() };
    let top = r.extent();
    let domain_box = BoxDomain::new(origin.x, top.x, origin.y, top.y);
    Ok(fisher_kpp_on(domain, domain_box, params))
}

/// `u_t - div(A grad u) - f(t, x, u)` of the exact solution by central
/// differences with steps `ht` in time and `h` in space.
///
/// # Panics
/// If the problem has no exact solution.
pub fn pde_residual(spec: &ProblemSpec, t: f64, x: Point, ht: f64, h: f64) -> f64 {
    let u = |t: f64, x: Point| (spec.exact.as_ref().expect("problem has an exact solution").value)(t, x);
    let a = &spec.diffusion;
    let ut = (u(t + ht, x) - u(t - ht, x)) / (2.0 * ht);
    let flux = |dir: Point| {
        // A at the half point times the one-sided difference
        let fwd = a(x + dir.scale(0.5 * h)) * (u(t, x + dir.scale(h)) - u(t, x)) / h;
        let bwd = a(x - dir.scale(0.5 * h)) * (u(t, x) - u(t, x - dir.scale(h))) / h;
        (fwd - bwd) / h
    };
    let div = flux(Point::new(1.0, 0.0)) + flux(Point::new(0.0, 1.0));
    ut - div - (spec.reaction)(t, x, u(t, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn samples(seed: u64, t_max: f64) -> Vec<(f64, Point)> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..100)
            .map(|_| (rng.gen_range(0.01..t_max), Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))))
            .collect()
    }

    #[test]
    fn example1_values_and_residual() {
        let p = example1(DomainShape::Circle).unwrap();
        let exact = p.spec.exact.as_ref().unwrap();
        assert!(((exact.value)(0.0, Point::new(0.1, 0.1)) - 0.225625).abs() < 1e-15);
        assert_eq!((p.spec.initial)(Point::default()), 0.0);
        for (t, x) in samples(1, 0.5) {
            assert!(pde_residual(&p.spec, t, x, 1e-5, 1e-3).abs() < 1e-6);
        }
    }

    #[test]
    fn example2_values_and_residual() {
        let p = example2(DomainShape::Flower).unwrap();
        assert_eq!((p.spec.diffusion)(Point::default()), 4.0);
        for (t, x) in samples(2, 0.5) {
            let a = (p.spec.diffusion)(x);
            assert!(a >= p.spec.kappa && a <= 1.0 / p.spec.kappa);
            let r = pde_residual(&p.spec, t, x, 1e-5, 1e-4);
            assert!(r.abs() < 1e-6, "{r}");
        }
    }

    #[test]
    fn example3_traveling_wave() {
        let p = example3().unwrap();
        let exact = p.spec.exact.as_ref().unwrap();
        let s = 3.0 / (2.0_f64.sqrt() * ALLEN_CAHN_WIDTH);
        assert!(((exact.value)(0.001, Point::new(s * 0.001, 0.2)) - 0.5).abs() < 1e-15);
        let tol = 1e-4 / (ALLEN_CAHN_WIDTH * ALLEN_CAHN_WIDTH);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let t = rng.gen_range(0.0..0.002);
            // sample around the front so the residual is not trivially zero
            let x = Point::new(s * t + rng.gen_range(-0.05..0.05), rng.gen_range(-0.5..0.5));
            let u = (exact.value)(t, x);
            assert!(u > 0.0 && u < 1.0);
            assert!(pde_residual(&p.spec, t, x, 1e-6, 1e-4).abs() < tol);
        }
    }

    #[test]
    fn neumann_data_match_normal_flux() {
        for p in [example1(DomainShape::Circle).unwrap(), example2(DomainShape::Circle).unwrap()] {
            let exact = p.spec.exact.as_ref().unwrap();
            let h = 1e-5;
            for k in 0..32 {
                let theta = k as f64 * 0.2;
                for r in [0.2, 0.25, 0.3] {
                    let x = Point::new(r * theta.cos(), r * theta.sin());
                    let (_, n) = p.domain.eval_with_gradient(x);
                    let t = 0.1;
                    let u = |y: Point| (exact.value)(t, y);
                    let fd = Point::new(
                        (u(x + Point::new(h, 0.0)) - u(x - Point::new(h, 0.0))) / (2.0 * h),
                        (u(x + Point::new(0.0, h)) - u(x - Point::new(0.0, h))) / (2.0 * h),
                    );
                    let expect = (p.spec.diffusion)(x) * fd.dot(n);
                    assert!(((p.spec.neumann)(t, x, n) - expect).abs() < 1e-8);
                }
            }
        }
        // at (0.25, 0) the outward normal is +x
        let p = example1(DomainShape::Circle).unwrap();
        let x = Point::new(0.25, 0.0);
        let g = (p.spec.neumann)(0.2, x, Point::new(1.0, 0.0));
        let e = (-PI * PI * 0.2).exp();
        assert!((g - 3.0 * e * (5.0 * 0.25 - 5.0) * 0.0).abs() < 1e-15);
    }
}
