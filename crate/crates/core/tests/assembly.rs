use std::f64::consts::PI;

use ddm_core::analysis::{diffuse_surface_integral, diffuse_volume_integral, halving_rate, WeightedMoments};
use ddm_core::assembly::{assemble_boundary_load, assemble_weighted_mass, assemble_weighted_stiffness, Discretization};
use ddm_core::geometry::{PhaseField, Point};
use ddm_core::grid::Grid;
use ddm_core::linalg::{dot, spmv};
use ddm_core::problems::{DomainShape, CENTERED_BOX};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: [f64; 4] = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];

fn disc(shape: DomainShape, cells: usize, eps: f64, order: usize) -> Discretization {
    let grid = Grid::new(CENTERED_BOX, cells, cells).unwrap();
    let pf = PhaseField::new(shape.distance().unwrap(), eps).unwrap();
    Discretization::new(grid, &pf, order).unwrap()
}

/// `int_D h` over the disk of radius 1/4 by a tensor Gauss rule in polar
/// coordinates.
fn polar_disk_integral(h: impl Fn(Point) -> f64) -> f64 {
    let rule = ddm_core::grid::gauss_rule(5).unwrap();
    let (nr, nt) = (32, 128);
    let mut acc = 0.0;
    for i in 0..nr {
        for j in 0..nt {
            for &(xi, eta, w) in &rule.points {
                let r = 0.25 * (i as f64 + 0.5 * (xi + 1.0)) / nr as f64;
                let th = 2.0 * PI * (j as f64 + 0.5 * (eta + 1.0)) / nt as f64;
                let jac = 0.25 / nr as f64 * 0.5 * 2.0 * PI / nt as f64 * 0.5;
                acc += w * jac * r * h(Point::new(r * th.cos(), r * th.sin()));
            }
        }
    }
    acc
}

#[test]
fn polar_oracle_reproduces_closed_forms() {
    assert!((polar_disk_integral(|_| 1.0) - PI / 16.0).abs() < 1e-13);
    assert!((polar_disk_integral(|p| p.x * p.x) - PI / 1024.0).abs() < 1e-14);
}

#[test]
fn operators_are_symmetric_and_positive_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for shape in [DomainShape::Circle, DomainShape::Flower] {
        let d = disc(shape, 32, 1.0 / 8.0, 4);
        let m = assemble_weighted_mass(&d);
        let k = assemble_weighted_stiffness(&d, &|p| p.x * p.x + p.y * p.y + 4.0).unwrap();
        for mat in [&m, &k] {
            assert!(mat.asymmetry() <= 1e-14 * mat.max_abs(), "asymmetry {}", mat.asymmetry());
            for _ in 0..20 {
                let v: Vec<f64> = (0..mat.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let q = dot(&v, &spmv(mat, &v).unwrap());
                assert!(q >= -1e-10 * dot(&v, &v), "Rayleigh quotient {q}");
            }
        }
    }
}

#[test]
fn quadrature_order_four_resolves_the_weight() {
    // integral of omega changes by < 1e-8 relative from n = 4 to n = 5 once
    // the profile spans a few cells; the circle keeps d smooth everywhere
    for cells in [64, 128] {
        let h = 1.0 / cells as f64;
        for eps in [4.0 * h, 8.0 * h] {
            let a = diffuse_volume_integral(&disc(DomainShape::Circle, cells, eps, 4), &|_| 1.0);
            let b = diffuse_volume_integral(&disc(DomainShape::Circle, cells, eps, 5), &|_| 1.0);
            assert!((a - b).abs() < 1e-8 * b, "eps {eps}: {a} vs {b}");
        }
    }
}

#[test]
fn diffuse_volume_integrals_converge_faster_than_eps() {
    let cases: [(fn(Point) -> f64, fn(Point) -> f64); 2] = [(|_| 1.0, |_| 1.0), (|p| p.x * p.x, |p| p.x * p.x)];
    for (h, h_oracle) in cases {
        let exact = polar_disk_integral(h_oracle);
        let errors: Vec<f64> = EPS
            .iter()
            .map(|&e| (diffuse_volume_integral(&disc(DomainShape::Circle, 256, e, 4), &h) - exact).abs())
            .collect();
        for w in errors.windows(2) {
            let order = halving_rate(w[0], w[1]);
            assert!(order >= 1.4, "order {order}, errors {errors:?}");
        }
    }
}

#[test]
fn diffuse_perimeter_of_the_circle() {
    let d = disc(DomainShape::Circle, 256, 1.0 / 32.0, 4);
    let total: f64 = assemble_boundary_load(&d, &|_, _, _| 1.0, 0.0).unwrap().iter().sum();
    let exact = 2.0 * PI * 0.25;
    assert!((total - exact).abs() <= 0.02 * exact, "{total}");
    assert!((diffuse_surface_integral(&d, &|_| 1.0) - total).abs() < 1e-12);
}

fn bounded_family(family: &[(fn(Point) -> f64, fn(Point) -> Point)], ratio: fn(&WeightedMoments) -> f64) {
    let discs: Vec<Discretization> = EPS.iter().map(|&e| disc(DomainShape::Circle, 256, e, 4)).collect();
    for (v, g) in family {
        let r: Vec<f64> = discs.iter().map(|d| ratio(&WeightedMoments::compute(d, v, g))).collect();
        let max = r.iter().cloned().fold(f64::MIN, f64::max);
        let min = r.iter().cloned().fold(f64::MAX, f64::min);
        assert!(min > 0.0 && max / min < 3.0, "ratios {r:?}");
    }
}

#[test]
fn trace_ratios_stay_bounded() {
    bounded_family(
        &[
            (|_| 1.0, |_| Point::default()),
            (|p| p.x, |_| Point::new(1.0, 0.0)),
            (|p| p.x * p.x, |p| Point::new(2.0 * p.x, 0.0)),
            (|p| (PI * p.x).sin() * (PI * p.y).cos(), |p| {
                Point::new(PI * (PI * p.x).cos() * (PI * p.y).cos(), -PI * (PI * p.x).sin() * (PI * p.y).sin())
            }),
        ],
        WeightedMoments::trace_ratio,
    );
}

#[test]
fn poincare_ratios_stay_bounded() {
    bounded_family(
        &[
            (|p| p.x, |_| Point::new(1.0, 0.0)),
            (|p| p.y, |_| Point::new(0.0, 1.0)),
            (|p| p.x * p.x - p.y * p.y, |p| Point::new(2.0 * p.x, -2.0 * p.y)),
            (|p| (PI * p.x).sin(), |p| Point::new(PI * (PI * p.x).cos(), 0.0)),
        ],
        WeightedMoments::poincare_ratio,
    );
}
