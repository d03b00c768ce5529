use std::sync::Arc;

use ddm_core::analysis::{halving_rate, weighted_l2_error};
use ddm_core::assembly::ProblemSpec;
use ddm_core::geometry::{PhaseField, Point};
use ddm_core::grid::Grid;
use ddm_core::linalg::{cg_solve_monitored, dot, spmv, CgOptions};
use ddm_core::problems::{self, fisher_kpp_on, DomainShape, FisherKppParams, CENTERED_BOX};
use ddm_core::timestepper::{run, run_system, DdmSystem, RunOptions, SemiDiscreteSystem};

fn weight(shape: DomainShape, eps: f64) -> PhaseField {
    PhaseField::new(shape.distance().unwrap(), eps).unwrap()
}

fn grid(cells: usize) -> Grid {
    Grid::new(CENTERED_BOX, cells, cells).unwrap()
}

/// `sqrt(e^T M e)`.
fn mass_norm(sys: &DdmSystem, a: &[f64], b: &[f64]) -> f64 {
    let e: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    dot(&e, &spmv(sys.mass(), &e).unwrap()).sqrt()
}

#[test]
fn temporal_order_is_two() {
    let p = problems::example1(DomainShape::Circle).unwrap();
    let sys = DdmSystem::new(p.spec, grid(64), &weight(DomainShape::Circle, 1.0 / 8.0), 4).unwrap();
    let solve = |nt| run_system(&sys, nt, RunOptions::default(), |_| {}).unwrap().0.u_curr;
    let reference = solve(2048);
    let errors: Vec<f64> = [32, 64, 128].iter().map(|&nt| mass_norm(&sys, &solve(nt), &reference)).collect();
    for w in errors.windows(2) {
        let order = halving_rate(w[0], w[1]);
        assert!((1.7..=2.3).contains(&order), "order {order}, errors {errors:?}");
    }
}

#[test]
fn diffusion_energy_never_grows() {
    let spec = ProblemSpec::heat(1.0, Arc::new(|p: Point| (7.0 * p.x).sin() * (5.0 * p.y).cos() + p.x * p.y * 10.0), 0.05);
    let sys = DdmSystem::new(spec, grid(32), &weight(DomainShape::Flower, 1.0 / 8.0), 4).unwrap();
    let energy = |u: &[f64]| dot(u, &spmv(sys.stiffness(), u).unwrap());
    let mut history = Vec::new();
    run_system(&sys, 50, RunOptions::default(), |s| history.push(energy(&s.u_curr))).unwrap();
    assert_eq!(history.len(), 51);
    for (k, w) in history.windows(2).enumerate() {
        assert!(w[1] <= w[0] * (1.0 + 1e-10), "step {k}: {} -> {}", w[0], w[1]);
    }
    assert!(history[50] < 0.5 * history[0]);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let p = problems::example2(DomainShape::Flower).unwrap();
    let w = weight(DomainShape::Flower, 1.0 / 8.0);
    let a = run(&p.spec, &grid(32), &w, 16, RunOptions::default(), |_| {}).unwrap();
    let b = run(&p.spec, &grid(32), &w, 16, RunOptions::default(), |_| {}).unwrap();
    let bits = |u: &[f64]| u.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.state.u_curr), bits(&b.state.u_curr));
    assert_eq!(a.stats, b.stats);
}

#[test]
fn constants_are_preserved_without_forcing() {
    let spec = ProblemSpec::heat(2.0, Arc::new(|_| 0.75), 1.0);
    let out = run(&spec, &grid(32), &weight(DomainShape::Circle, 1.0 / 8.0), 20, RunOptions::default(), |_| {}).unwrap();
    for &v in &out.state.u_curr {
        assert!((v - 0.75).abs() < 1e-8, "{v}");
    }
}

#[test]
fn zero_data_keep_zero() {
    let spec = ProblemSpec::heat(1.0, Arc::new(|_| 0.0), 1.0);
    let out = run(&spec, &grid(16), &weight(DomainShape::Flower, 1.0 / 4.0), 10, RunOptions::default(), |_| {}).unwrap();
    assert!(out.state.u_curr.iter().all(|&v| v == 0.0));
    assert_eq!(out.stats.cg_iterations, 0);
}

fn fisher(rho: f64) -> ddm_core::problems::NamedProblem {
    let params = FisherKppParams { rho, diffusion: 1e-2, seed_width: 0.08, final_time: 0.5, ..FisherKppParams::default() };
    fisher_kpp_on(DomainShape::Flower.distance().unwrap(), CENTERED_BOX, &params)
}

#[test]
fn fisher_kpp_without_growth_conserves_mass() {
    let p = fisher(0.0);
    let sys = DdmSystem::new(p.spec, grid(64), &weight(DomainShape::Flower, 1.0 / 16.0), 4).unwrap();
    let lumped = sys.mass().row_sums();
    let mass = |u: &[f64]| dot(&lumped, u);
    let mut masses = Vec::new();
    run_system(&sys, 40, RunOptions::default(), |s| masses.push(mass(&s.u_curr))).unwrap();
    let m0 = masses[0];
    assert!(m0 > 0.0);
    for m in &masses {
        assert!((m - m0).abs() <= 1e-6 * m0, "{m} vs {m0}");
    }
}

#[test]
fn fisher_kpp_fixed_points() {
    for level in [0.0, 1.0] {
        let mut p = fisher(1.0);
        p.spec.initial = Arc::new(move |_| level);
        let out = run(&p.spec, &grid(32), &weight(DomainShape::Flower, 1.0 / 8.0), 20, RunOptions::default(), |_| {}).unwrap();
        for &v in &out.state.u_curr {
            assert!((v - level).abs() < 1e-8, "level {level}: {v}");
        }
    }
}

#[test]
fn fisher_kpp_front_grows_and_stays_bounded() {
    let p = fisher(5.0);
    let sys = DdmSystem::new(p.spec, grid(32), &weight(DomainShape::Flower, 1.0 / 8.0), 4).unwrap();
    let lumped = sys.mass().row_sums();
    let mut masses = Vec::new();
    let (state, _) = run_system(&sys, 40, RunOptions::default(), |s| masses.push(dot(&lumped, &s.u_curr))).unwrap();
    assert!(masses.windows(2).all(|w| w[1] > w[0]));
    assert!(state.u_curr.iter().all(|&v| v > -1e-3 && v < 1.0 + 1e-3));
}

fn step_matrix(shape: DomainShape, eps: f64, cells: usize) -> (ddm_core::linalg::CsrMatrix, Vec<f64>) {
    let p = problems::example2(shape).unwrap();
    let sys = DdmSystem::new(p.spec, grid(cells), &weight(shape, eps), 4).unwrap();
    let dt = 0.5 / cells as f64;
    let mut a = sys.mass().linear_combination(1.5, sys.stiffness(), dt).unwrap();
    a.add_diagonal(&vec![sys.regularization(); a.n]).unwrap();
    let rhs: Vec<f64> = (0..a.n).map(|k| ((k * 37 % 101) as f64 / 50.0 - 1.0) * 1e-3).collect();
    (a, rhs)
}

#[test]
fn cg_error_energy_is_monotone_on_step_matrices() {
    // CG minimizes ||x - x*||_A = ||r||_{A^-1} over growing Krylov spaces
    for (shape, eps, cells) in [(DomainShape::Circle, 1.0 / 8.0, 32), (DomainShape::Flower, 1.0 / 16.0, 32)] {
        let (a, rhs) = step_matrix(shape, eps, cells);
        let zero = vec![0.0; a.n];
        let (exact, report) = cg_solve_monitored(&a, &rhs, &zero, CgOptions { tol: 1e-14, max_iter: 10_000 }, |_, _| {}).unwrap();
        assert!(report.relative_residual < 1e-12);
        let mut iterations = 0;
        cg_solve_monitored(&a, &rhs, &zero, CgOptions::for_size(1e-10, a.n), |k, _| iterations = k).unwrap();
        let energy: Vec<f64> = (1..=iterations)
            .map(|k| {
                let (x, _) = cg_solve_monitored(&a, &rhs, &zero, CgOptions { tol: 1e-10, max_iter: k }, |_, _| {}).unwrap();
                let e: Vec<f64> = x.iter().zip(&exact).map(|(u, v)| u - v).collect();
                dot(&e, &spmv(&a, &e).unwrap())
            })
            .collect();
        let e0 = dot(&exact, &spmv(&a, &exact).unwrap());
        assert!(energy[0] <= e0);
        for (k, w) in energy.windows(2).enumerate() {
            assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12 * e0, "iteration {}: {} -> {}", k + 1, w[0], w[1]);
        }
    }
}

#[test]
fn example1_coarse_error_matches_published_value() {
    // h = 1/128, nt = 128, eps = 1/8; published 1.03e-2 on the 512 grid
    let p = problems::example1(DomainShape::Circle).unwrap();
    let out = run(&p.spec, &grid(128), &weight(DomainShape::Circle, 1.0 / 8.0), 128, RunOptions::default(), |_| {}).unwrap();
    let e = weighted_l2_error(&out.system.disc, &out.state.u_curr, p.spec.exact.as_ref(), out.state.t).unwrap();
    assert!((e - 1.03e-2).abs() <= 0.25 * 1.03e-2, "{e}");
}
