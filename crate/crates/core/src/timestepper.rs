//! Semi-implicit BDF2 integration of `M u' + K u = b_f(t, u) + c_g(t)`.
//!
//! Diffusion is implicit and the reaction load is extrapolated
//! (`2 b_f^n - b_f^{n-1}`), so each step is one symmetric positive definite
//! solve. The first step is a backward Euler bootstrap. When the problem
//! supplies `df/du`, the dissipative part `sigma = max(0, -df/du)` evaluated
//! at the extrapolated state is added as a lumped implicit correction
//! `sigma (u^{n+1} - u*)`; this is consistent to second order and removes
//! the step-size restriction of explicit stiff reactions such as Allen-Cahn.

use crate::assembly::{
    assemble_boundary_load, assemble_source, assemble_weighted_mass, assemble_weighted_stiffness, check_coercivity,
    Discretization, ProblemSpec,
};
use crate::error::{DdmError, Result};
use crate::geometry::{Point, Weight};
use crate::grid::Grid;
use crate::linalg::{cg_solve, CgOptions, CgReport, CsrMatrix, SymmetricStencil};

/// Relative size of the proximal term `sigma_reg h^2 (u^{n+1} - u^n)`.
pub const REGULARIZATION: f64 = 1e-10;
/// Default relative CG tolerance per step.
pub const STEP_TOLERANCE: f64 = 1e-10;
/// `omega` at distance `eps` outside the boundary, `1 / (1 + e^6)`.
pub const GUARD_WEIGHT: f64 = 2.4726231566347743e-3;

/// Spatially discrete system seen by the time stepper.
pub trait SemiDiscreteSystem {
    fn dim(&self) -> usize;
    fn mass(&self) -> &CsrMatrix;
    fn stiffness(&self) -> &CsrMatrix;
    fn source(&self, t: f64, u: &[f64]) -> Result<Vec<f64>>;
    fn boundary(&self, t: f64) -> Result<Vec<f64>>;

    /// Lumped implicit reaction weights `sigma_i m_i` at state `u`.
    fn stabilization(&self, _t: f64, _u: &[f64]) -> Result<Option<Vec<f64>>> {
        Ok(None)
    }

    /// Coefficient of the proximal identity term added to every step matrix.
    fn regularization(&self) -> f64 {
        0.0
    }

    fn blowup_limit(&self) -> Option<f64> {
        None
    }

    /// Size of `u` compared against [`Self::blowup_limit`].
    fn guard_norm(&self, u: &[f64]) -> f64 {
        u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Finite element system of a [`ProblemSpec`] on a weighted grid.
pub struct DdmSystem {
    pub disc: Discretization,
    pub problem: ProblemSpec,
    mass: CsrMatrix,
    stiffness: CsrMatrix,
    lumped: Vec<f64>,
    nodes: Vec<Point>,
    regularization: f64,
    /// Nodes of the diffuse domain, where the blowup guard looks.
    guarded: Vec<bool>,
}

impl DdmSystem {
    pub fn new(problem: ProblemSpec, grid: Grid, weight: &dyn Weight, quad_order: usize) -> Result<Self> {
        let disc = Discretization::new(grid, weight, quad_order)?;
        Self::from_discretization(problem, disc)
    }

    pub fn from_discretization(problem: ProblemSpec, disc: Discretization) -> Result<Self> {
        check_coercivity(&disc, &*problem.diffusion, problem.kappa)?;
        let mass = assemble_weighted_mass(&disc);
        let stiffness = assemble_weighted_stiffness(&disc, &*problem.diffusion)?;
        let lumped = mass.row_sums();
        let nodes = (0..disc.num_nodes()).map(|k| disc.grid.node(k)).collect();
        let cell = disc.grid.hx * disc.grid.hy;
        let regularization = REGULARIZATION * cell;
        let threshold = GUARD_WEIGHT * cell;
        let guarded = lumped.iter().map(|&m| m >= threshold).collect();
        Ok(Self { disc, problem, mass, stiffness, lumped, nodes, regularization, guarded })
    }

    pub fn grid(&self) -> &Grid {
        &self.disc.grid
    }
}

impl SemiDiscreteSystem for DdmSystem {
    fn dim(&self) -> usize {
        self.disc.num_nodes()
    }

    fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    fn source(&self, t: f64, u: &[f64]) -> Result<Vec<f64>> {
        assemble_source(&self.disc, &*self.problem.reaction, t, u)
    }

    fn boundary(&self, t: f64) -> Result<Vec<f64>> {
        assemble_boundary_load(&self.disc, &*self.problem.neumann, t)
    }

    fn stabilization(&self, t: f64, u: &[f64]) -> Result<Option<Vec<f64>>> {
        let Some(df) = &self.problem.reaction_derivative else {
            return Ok(None);
        };
        let mut diag = Vec::with_capacity(u.len());
        for ((&x, &ui), &m) in self.nodes.iter().zip(u).zip(&self.lumped) {
            let d = df(t, x, ui);
            if !d.is_finite() {
                return Err(DdmError::NonFinite { what: "reaction derivative", t, x: x.x, y: x.y });
            }
            diag.push((-d).max(0.0) * m);
        }
        Ok(Some(diag))
    }

    fn regularization(&self) -> f64 {
        self.regularization
    }

    fn blowup_limit(&self) -> Option<f64> {
        self.problem.blowup_limit
    }

    /// Largest `|u_i|` over nodes with lumped weighted mass of at least
    /// `omega(d = eps)` times the cell area, i.e. nodes of the diffuse domain.
    /// Far outside it the weight is below 1e-6 and the nodal values do not
    /// enter any weighted quantity.
    fn guard_norm(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.guarded).filter(|(_, &g)| g).fold(0.0, |m, (v, _)| m.max(v.abs()))
    }
}

/// Time level `n` of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeState {
    pub t: f64,
    pub t0: f64,
    pub dt: f64,
    pub step_index: usize,
    pub u_curr: Vec<f64>,
    pub u_prev: Vec<f64>,
    /// `b_f(t^{n-1}, u^{n-1})`, kept to avoid reassembling it.
    source_prev: Option<Vec<f64>>,
}

impl TimeState {
    pub fn new(u0: Vec<f64>, t0: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DdmError::Step { step: 0, message: format!("time step must be positive, got {dt}") });
        }
        Ok(Self { t: t0, t0, dt, step_index: 0, u_prev: u0.clone(), u_curr: u0, source_prev: None })
    }
}

/// Nodal interpolation of the initial datum at `t = 0`.
pub fn init_state(grid: &Grid, u0: &dyn Fn(Point) -> f64, dt: f64) -> Result<TimeState> {
    let mut u = Vec::with_capacity(grid.num_nodes());
    for k in 0..grid.num_nodes() {
        let p = grid.node(k);
        let v = u0(p);
        if !v.is_finite() {
            return Err(DdmError::NonFinite { what: "initial datum", t: 0.0, x: p.x, y: p.y });
        }
        u.push(v);
    }
    TimeState::new(u, 0.0, dt)
}

/// Step matrices for a fixed `dt`, plus solver bookkeeping.
pub struct Stepper<'a, S: SemiDiscreteSystem + ?Sized> {
    system: &'a S,
    dt: f64,
    cg: CgOptions,
    euler_matrix: CsrMatrix,
    bdf2_matrix: CsrMatrix,
    /// Step matrix plus the stabilization diagonal, rebuilt every step.
    scratch: CsrMatrix,
    diag_pos: Vec<usize>,
    /// Compact copies of the Euler and BDF2 matrices and a scratch stencil,
    /// when the pattern is the nine-point grid stencil.
    stencils: Option<[SymmetricStencil; 3]>,
    /// `(n, u^n)` of the level before the previous one, for the CG guess.
    older: Option<(usize, Vec<f64>)>,
    pub last_report: Option<CgReport>,
    pub total_iterations: usize,
}

impl<'a, S: SemiDiscreteSystem + ?Sized> Stepper<'a, S> {
    pub fn new(system: &'a S, dt: f64, cg: CgOptions) -> Result<Self> {
        let build = |c: f64| -> Result<CsrMatrix> {
            let mut m = system.mass().linear_combination(c, system.stiffness(), dt)?;
            let reg = system.regularization();
            if reg != 0.0 {
                m.add_diagonal(&vec![reg; system.dim()])?;
            }
            Ok(m)
        };
        let euler_matrix = build(1.0)?;
        let diag_pos = euler_matrix.diagonal_positions()?;
        let bdf2_matrix = build(1.5)?;
        let stencils = match (SymmetricStencil::from_csr(&euler_matrix), SymmetricStencil::from_csr(&bdf2_matrix)) {
            (Some(e), Some(b)) => Some([e.clone(), b, e]),
            _ => None,
        };
        Ok(Self {
            system,
            dt,
            cg,
            scratch: euler_matrix.clone(),
            diag_pos,
            stencils,
            euler_matrix,
            bdf2_matrix,
            older: None,
            last_report: None,
            total_iterations: 0,
        })
    }

    /// Solves one step system. `star` is the extrapolated state the
    /// stabilization is evaluated at, `guess` the CG starting point.
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &mut self,
        bdf2: bool,
        mut rhs: Vec<f64>,
        star: &[f64],
        guess: &[f64],
        t: f64,
        prev: &[f64],
        step: usize,
    ) -> Result<Vec<f64>> {
        let reg = self.system.regularization();
        if reg != 0.0 {
            rhs.iter_mut().zip(prev).for_each(|(r, p)| *r += reg * p);
        }
        let base = if bdf2 { &self.bdf2_matrix } else { &self.euler_matrix };
        let stab = self.system.stabilization(t, star)?;
        let solution = match (stab, &mut self.stencils) {
            (Some(diag), Some([euler, bdf, scratch])) => {
                let shift: Vec<f64> = diag.iter().map(|d| self.dt * d).collect();
                scratch.set_shifted_diagonal(if bdf2 { bdf } else { euler }, &shift);
                for ((r, s), g) in rhs.iter_mut().zip(&shift).zip(star) {
                    *r += s * g;
                }
                cg_solve(&*scratch, &rhs, guess, self.cg)
            }
            (None, Some([euler, bdf, _])) => cg_solve(if bdf2 { &*bdf } else { &*euler }, &rhs, guess, self.cg),
            (Some(diag), None) => {
                self.scratch.values.copy_from_slice(&base.values);
                for ((&p, d), (r, g)) in self.diag_pos.iter().zip(&diag).zip(rhs.iter_mut().zip(star)) {
                    let s = self.dt * d;
                    self.scratch.values[p] += s;
                    *r += s * g;
                }
                cg_solve(&self.scratch, &rhs, guess, self.cg)
            }
            (None, None) => cg_solve(base, &rhs, guess, self.cg),
        }
        .map_err(|e| DdmError::Step { step, message: e.to_string() })?;
        let (u, report) = solution;
        self.total_iterations += report.iterations;
        self.last_report = Some(report);
        if !report.converged {
            return Err(DdmError::Step {
                step,
                message: format!(
                    "CG did not converge in {} iterations (relative residual {:e})",
                    report.iterations, report.relative_residual
                ),
            });
        }
        self.check_state(&u, step)?;
        Ok(u)
    }

    fn check_state(&self, u: &[f64], step: usize) -> Result<()> {
        let umax = u.iter().fold(0.0_f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) });
        if !umax.is_finite() {
            return Err(DdmError::Step { step, message: "non-finite solution".into() });
        }
        if let Some(limit) = self.system.blowup_limit() {
            let umax = self.system.guard_norm(u);
            if umax > limit {
                return Err(DdmError::Step {
                    step,
                    message: format!(
                        "stiffness: max |u| on the diffuse domain = {umax:.3e} exceeds {limit}; the reaction term is too stiff for dt = {:e}, use a smaller time step",
                        self.dt
                    ),
                });
            }
        }
        Ok(())
    }

    /// Backward Euler bootstrap:
    /// `(M + dt K) u^1 = M u^0 + dt (b_f(t^1, u^0) + c_g(t^1))`.
    pub fn bdf1_step(&mut self, state: &TimeState) -> Result<TimeState> {
        if state.step_index != 0 {
            return Err(DdmError::Step { step: state.step_index, message: "BDF1 bootstrap only runs from step 0".into() });
        }
        let dt = self.dt;
        let t1 = state.t + dt;
        let u0 = &state.u_curr;
        let mut rhs = vec![0.0; u0.len()];
        self.system.mass().mul_into(u0, &mut rhs);
        let bf = self.system.source(t1, u0)?;
        let cg = self.system.boundary(t1)?;
        for ((r, f), g) in rhs.iter_mut().zip(&bf).zip(&cg) {
            *r += dt * (f + g);
        }
        let u1 = self.solve(false, rhs, u0, u0, t1, u0, 1)?;
        Ok(TimeState {
            t: t1,
            t0: state.t0,
            dt,
            step_index: 1,
            u_prev: u0.clone(),
            u_curr: u1,
            source_prev: None,
        })
    }

    /// `(3/2 M + dt K) u^{n+1} = M (2 u^n - u^{n-1}/2) + dt (2 b_f^n - b_f^{n-1} + c_g^{n+1})`.
    pub fn bdf2_step(&mut self, state: &TimeState) -> Result<TimeState> {
        if state.step_index == 0 {
            return Err(DdmError::Step { step: 0, message: "BDF2 needs two time levels".into() });
        }
        let dt = self.dt;
        let t_next = state.t + dt;
        let step = state.step_index + 1;
        let (un, uprev) = (&state.u_curr, &state.u_prev);

        let hist: Vec<f64> = un.iter().zip(uprev).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let mut rhs = vec![0.0; un.len()];
        self.system.mass().mul_into(&hist, &mut rhs);

        let f_now = self.system.source(state.t, un)?;
        let f_prev = match &state.source_prev {
            Some(f) => f.clone(),
            None => self.system.source(state.t - dt, uprev)?,
        };
        let cg = self.system.boundary(t_next)?;
        for (((r, a), b), g) in rhs.iter_mut().zip(&f_now).zip(&f_prev).zip(&cg) {
            *r += dt * (2.0 * a - b + g);
        }
        let star: Vec<f64> = un.iter().zip(uprev).map(|(a, b)| 2.0 * a - b).collect();
        // quadratic extrapolation once three levels are known
        let guess = match &self.older {
            Some((k, older)) if *k + 2 == state.step_index => {
                un.iter().zip(uprev).zip(older).map(|((a, b), c)| 3.0 * (a - b) + c).collect()
            }
            _ => star.clone(),
        };
        let u_next = self.solve(true, rhs, &star, &guess, t_next, un, step)?;
        self.older = Some((state.step_index - 1, uprev.clone()));
        Ok(TimeState {
            t: t_next,
            t0: state.t0,
            dt,
            step_index: step,
            u_prev: un.clone(),
            u_curr: u_next,
            source_prev: Some(f_now),
        })
    }

    pub fn step(&mut self, state: &TimeState) -> Result<TimeState> {
        if state.step_index == 0 {
            self.bdf1_step(state)
        } else {
            self.bdf2_step(state)
        }
    }
}

/// Linear solver work over a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub steps: usize,
    pub cg_iterations: usize,
    pub max_cg_iterations: usize,
}

/// Advances `state` by `nt` steps (one BDF1 step, then BDF2), calling
/// `observe` after every step.
pub fn integrate<S: SemiDiscreteSystem + ?Sized>(
    system: &S,
    state: TimeState,
    nt: usize,
    cg: CgOptions,
    mut observe: impl FnMut(&TimeState),
) -> Result<(TimeState, SolveStats)> {
    let mut stepper = Stepper::new(system, state.dt, cg)?;
    let mut state = state;
    let mut stats = SolveStats::default();
    for _ in 0..nt {
        state = stepper.step(&state)?;
        let its = stepper.last_report.map_or(0, |r| r.iterations);
        stats.steps += 1;
        stats.cg_iterations += its;
        stats.max_cg_iterations = stats.max_cg_iterations.max(its);
        observe(&state);
    }
    Ok((state, stats))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub quad_order: usize,
    pub cg_tol: f64,
    /// Defaults to `10 sqrt(n)`.
    pub cg_max_iter: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { quad_order: 4, cg_tol: STEP_TOLERANCE, cg_max_iter: None }
    }
}

impl RunOptions {
    pub fn cg_options(&self, n: usize) -> CgOptions {
        let mut o = CgOptions::for_size(self.cg_tol, n);
        if let Some(m) = self.cg_max_iter {
            o.max_iter = m;
        }
        o
    }
}

pub struct RunOutput {
    pub system: DdmSystem,
    pub state: TimeState,
    pub stats: SolveStats,
}

/// Solves `problem` on `grid` with weight `weight` using `nt` steps to the
/// problem's final time. `observe` sees the initial state and every step.
pub fn run(
    problem: &ProblemSpec,
    grid: &Grid,
    weight: &dyn Weight,
    nt: usize,
    opts: RunOptions,
    observe: impl FnMut(&TimeState),
) -> Result<RunOutput> {
    let system = DdmSystem::new(problem.clone(), grid.clone(), weight, opts.quad_order)?;
    let (state, stats) = run_system(&system, nt, opts, observe)?;
    Ok(RunOutput { system, state, stats })
}

/// Same as [`run`] with a prebuilt system.
pub fn run_system(
    system: &DdmSystem,
    nt: usize,
    opts: RunOptions,
    mut observe: impl FnMut(&TimeState),
) -> Result<(TimeState, SolveStats)> {
    if nt < 2 {
        return Err(DdmError::Step { step: 0, message: format!("need at least 2 time steps, got {nt}") });
    }
    let problem = &system.problem;
    if !(problem.final_time > 0.0 && problem.final_time.is_finite()) {
        return Err(DdmError::Step { step: 0, message: format!("final time must be positive, got {}", problem.final_time) });
    }
    let dt = problem.final_time / nt as f64;
    let state = init_state(system.grid(), &*problem.initial, dt)?;
    observe(&state);
    let cg = opts.cg_options(system.dim());
    let (mut last, stats) = integrate(system, state, nt, cg, observe)?;
    // avoid drift from accumulating dt
    last.t = problem.final_time;
    Ok((last, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `m u' + lambda u = f(t, u)` as a 1x1 system.
    pub(crate) struct Scalar {
        pub m: CsrMatrix,
        pub k: CsrMatrix,
        pub f: fn(f64, f64) -> f64,
    }

    impl Scalar {
        pub fn new(lambda: f64, f: fn(f64, f64) -> f64) -> Self {
            Self { m: CsrMatrix::identity(1), k: CsrMatrix::from_diagonal(&[lambda]), f }
        }
    }

    impl SemiDiscreteSystem for Scalar {
        fn dim(&self) -> usize {
            1
        }
        fn mass(&self) -> &CsrMatrix {
            &self.m
        }
        fn stiffness(&self) -> &CsrMatrix {
            &self.k
        }
        fn source(&self, t: f64, u: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![(self.f)(t, u[0])])
        }
        fn boundary(&self, _t: f64) -> Result<Vec<f64>> {
            Ok(vec![0.0])
        }
    }

    const TIGHT: CgOptions = CgOptions { tol: 1e-15, max_iter: 10 };

    #[test]
    fn euler_bootstrap_closed_forms() {
        let dt = 0.1;
        let s0 = TimeState::new(vec![2.0], 0.0, dt).unwrap();

        let diff = Scalar::new(3.0, |_, _| 0.0);
        let s1 = Stepper::new(&diff, dt, TIGHT).unwrap().bdf1_step(&s0).unwrap();
        assert!((s1.u_curr[0] - 2.0 / (1.0 + dt * 3.0)).abs() < 1e-14);

        let frozen = Scalar::new(0.0, |_, _| 0.0);
        let s1 = Stepper::new(&frozen, dt, TIGHT).unwrap().bdf1_step(&s0).unwrap();
        assert_eq!(s1.u_curr, s0.u_curr);

        let decay = Scalar::new(0.0, |_, u| -u);
        let s1 = Stepper::new(&decay, dt, TIGHT).unwrap().bdf1_step(&s0).unwrap();
        assert!((s1.u_curr[0] - (1.0 - dt) * 2.0).abs() < 1e-14);
    }

    #[test]
    fn bdf2_matches_recurrence() {
        let (lambda, dt) = (2.5, 0.05);
        let sys = Scalar::new(lambda, |_, _| 0.0);
        let mut stepper = Stepper::new(&sys, dt, TIGHT).unwrap();
        let mut state = TimeState::new(vec![1.0], 0.0, dt).unwrap();
        state = stepper.bdf1_step(&state).unwrap();
        let (mut prev, mut curr) = (1.0, 1.0 / (1.0 + dt * lambda));
        assert!((state.u_curr[0] - curr).abs() < 1e-14);
        for _ in 0..20 {
            state = stepper.bdf2_step(&state).unwrap();
            let next = (2.0 * curr - 0.5 * prev) / (1.5 + dt * lambda);
            prev = curr;
            curr = next;
            assert!((state.u_curr[0] - curr).abs() < 1e-14);
        }
    }

    #[test]
    fn bdf2_decay_is_second_order() {
        let sys = Scalar::new(0.0, |_, u| -u);
        let error = |nt: usize| {
            let dt = 1.0 / nt as f64;
            let (s, stats) = integrate(&sys, TimeState::new(vec![1.0], 0.0, dt).unwrap(), nt, TIGHT, |_| {}).unwrap();
            assert_eq!(stats.steps, nt);
            (s.u_curr[0] - (-1.0_f64).exp()).abs()
        };
        // ratios approach 4 from above; below ~80 steps they exceed 4.4
        for nt in [80, 160, 320] {
            let ratio = error(nt) / error(2 * nt);
            assert!((3.6..=4.4).contains(&ratio), "nt = {nt}: ratio {ratio}");
        }
    }

    #[test]
    fn stencil_and_csr_steps_agree() {
        use crate::geometry::{DistanceField, PhaseField};
        use crate::grid::BoxDomain;
        use std::sync::Arc;

        // stiff bistable reaction so every step takes the stabilized path
        let mut spec = ProblemSpec::heat(1.0, Arc::new(|p: Point| 0.5 + 0.4 * (6.0 * p.x).sin() * p.y), 0.05);
        spec.reaction = Arc::new(|_, _, u| -(u * u * u - u) * 100.0);
        spec.reaction_derivative = Some(Arc::new(|_, _, u| -(3.0 * u * u - 1.0) * 100.0));
        let grid = Grid::new(BoxDomain::new(-0.5, 0.5, -0.5, 0.5), 20, 12).unwrap();
        let pf = PhaseField::new(DistanceField::circle(Point::default(), 0.3).unwrap(), 0.125).unwrap();
        let sys = DdmSystem::new(spec, grid, &pf, 4).unwrap();
        let dt = 0.05 / 16.0;
        let cg = CgOptions { tol: 1e-13, max_iter: 2000 };
        let run = |compact: bool| {
            let mut stepper = Stepper::new(&sys, dt, cg).unwrap();
            assert!(stepper.stencils.is_some());
            if !compact {
                stepper.stencils = None;
            }
            let mut state = init_state(sys.grid(), &*sys.problem.initial, dt).unwrap();
            for _ in 0..16 {
                state = stepper.step(&state).unwrap();
            }
            state.u_curr
        };
        let (a, b) = (run(true), run(false));
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn step_preconditions() {
        let sys = Scalar::new(1.0, |_, _| 0.0);
        let mut st = Stepper::new(&sys, 0.1, TIGHT).unwrap();
        let s0 = TimeState::new(vec![1.0], 0.0, 0.1).unwrap();
        assert!(st.bdf2_step(&s0).is_err());
        let s1 = st.bdf1_step(&s0).unwrap();
        assert!(st.bdf1_step(&s1).is_err());
        assert!(TimeState::new(vec![1.0], 0.0, 0.0).is_err());
    }
}
