//! One solver run per interface thickness, plus the artifacts on disk.
//!
//! Layout of the output directory:
//!
//! ```text
//! manifest.txt           resolved configuration
//! rates.csv              error table (problems with an exact solution)
//! eps_1-8/report.txt     per-run summary
//! eps_1-8/u_000512.txt   snapshot at step 512
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use super::config::RunConfig;
use super::fields::{dump_field_with_omega, nodal_omega};
use crate::analysis::{format_epsilon, rate_table, weighted_h1_error, weighted_l2_error, ErrorReport, RateTable};
use crate::error::{DdmError, Result};
use crate::geometry::PhaseField;
use crate::grid::Grid;
use crate::problems::NamedProblem;
use crate::timestepper::{run_system, DdmSystem, SemiDiscreteSystem, SolveStats, TimeState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// Reports, snapshots and the rate table.
    Full,
    /// Rate table and manifest only.
    RatesOnly,
}

/// Summary of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub epsilon: f64,
    /// Weighted L2 and H1 errors at the final time.
    pub errors: Option<(f64, f64)>,
    pub stats: SolveStats,
    pub seconds: f64,
    /// `int u omega dx` at the final time.
    pub weighted_mass: f64,
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub problem: String,
    pub runs: Vec<RunOutcome>,
    /// Present when the problem has an exact solution.
    pub table: Option<RateTable>,
}

/// Directory name of the run with thickness `eps`, e.g. `eps_1-16`.
pub fn run_dir_name(eps: f64) -> String {
    format!("eps_{}", format_epsilon(eps).replace('/', "-"))
}

/// Number of concurrent runs: `DDM_THREADS` if set, else the available
/// parallelism, never more than `jobs`.
pub fn worker_count(jobs: usize) -> Result<usize> {
    let requested = match std::env::var("DDM_THREADS") {
        Ok(v) => v.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| DdmError::Config {
            line: None,
            message: format!("DDM_THREADS must be a positive integer, got {v:?}"),
        })?,
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(requested.min(jobs).max(1))
}

pub fn run_sweep(cfg: &RunConfig, mode: SweepMode) -> Result<SweepResult> {
    let problem = cfg.build_problem()?;
    std::fs::create_dir_all(&cfg.output)?;
    std::fs::write(cfg.output.join("manifest.txt"), cfg.manifest(problem.domain_box, problem.spec.final_time))?;

    let jobs = cfg.eps.len();
    let workers = worker_count(jobs)?;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunOutcome>>>> = Mutex::new((0..jobs).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= jobs {
                    break;
                }
                let out = run_one(cfg, &problem, cfg.eps[k], mode);
                slots.lock().expect("no worker panicked")[k] = Some(out);
            });
        }
    });

    let mut runs = Vec::with_capacity(jobs);
    for (k, slot) in slots.into_inner().expect("no worker panicked").into_iter().enumerate() {
        let eps = cfg.eps[k];
        let out = slot.expect("every run was scheduled");
        runs.push(out.map_err(|e| DdmError::AtEpsilon { eps: format_epsilon(eps), source: Box::new(e) })?);
    }

    let table = if problem.spec.exact.is_some() {
        let reports: Vec<ErrorReport> = runs
            .iter()
            .map(|r| {
                let (l2, h1) = r.errors.expect("exact solution present");
                ErrorReport {
                    epsilon: r.epsilon,
                    l2_weighted: l2,
                    h1_weighted: h1,
                    nx: cfg.nx,
                    ny: cfg.ny,
                    nt: cfg.nt,
                    seconds: r.seconds,
                }
            })
            .collect();
        let table = if cfg.rates { rate_table(reports)? } else { RateTable::without_rates(reports) };
        std::fs::write(cfg.output.join("rates.csv"), table.to_csv(cfg.timing))?;
        Some(table)
    } else {
        None
    };
    Ok(SweepResult { problem: problem.name, runs, table })
}

fn run_one(cfg: &RunConfig, problem: &NamedProblem, eps: f64, mode: SweepMode) -> Result<RunOutcome> {
    let start = Instant::now();
    let grid = Grid::new(problem.domain_box, cfg.nx, cfg.ny)?;
    let weight = PhaseField::new(problem.domain.clone(), eps)?;
    let system = DdmSystem::new(problem.spec.clone(), grid.clone(), &weight, cfg.quad_order)?;

    let dir = cfg.output.join(run_dir_name(eps));
    let snapshots = mode == SweepMode::Full && !cfg.snapshots.is_empty();
    if mode == SweepMode::Full {
        std::fs::create_dir_all(&dir)?;
    }
    let omega = if snapshots { nodal_omega(&grid, &weight) } else { Vec::new() };
    let mut io_error = None;
    let observe = |s: &TimeState| {
        if snapshots && io_error.is_none() && cfg.snapshots.contains(&s.step_index) {
            if let Err(e) = dump_field_with_omega(&grid, &s.u_curr, &omega, &snapshot_path(&dir, s.step_index)) {
                io_error = Some(e);
            }
        }
    };
    let (state, stats) = run_system(&system, cfg.nt, cfg.run_options(), observe)?;
    if let Some(e) = io_error {
        return Err(e);
    }

    let exact = system.problem.exact.as_ref();
    let errors = match exact {
        Some(_) => Some((
            weighted_l2_error(&system.disc, &state.u_curr, exact, state.t)?,
            weighted_h1_error(&system.disc, &state.u_curr, exact, state.t)?,
        )),
        None => None,
    };
    let weighted_mass = system.mass().row_sums().iter().zip(&state.u_curr).map(|(m, u)| m * u).sum();
    let max_abs = state.u_curr.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let outcome = RunOutcome { epsilon: eps, errors, stats, seconds: start.elapsed().as_secs_f64(), weighted_mass, max_abs };
    if mode == SweepMode::Full {
        std::fs::write(dir.join("report.txt"), render_report(cfg, problem, &state, &outcome))?;
    }
    Ok(outcome)
}

fn snapshot_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("u_{step:06}.txt"))
}

fn render_report(cfg: &RunConfig, problem: &NamedProblem, state: &TimeState, r: &RunOutcome) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k}={v}");
    };
    put("problem", problem.name.clone());
    put("epsilon", format_epsilon(r.epsilon));
    put("grid", format!("{}x{}", cfg.nx, cfg.ny));
    put("nt", cfg.nt.to_string());
    put("dt", format!("{:e}", state.dt));
    put("final_time", format!("{:?}", state.t));
    put("cg_iterations", r.stats.cg_iterations.to_string());
    put("max_cg_iterations", r.stats.max_cg_iterations.to_string());
    put("weighted_mass", format!("{:.16e}", r.weighted_mass));
    put("max_abs_u", format!("{:.16e}", r.max_abs));
    if let Some((l2, h1)) = r.errors {
        put("l2_weighted", format!("{l2:.16e}"));
        put("h1_weighted", format!("{h1:.16e}"));
    }
    if cfg.timing {
        put("seconds", format!("{:.3}", r.seconds));
    }
    out
}
