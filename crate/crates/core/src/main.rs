use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ddm_core::analysis::format_epsilon;
use ddm_core::cli::{load_config, run_checks, run_sweep, SweepMode, SweepResult};
use ddm_core::DdmError;

/// Diffuse domain solver for semilinear parabolic problems.
#[derive(Parser)]
#[command(name = "ddm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every thickness of a config: reports, snapshots and the rate table.
    Run { config: PathBuf },
    /// Like `run`, but only the manifest and the rate table.
    Rates { config: PathBuf },
    /// Numerical probes of the diffuse trace, Poincare and integral estimates.
    Check {
        /// Seed of the randomly sampled probes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

fn fail(e: &DdmError) -> ExitCode {
    eprintln!("ddm: {e}");
    ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_SOLVER })
}

fn print_sweep(r: &SweepResult) {
    println!("problem: {}", r.problem);
    match &r.table {
        Some(t) => print!("{}", t.render_text()),
        None => {
            for run in &r.runs {
                println!(
                    "eps = {}: {} steps, weighted mass {:.6e}, max |u| {:.6e}",
                    format_epsilon(run.epsilon),
                    run.stats.steps,
                    run.weighted_mass,
                    run.max_abs
                );
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => sweep(&config, SweepMode::Full),
        Command::Rates { config } => sweep(&config, SweepMode::RatesOnly),
        Command::Check { seed } => match run_checks(seed) {
            Ok(results) => {
                for r in &results {
                    println!("{}", r.line());
                }
                let failed = results.iter().filter(|r| !r.passed).count();
                println!("{} probes, {failed} failed", results.len());
                if failed == 0 {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(&e),
        },
    }
}

fn sweep(config: &std::path::Path, mode: SweepMode) -> ExitCode {
    let result = load_config(config).and_then(|cfg| run_sweep(&cfg, mode));
    match result {
        Ok(r) => {
            print_sweep(&r);
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
