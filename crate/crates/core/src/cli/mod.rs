//! Configuration, experiment orchestration and output files of the `ddm`
//! binary.

pub mod check;
pub mod config;
pub mod fields;
pub mod sweep;

pub use check::{run_checks, ProbeResult};
pub use config::{load_config, parse_config, ProblemKind, RunConfig};
pub use fields::{dump_field, read_field, FieldDump};
pub use sweep::{run_sweep, RunOutcome, SweepMode, SweepResult};
