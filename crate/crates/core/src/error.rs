use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum DdmError {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("degenerate mask: {0}")]
    DegenerateMask(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("unsupported quadrature order {0} (expected 2..=5)")]
    QuadratureOrder(usize),

    #[error("coercivity violation: diffusion coefficient {value} at ({x}, {y}) outside [{lo}, {hi}]")]
    Coercivity {
        value: f64,
        x: f64,
        y: f64,
        lo: f64,
        hi: f64,
    },

    #[error("non-finite {what} at ({x}, {y}), t = {t}")]
    NonFinite {
        what: &'static str,
        t: f64,
        x: f64,
        y: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("linear solver failure: {0}")]
    Solver(String),

    #[error("time step {step}: {message}")]
    Step { step: usize, message: String },

    #[error("missing exact solution{0}")]
    MissingExact(&'static str),

    #[error("rate table: {0}")]
    Rates(String),

    #[error("{}", config_message(*line, message))]
    Config { line: Option<usize>, message: String },

    #[error("eps = {eps}: {source}")]
    AtEpsilon {
        eps: String,
        #[source]
        source: Box<DdmError>,
    },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DdmError {
    pub fn config(line: usize, message: impl Into<String>) -> Self {
        Self::Config { line: Some(line), message: message.into() }
    }

    /// `true` for errors caused by user input rather than the solver.
    pub fn is_config(&self) -> bool {
        match self {
            Self::AtEpsilon { source, .. } => source.is_config(),
            other => matches!(
                other,
                Self::Config { .. } | Self::Input { .. } | Self::DegenerateMask(_) | Self::QuadratureOrder(_)
            ),
        }
    }
}

fn config_message(line: Option<usize>, message: &str) -> String {
    match line {
        Some(n) => format!("line {n}: {message}"),
        None => message.to_string(),
    }
}

pub type Result<T> = std::result::Result<T, DdmError>;
