use std::path::PathBuf;

use thiserror::Error;

use crate::numerics::FixedPointReport;

/// Errors raised by the solvers and the command front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: expected {expected} samples, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("point {point} outside [0, {upper}]")]
    OutOfRange { point: f64, upper: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("no convergence after {} iterations (residual {:.3e})", .report.iterations, .report.final_residual)]
    NoConvergence { report: FixedPointReport },

    #[error("imaginary-time step shrank to {dt:.3e} without lowering the energy")]
    StepTooLarge { dt: f64 },

    #[error("Pekar solver stagnated: {0}")]
    Stagnation(String),

    #[error("grid too coarse near the origin: {0}")]
    GridTooCoarse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit status: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
