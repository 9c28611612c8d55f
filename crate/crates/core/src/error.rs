use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    /// The requested minimum exceeds what the channel can deliver at all.
    #[error("infeasible constraint: required {required}, at most {available} achievable")]
    InfeasibleConstraint { required: f64, available: f64 },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("every channel gain is zero; no capacity can be obtained")]
    DegenerateChannel,

    #[error("allocation target set is empty")]
    EmptySet,

    #[error("power budget {budget} exceeds the per-subcarrier cap total {limit}")]
    ResourceInfeasible { budget: f64, limit: f64 },

    #[error("no records to write")]
    EmptyResult,

    #[error("config error: {0}")]
    Config(String),

    #[error("at noise point {noise_db} dB: {source}")]
    AtNoisePoint {
        noise_db: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// Errors caused by bad user input rather than by a failure while running.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidParameter(_)
            | Error::LengthMismatch { .. }
            | Error::Config(_)
            | Error::InfeasibleConstraint { .. }
            | Error::ResourceInfeasible { .. } => true,
            Error::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            Error::AtNoisePoint { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}
