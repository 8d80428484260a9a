use thiserror::Error;

pub type Result<T, E = TdqmcError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum TdqmcError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}D, got {found}D")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{requested} electrons requested but the lattice has only {available} occupied sites")]
    TooManyElectrons { requested: usize, available: usize },

    #[error("empty wave ensemble")]
    EmptyEnsemble,

    #[error("zone {zone} contains no walkers")]
    EmptyZone { zone: usize },

    #[error("numerical divergence at step {step}: {detail}")]
    Divergence { step: usize, detail: String },

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("configuration-space size {size} exceeds budget {budget}")]
    BudgetExceeded { size: usize, budget: usize },

    #[error("{0}")]
    Config(String),

    #[error("malformed data in {path}: {detail}")]
    Format { path: String, detail: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl TdqmcError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        TdqmcError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        TdqmcError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit status: 1 validation, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            TdqmcError::InvalidParameter { .. }
            | TdqmcError::DimensionMismatch { .. }
            | TdqmcError::TooManyElectrons { .. }
            | TdqmcError::EmptyEnsemble
            | TdqmcError::EmptyZone { .. }
            | TdqmcError::BudgetExceeded { .. }
            | TdqmcError::Config(_) => 1,
            TdqmcError::Divergence { .. } | TdqmcError::NotConverged { .. } => 2,
            TdqmcError::Io { .. } | TdqmcError::Format { .. } => 3,
        }
    }
}
