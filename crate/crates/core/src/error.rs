use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state is not in up-to-phases canonical form (residual mass {residual:e})")]
    NotCanonical { residual: f64 },

    #[error("objective returned a non-finite value at {params:?}")]
    NonFiniteObjective { params: Vec<f64> },

    #[error("histogram has no kept shots; tangle estimate is undefined")]
    EmptyHistogram,

    #[error("relative error undefined for exact tangle {tau_exact}")]
    UndefinedRelativeError { tau_exact: f64 },

    #[error("malformed state file: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
