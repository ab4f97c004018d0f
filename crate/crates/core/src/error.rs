use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("no derivation rule for generator `{0}`")]
    MissingRule(String),

    #[error("unknown time derivative `{0}` for this system")]
    UnknownTimeDerivative(String),

    #[error("unknown system `{0}`")]
    UnknownSystem(String),

    #[error("unknown density `{0}`")]
    UnknownDensity(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("polynomial is not numerically evaluable: {0}")]
    NotNumeric(String),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },

    #[error("time step {dt} violates the stability guard (estimated {estimate:.3} > {limit})")]
    Cfl { dt: f64, estimate: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
