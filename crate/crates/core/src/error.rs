use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("M = {m} exceeds the dense full-space cap of {cap}")]
    SizeLimit { m: usize, cap: usize },

    #[error("no interior maximum of the success probability in (0, {t_max}]; increase t_max")]
    NoMaximum { t_max: f64 },

    #[error("no sign change of the runtime equation in (0, {scan}]; widen the scan window")]
    RootNotFound { scan: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Machine-readable code used in CLI error records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::SizeLimit { .. } => "size-limit",
            Error::NoMaximum { .. } => "no-maximum",
            Error::RootNotFound { .. } => "root-not-found",
            Error::Io(_) => "io",
            Error::Json(_) => "serialization",
        }
    }

    /// Process exit status for the CLI. Each error class has its own code.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 2,
            Error::SizeLimit { .. } => 3,
            Error::NoMaximum { .. } => 4,
            Error::RootNotFound { .. } => 5,
            Error::Io(_) | Error::Json(_) => 6,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(invalid(format!("M must be at least 2, got {m}")));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(invalid(format!("{name} must be a positive finite number, got {x}")));
    }
    Ok(())
}
