use thiserror::Error;

/// Errors raised by parameter validation, configuration loading and the
/// experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("range error: {0}")]
    Range(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error stems from bad user input (process exit status 2).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::InvalidParameter { .. }
                | Error::Range(_)
                | Error::Config(_)
        )
    }
}
