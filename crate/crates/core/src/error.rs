use thiserror::Error;

/// Errors raised by the physics modules and the command-line layer.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical result failed its own acceptance bound.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Bad command-line flag or configuration entry. `key` names the offender.
    #[error("usage error for `{key}`: {message}")]
    Usage { key: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Usage {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage { .. } => 2,
            Error::Domain(_) => 2,
            Error::Numerical(_) => 3,
            Error::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects NaN and infinities with a message naming the quantity.
pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<f64> {
    ensure_finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(format!("{name} must be positive, got {value}")))
    }
}
