use thiserror::Error;

/// Errors raised by the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a structural invariant (shape, sign, normalization).
    #[error("invalid {what}: {reason}")]
    Validation { what: String, reason: String },

    /// Inputs are well-formed but the requested quantity is undefined for them.
    #[error("domain error: {0}")]
    Domain(String),

    /// Decoded outputs carry more energy than the detector received.
    #[error("energy conservation violated: outputs carry {output:e} J but only {received:e} J was received")]
    Conservation { output: f64, received: f64 },
}

impl Error {
    pub(crate) fn validation(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            what: what.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by malformed input rather than by the model's domain.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_positive(what: &str, value: f64) -> Result<()> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::validation(what, format!("must be > 0, got {value}")))
    }
}

pub(crate) fn require_nonnegative(what: &str, value: f64) -> Result<()> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::validation(
            what,
            format!("must be >= 0, got {value}"),
        ))
    }
}
