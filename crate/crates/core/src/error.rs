use num_complex::Complex64;
use thiserror::Error;

/// Failures raised by the model and the brute-force integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("gamma function pole at z = {0}")]
    GammaPole(Complex64),

    #[error("hypergeometric series at unit argument diverges: Re(c - a - b) = {0}")]
    HypergeometricDomain(f64),

    #[error("line profile vanishes at detuning {0:e} s^-1")]
    SingularProfile(f64),

    #[error("integration failed at t = {t:e} s: {reason}")]
    Integration { t: f64, reason: String },

    #[error("stage windows overlap: {0}")]
    StageOverlap(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Rejects values that are not finite and strictly positive.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}
