use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma has a pole at {0}")]
    GammaPole(f64),

    #[error("{what}: argument {arg} outside the domain")]
    Domain { what: &'static str, arg: f64 },

    #[error("{what} did not converge after {terms} terms (partial sum {partial:e}, last term {last:e})")]
    NonConvergence {
        what: &'static str,
        terms: usize,
        partial: f64,
        last: f64,
    },

    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),

    #[error("{what} is singular at x = {x}")]
    Singular { what: &'static str, x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported function: {0}")]
    Unsupported(String),

    #[error("grid calibration failed: expected {expected}, got {got}")]
    Calibration { expected: f64, got: f64 },

    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
