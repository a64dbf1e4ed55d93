use num_complex::Complex64;
use thiserror::Error;

use crate::jost::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `z` lies on (or too close to) the essential spectrum, so some root has a
    /// vanishing real part.
    #[error("spectral point z = {z}: {detail}")]
    SpectralPoint { z: Complex64, detail: String },

    #[error("invalid preset: {0}")]
    InvalidPreset(String),

    #[error("coefficient tail on the {side} side starting at {a} does not converge")]
    DivergentTail { side: Side, a: f64 },

    #[error("contraction bound {bound:.3e} >= 1; move the anchor further out")]
    ContractionFailure { bound: f64 },

    #[error("no anchor makes the coefficient tail small enough on the {side} side")]
    NoValidAnchor { side: Side },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("integrator failed near x = {x}: step {step:.3e} below minimum")]
    IntegratorFailure { x: f64, step: f64 },

    #[error("fundamental matrix nearly singular at x = {x} (condition {cond:.3e}); z may be close to an eigenvalue")]
    NearSingular { x: f64, cond: f64 },

    #[error("unsupported coefficients: {0}")]
    UnsupportedCoefficients(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("winding number {raw} is not close to an integer")]
    NonIntegerWinding { raw: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by the input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::SpectralPoint { .. }
                | Error::InvalidPreset(_)
                | Error::InvalidArgument(_)
                | Error::Config(_)
                | Error::UnsupportedCoefficients(_)
        )
    }
}
