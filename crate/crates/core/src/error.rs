use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate state: phase-space origin has no Prüfer angle")]
    DegenerateState,

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("integration left the domain of the drift at t = {t}")]
    DomainExit { t: f64 },

    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("non-oscillatory instance: {0}")]
    NonOscillatory(String),

    #[error("range containment violated: {0}")]
    RangeContainment(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("warping is not p-parabolic: {0}")]
    NotParabolic(String),

    #[error("root not bracketed: {0}")]
    RootNotBracketed(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
}

impl Error {
    /// True for failures of the numerics, false for rejected inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::Domain(_) | Error::Unsupported(_) | Error::InvalidPolynomial(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
