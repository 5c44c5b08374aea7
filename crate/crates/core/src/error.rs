use thiserror::Error;

/// Errors produced by the numerical layer, the family constructors and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Family parameters violate an invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An infinite series hit its term budget before meeting its tolerance.
    #[error("series did not converge within {terms} terms: {detail}")]
    NonConvergence { terms: usize, detail: String },

    /// A series met its stopping rule but cancellation destroyed the digits it claims.
    #[error("loss of significance after {terms} terms: largest term {max_term:e} vs sum {sum:e}")]
    LossOfSignificance { terms: usize, max_term: f64, sum: f64 },

    /// Adaptive quadrature could not reach its tolerance.
    #[error("integration failed: {0}")]
    Integration(String),

    /// The survival function underflowed, so the hazard rate is not representable.
    #[error("survival function underflows to zero at x = {0}")]
    TailUnderflow(f64),

    #[error("unknown distribution `{0}`")]
    UnknownName(String),

    #[error("`{name}` takes {expected} parameter(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },

    /// Integer Tsallis order above the configured cap.
    #[error("entropy order {alpha} exceeds the cap of {cap}")]
    OrderCap { alpha: u32, cap: u32 },

    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of an iterative method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::LossOfSignificance { .. }
                | Error::Integration(_)
                | Error::TailUnderflow(_)
        )
    }
}
