use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("denominator must be a positive integer")]
    ZeroDenominator,

    /// The ball straddles zero, so its reciprocal has no finite enclosure.
    /// Recoverable: recomputing at higher precision shrinks the ball away
    /// from zero whenever the exact value is nonzero.
    #[error("ball contains zero; reciprocal undefined")]
    BallContainsZero,

    /// The ball is too wide to isolate a unique integer.  Recoverable by
    /// recomputing at higher precision.
    #[error("cannot certify an integer from ball {mid} +/- {rad}")]
    CertificationFailed { mid: String, rad: String },

    #[error("precision exhausted: certification still fails at the {cap}-bit cap")]
    PrecisionExhausted { cap: u32 },

    #[error("tau must lie in the upper half-plane")]
    NotInUpperHalfPlane,

    #[error("Im(tau) must be at least 1/10 for the series evaluation")]
    ImTauTooSmall,

    #[error("sample system still singular after {attempts} resamplings")]
    SingularSystem { attempts: u32 },

    #[error("parameter too large: {0}")]
    ParameterTooLarge(String),

    #[error("internal error: formula implementation inconsistent ({0})")]
    FormulaInconsistent(String),

    #[error("internal error: certified value {value} is not divisible by {divisor}")]
    DivisibilityViolation { value: String, divisor: String },
}

impl Error {
    /// Errors that higher working precision can cure; the escalation loop
    /// retries on these and propagates everything else.
    pub(crate) fn is_precision_limited(&self) -> bool {
        matches!(
            self,
            Error::BallContainsZero | Error::CertificationFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
