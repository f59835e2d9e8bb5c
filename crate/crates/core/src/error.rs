use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {0} is not supported (need d >= 3)")]
    Dimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("vector norm {0:e} is too small to normalize")]
    ZeroVector(f64),

    #[error("vector is not finite")]
    NonFinite,

    #[error("vectors are not orthogonal (inner product {0:e})")]
    NotOrthogonal(f64),

    #[error("points are antipodal (angle {0}); the great circle through them is not unique")]
    Antipodal(f64),

    #[error("degenerate tangent draw after {0} attempts")]
    DegenerateDraw(usize),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("{what} exceeded its cap of {cap} iterations")]
    IterationCap { what: &'static str, cap: u64 },

    #[error("non-finite gradient at state {state:?}")]
    NonFiniteGradient { state: Vec<f64> },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("series of length {0} is too short")]
    SeriesTooShort(usize),

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
