use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} is outside the universe")]
    PointOutsideUniverse { point: String },

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown point label `{0}`")]
    UnknownLabel(String),

    #[error("trace is not a generalized Picard sequence: x[{step}+1] is not in the image of x[{step}]")]
    NotPicard { step: usize },

    #[error("image cannot be computed: {0}")]
    ImageNotComputable(String),

    #[error("image representation does not support this operation: {0}")]
    UnrepresentableImage(String),

    #[error("triangle inequality of the generalized distance fails at ({x}, {y}, {z})")]
    TauTriangleViolation { x: String, y: String, z: String },

    #[error("utility is not finite at {point}")]
    InfiniteUtility { point: String },

    #[error("gauge set is unbounded along direction {direction}")]
    UnboundedGauge { direction: String },

    #[error("selection failed at step {step}: {source}")]
    Selection {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
