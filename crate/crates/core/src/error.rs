use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least {needed} points in dimension {dim}, got {got}")]
    DimensionTooSmall { dim: usize, needed: usize, got: usize },

    #[error("points lie in a proper affine subspace of R^{dim}")]
    DegenerateSupport { dim: usize },

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("simplex is numerically singular (condition estimate {condition:e})")]
    SingularSimplex { condition: f64 },

    #[error("no boundary facet is visible from an exterior query")]
    NoVisibleFacet,

    #[error("cannot project a zero-norm point onto the sphere")]
    ZeroNorm,

    #[error("query at distance {norm} from the centroid is outside the ball of radius {radius}")]
    OutsideBall { norm: f64, radius: f64 },

    #[error("no virtual simplex contains the exterior query")]
    NoContainingVirtualSimplex,

    #[error("radius margin must be positive, got {0}")]
    InvalidMargin(f64),

    #[error("invalid sample count {0}")]
    InvalidCount(usize),

    #[error("{clusters} clusters do not fit on the {vertices} hypercube vertices")]
    TooManyClusters { clusters: usize, vertices: usize },

    #[error("parse error at row {row}, column {column}: {message}")]
    ParseError {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid model file: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable variant name, used in command-line diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionTooSmall { .. } => "DimensionTooSmall",
            Error::DegenerateSupport { .. } => "DegenerateSupport",
            Error::DuplicatePoint { .. } => "DuplicatePoint",
            Error::SingularSimplex { .. } => "SingularSimplex",
            Error::NoVisibleFacet => "NoVisibleFacet",
            Error::ZeroNorm => "ZeroNorm",
            Error::OutsideBall { .. } => "OutsideBall",
            Error::NoContainingVirtualSimplex => "NoContainingVirtualSimplex",
            Error::InvalidMargin(_) => "InvalidMargin",
            Error::InvalidCount(_) => "InvalidCount",
            Error::TooManyClusters { .. } => "TooManyClusters",
            Error::ParseError { .. } => "ParseError",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::UnknownLabel(_) => "UnknownLabel",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::InvalidModel(_) => "InvalidModel",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}
