use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate is not finite: ({0}, {1})")]
    NonFinitePoint(f64, f64),
    #[error("normal vector must have unit length, got norm {0}")]
    NonUnitNormal(f64),
    #[error("flag ray direction is not orthogonal to the plane normal (inner product {0})")]
    RayNotOrthogonal(f64),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("weight must be strictly positive, got {0}")]
    NonPositiveWeight(String),
    #[error("duplicate atom at ({0}, {1}); merge coincident atoms before construction")]
    DuplicateAtom(f64, f64),
    #[error("unsupported dimension {0}; planar measures require dimension 2")]
    UnsupportedDimension(usize),
    #[error("cannot parse rational number from {0:?}")]
    InvalidRational(String),
    #[error("degenerate bounding box")]
    DegenerateBox,
    #[error("level must be positive, got {0}")]
    NonPositiveLevel(String),
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("resolution must be at least 2x2, got {0}x{1}")]
    BadResolution(usize, usize),
    #[error("measure is not purely atomic")]
    NotAtomic,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("exact region failed verification: {0}")]
    RegionVerification(String),
    #[error("measure spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
