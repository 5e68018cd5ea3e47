use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the individual
/// subsystems so they can cross module and FFI boundaries without wrapping.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh resolution must be at least 1x1 (got {nx}x{ny})")]
    ZeroCells { nx: usize, ny: usize },
    #[error("degenerate rectangle: ({x0}, {y0}) .. ({x1}, {y1})")]
    InvalidRect { x0: f64, y0: f64, x1: f64, y1: f64 },
    #[error("boundary tag spec does not match subdomain: {0}")]
    TagSpec(String),
    #[error("interface traces do not match: {0}")]
    NonMatching(String),
    #[error("interface-tagged edge does not lie on the interface line: ({0}, {1})")]
    NotOnLine(f64, f64),
    #[error("unsupported polynomial degree {0}")]
    UnsupportedDegree(usize),
    #[error("unsupported quadrature order {0}")]
    UnsupportedOrder(usize),
    #[error("space/mesh mismatch: {0}")]
    SpaceMismatch(String),
    #[error("inconsistent interface orientation: {0}")]
    OrientationError(String),
    #[error("non-positive parameter {name} = {value}")]
    NonPositiveParam { name: &'static str, value: f64 },
    #[error("matrix is numerically singular (pivot {pivot:.3e} at column {col})")]
    Singular { col: usize, pivot: f64 },
    #[error("singular norm block: {0}")]
    SingularBlock(String),
    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("missing history for time step {0}")]
    MissingHistory(usize),
    #[error("missing initial data: {0}")]
    MissingInitialData(&'static str),
    #[error("state history inconsistent: {0}")]
    HistoryMismatch(String),
    #[error("unknown manufactured case `{0}`")]
    UnknownCase(String),
    #[error("missing config key `{0}`")]
    MissingKey(String),
    #[error("bad value for `{name}` on line {line}: {reason}")]
    BadValue {
        name: String,
        line: usize,
        reason: String,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
