use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: String, value: f64 },
    #[error("invalid dimension {0}")]
    Dimension(usize),
    #[error("degenerate domain: {0}")]
    Degenerate(String),
    #[error("polygon is not simple: edges {edge_a} and {edge_b} intersect")]
    NotSimple { edge_a: usize, edge_b: usize },
    #[error("polygon vertices must be listed counterclockwise")]
    Clockwise,
    #[error("cannot parse domain: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("k must be at least 1")]
    ZeroIndex,
    #[error("operator order l must be at least 1")]
    ZeroOrder,
    #[error("dimension n must be at least 2, got {0}")]
    Dimension(usize),
    #[error("exponent {name} = {value} outside the admissible range {range}")]
    Exponent { name: &'static str, value: f64, range: String },
    #[error("family {family} does not apply to the {operator} operator")]
    OperatorMismatch { family: &'static str, operator: &'static str },
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("family {0} needs an exponent")]
    MissingExponent(&'static str),
    #[error("unknown bound family {0:?}")]
    UnknownFamily(String),
    #[error("{0}")]
    Unavailable(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("requested {k} eigenvalues of a {dim}-dimensional operator")]
    TooMany { k: usize, dim: usize },
    #[error("Lanczos did not converge: {locked} of {wanted} eigenvalues locked after {restarts} restarts (last residual {residual:.3e})")]
    NoConvergence { locked: usize, wanted: usize, restarts: usize, residual: f64 },
    #[error("matrix is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("root finder failed to converge for {0}")]
    RootFinding(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("grid too coarse: {available} unknowns for k = {k}")]
    GridTooCoarse { available: usize, k: usize },
    #[error("k = {k} exceeds spectrum length {len}")]
    IndexOutOfRange { k: usize, len: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LemmaError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("no moment-matching parameter s in bracket: {0}")]
    NoMatchingShift(String),
    #[error("k = {k} exceeds the truncation budget (max {max})")]
    TooManyModes { k: usize, max: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Lemma(#[from] LemmaError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Usage(String),
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
}
