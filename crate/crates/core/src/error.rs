use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("generating vector component z[{index}] = {value} reduces to 0 mod n = {n}")]
    GeneratingVectorComponent { index: usize, value: u64, n: u64 },

    #[error("generating vector source {source_name}: {msg}")]
    GeneratingVectorFile { source_name: String, msg: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("duplicate cubature nodes: rows {first} and {second} are bitwise identical")]
    DuplicateNodes { first: usize, second: usize },

    #[error("smoothness order alpha = {alpha} is outside the supported range 1..=4")]
    UnsupportedAlpha { alpha: u32 },

    #[error("Bernoulli polynomial degree {degree} is outside the tabulated range 0..=8")]
    UnsupportedBernoulliDegree { degree: u32 },

    #[error("invalid coordinate weights: {0}")]
    InvalidWeights(String),

    #[error("Gram matrix is not numerically positive definite; nodes may be (nearly) coincident")]
    NotPositiveDefinite,

    #[error("worst-case error squared = {value:e} is below -1e-12; inputs are inconsistent")]
    NegativeWceSquare { value: f64 },

    #[error("rate fit needs at least {needed} usable points, got {got}")]
    InsufficientRateData { needed: usize, got: usize },

    #[error("{op} is defined for n >= {min}, got n = {n}")]
    DomainTooSmall { op: &'static str, min: u64, n: u64 },

    #[error("coefficient parameter y[{index}] = {value} lies outside [-1/2, 1/2]")]
    ParameterOutOfRange { index: usize, value: f64 },

    #[error("diffusion coefficient a = {value:e} at ({x}, {y}) violates ellipticity")]
    EllipticityViolation { value: f64, x: f64, y: f64 },

    #[error("linear solver breakdown: {0}")]
    SolverBreakdown(String),

    #[error("zeta(x) requires x > 1, got x = {0}")]
    ZetaDomain(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed dump file {path}: {reason}")]
    MalformedDump { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
