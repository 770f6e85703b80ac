use thiserror::Error;

/// Errors produced by the numerical layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid fractional order {0}")]
    InvalidOrder(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid multi-term specification: {0}")]
    InvalidSpec(String),

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("elliptic coefficients violate ellipticity: {0}")]
    Coefficient(String),

    #[error("requested {requested} modes but only {available} are available")]
    TooManyModes { requested: usize, available: usize },

    #[error("invalid subdomain: {0}")]
    Subdomain(String),

    #[error("degenerate search direction (zero curvature along d)")]
    DegenerateDirection,

    #[error("iteration diverged at step {iteration}")]
    Diverged {
        iteration: usize,
        residual_history: Vec<f64>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
