use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("map {index} is not a contraction (ratio {ratio})")]
    NonContracting { index: usize, ratio: f64 },

    #[error("map {index} sends the support interval outside itself")]
    SupportViolation { index: usize },

    #[error("all fixed points coincide; the attractor is a single point")]
    DegenerateAttractor,

    #[error("bad weights: {0}")]
    BadWeights(String),

    #[error("cut-set exceeds the word budget of {budget}")]
    ExplosionGuard { budget: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("the IFS ratios are not all equal")]
    NotHomogeneous,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate range [{a}, {b}]: need 1 < a < b")]
    DegenerateRange { a: f64, b: f64 },

    #[error("polynomial is not in F(k={k}, N={n}): {reason}")]
    NotInFamily { k: usize, n: u32, reason: String },

    #[error("q = {q} is too small; need q > {min}")]
    QTooSmall { q: f64, min: f64 },

    #[error("no derivative oracle of order {order}")]
    OracleMissing { order: usize },

    #[error("x is known to {have} fractional bits but {need} are required")]
    InsufficientInputDigits { have: u64, need: u64 },

    #[error("x must be greater than one")]
    NotGreaterThanOne,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
