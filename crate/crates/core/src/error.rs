use thiserror::Error;

/// Errors surfaced by the library. Semidecisions that run out of fuel do not
/// error; they answer `Unknown` and report the fuel spent.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{m} does not divide {n}")]
    Divisibility { m: u64, n: u64 },
    #[error("not a projection: {0}")]
    NotProjection(String),
    #[error("outside the rounding basin: certified residual upper bound {0} is not below 1/4")]
    OutOfBasin(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("staging error: {0}")]
    Staging(String),
    #[error("Cauchy condition fails at precision {k}: {detail}")]
    Cauchy { k: u32, detail: String },
    #[error("fuel exhausted after {fuel} steps: {detail}")]
    FuelExhausted { fuel: u64, detail: String },
    #[error("supernatural numbers look different: no match at stage {stage} up to bound {bound}")]
    SupernaturalMismatchSuspected { stage: usize, bound: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
