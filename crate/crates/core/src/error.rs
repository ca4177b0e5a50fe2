//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// MacWilliams-style duality only holds over prime fields, so `dual` and
    /// the merit routines refuse composite bases outright.
    #[error("dual computation requires prime base, got b = {b}")]
    CompositeBase { b: u32 },

    #[error("degenerate basis: rank {rank} < m = {m}")]
    DegenerateBasis { rank: usize, m: usize },

    #[error(
        "dual net has b^{exponent} = 2^{log2_size:.1} elements, refusing to enumerate past 2^24"
    )]
    DualTooLarge { exponent: usize, log2_size: f64 },

    #[error(
        "group table needs b^{exponent} = 2^{log2_size:.1} entries (~{mib} MiB), guard is 2^24"
    )]
    GroupTooLarge {
        exponent: usize,
        log2_size: f64,
        mib: u64,
    },

    #[error("span enumeration of b^{exponent} points exceeds the 2^24 guard")]
    SpanTooLarge { exponent: usize },

    #[error("accumulation failure: squared merit {radicand:e} is below -1e-6")]
    AccumulationFailure { radicand: f64 },

    #[error("derivative bounds for {id} are unavailable: not differentiable")]
    NotDifferentiable { id: String },

    #[error("coordinate {axis} = {value} outside [0,1)")]
    OutOfDomain { axis: usize, value: f64 },

    #[error("integrand returned a non-finite value at {point:?}")]
    NonFiniteEvaluation { point: Vec<f64> },

    #[error("correlation undefined: input has zero variance")]
    ZeroVariance,

    #[error("rank-preserving move not found after {0} retries")]
    RetriesExhausted(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Parse error helper carrying a 1-based line number.
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
