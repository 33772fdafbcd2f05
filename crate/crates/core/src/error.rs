//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("p must be an odd prime, got {0}")]
    BadPrime(u64),
    #[error("no irreducible modulus of degree {f} found over F_{p}")]
    NoModulus { p: u64, f: usize },
    #[error("precision p^N does not fit in 64 bits (p={p}, N={n})")]
    PrecisionOverflow { p: u64, n: u32 },
    #[error("leading coefficient is not a unit")]
    NotAUnit,
    #[error("series is not unit-shaped: {0}")]
    NotUnitShaped(String),
    #[error("constant term is not congruent to 1: {0}")]
    LogDomain(String),
    #[error("window does not contain exponent {0:?}")]
    WindowTooSmall([i64; 2]),
    #[error("value is not divisible by p^{0} (precision fault)")]
    NonIntegral(u32),
    #[error("cannot decompose series as X^c * unit * (1 + p*tail)")]
    SDecomposition,
    #[error("zero element where a nonzero one is required")]
    ZeroElement,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("element is not invertible in the integral model")]
    NotInvertible,
    #[error("{0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("failed to stabilize within the retry schedule ({0} plans tried)")]
    Unstable(usize),
    #[error("p-th root valuation condition failed at step {step}: level {level} <= {bound}")]
    RootCondition { step: u32, level: i64, bound: i64 },
    #[error("decomposition did not terminate within the level budget")]
    DecompositionBudget,
    #[error("exhaustive dual search failed for the given index")]
    DualSearchFailed,
}

pub type Result<T> = std::result::Result<T, CoreError>;
