//! Error types shared across the crate.

use thiserror::Error;

/// Malformed input: files, instance shapes, out-of-range ids, bad flags.
/// The CLI maps these to exit code 2.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot parse rational value: {0:?}")]
    BadRational(String),
    #[error("malformed instance: {0}")]
    BadInstance(String),
    #[error("malformed allocation: {0}")]
    BadAllocation(String),
    #[error("item id {id} out of range [1, {m}]")]
    ItemOutOfRange { id: usize, m: usize },
    #[error("malformed JSON: {0}")]
    BadJson(String),
    #[error("invalid generator parameters: {0}")]
    BadGenParams(String),
}

/// Oracle-scope errors: the exact search refuses work beyond its cap.
#[derive(Debug, Error)]
pub enum OracleError {
    #[error("bundle count must be at least 1")]
    ZeroBundles,
    #[error("valuations must be non-negative")]
    NegativeValue,
    #[error("instance has {m} items, above the oracle cap of {cap}")]
    CapExceeded { m: usize, cap: usize },
}

/// Solver-level failures. `FillExhausted` and `InvariantBreach` contradict
/// the guarantees the algorithms are proved to satisfy, so the CLI maps
/// them to exit code 1 and attaches the dumped state for replay.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("instances with more than 3 agent types are unsupported (got {0})")]
    UnsupportedTypes(usize),
    #[error("bag filling exhausted its pool: {context}")]
    FillExhausted { context: String, dump: String },
    #[error("internal invariant breached in {context}: {detail}")]
    InvariantBreach {
        context: String,
        detail: String,
        dump: String,
    },
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
