use thiserror::Error;

/// Errors raised while validating, solving or constructing chains.
#[derive(Debug, Error)]
pub enum Error {
    #[error("transition matrix must be square with at least 2 states (got {rows} rows)")]
    Shape { rows: usize },

    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("entry ({row}, {col}) = {value} is negative")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, not 1")]
    RowSumError { row: usize, sum: f64 },

    #[error("chain is not irreducible")]
    Reducible,

    #[error("power iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("linear system is singular")]
    Singular,

    #[error("target set is empty")]
    EmptyTarget,

    #[error("state {state} out of range for a chain with {n} states")]
    StateOutOfRange { state: usize, n: usize },

    #[error("unknown state label {0:?}")]
    UnknownLabel(String),

    #[error("{n} states exceeds the cap of {cap} for this operation")]
    StateCountCap { n: usize, cap: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("entry P[{row}][{col}] = {value} is outside [0, 1]; increase N")]
    EntryOutOfRange { row: String, col: String, value: f64 },

    #[error("step spec violation: {0}")]
    SpecViolation(String),

    #[error("alpha = {alpha} lies in an error interval; no window index applies")]
    WindowViolation { alpha: f64 },

    #[error("function increases between grid points {left} and {right}")]
    NotDecreasing { left: f64, right: f64 },

    #[error("f(1/2) = {value}, expected 1")]
    NormalizationError { value: f64 },

    #[error("sets overlap; the cycle decomposition needs disjoint A and C")]
    SetsOverlap,

    #[error("step cap exceeded at trajectory {trajectory}")]
    StepCapExceeded { trajectory: u64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
