use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown algebra `{0}` (known: sl2, sl3, sl(2|1))")]
    UnknownAlgebra(String),
    #[error("structure table failed validation: {0}")]
    ValidationFailure(String),
    #[error("{0:?} is not a root")]
    NotARoot(Vec<i64>),
    #[error("weight {0:?} lies outside the truncation window")]
    WindowExceeded(Vec<i64>),
    #[error("vector does not have imaginary weight: drop {0:?}")]
    NotImaginaryWeight(Vec<i64>),
    #[error("weight is not certified generic critical: {0}")]
    GenericityUnverified(String),
    #[error("weight mismatch: {0:?} vs {1:?}")]
    WeightMismatch(Vec<i64>, Vec<i64>),
    #[error("deformation direction is degenerate at nu = {0:?}")]
    DegenerateDirection(Vec<i64>),
    #[error("linear system has no solution: {0}")]
    NoSolution(String),
    #[error("linear system has no unique solution: {0}")]
    NonUniqueSolution(String),
    #[error("{0} is not a loop element")]
    NotLoopElement(String),
    #[error("inconsistent coefficient: {0}")]
    InconsistentCoefficient(String),
    #[error("series precision exhausted (cap {0})")]
    PrecisionExhausted(usize),
    #[error("golden file missing: {0}")]
    MissingGolden(String),
}

pub type Result<T> = std::result::Result<T, Error>;
