use thiserror::Error;

/// Errors raised by the measures and their building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |a - a^dagger| = {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("value {value} out of range: {what}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("pointer {pointer} assigned to more than one state")]
    PointerReuse { pointer: usize },
    #[error("pointer weights for state {state} sum to {found}, expected {expected}")]
    WeightMismatch { state: usize, expected: f64, found: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("simplex exceeded its pivot budget ({pivots} pivots)")]
    CycleDetected { pivots: usize },
    #[error("state {index} is not pure (purity {purity})")]
    NotPure { index: usize, purity: f64 },
    #[error("invalid measurement (residual {residual:e}): {reason}")]
    InvalidMeasurement { reason: String, residual: f64 },
    #[error("invalid POVM (residual {residual:e}): {reason}")]
    InvalidPovm { reason: String, residual: f64 },
    #[error("problem too large for brute force: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("coupling does not match the ensemble marginals (residual {residual:e})")]
    InfeasibleCoupling { residual: f64 },
    #[error("joint pair does not match the ensemble marginals (residual {residual:e})")]
    InfeasibleJointPair { residual: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
