use thiserror::Error;

/// Failure while evaluating a field at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("point {point:?} lies outside the domain box")]
    OutsideDomain { point: Vec<f64> },
    #[error("non-real intermediate in `{op}` (argument {arg})")]
    NonReal { op: &'static str, arg: f64 },
    #[error("value is +inf or NaN")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0}")]
    Oracle(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("variable `{name}` at byte {offset} exceeds dimension {dim}")]
    UnknownVariable { name: String, offset: usize, dim: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("non-finite finite-difference entry at {point:?}")]
    NonFiniteDerivative { point: Vec<f64> },
    #[error("field `{0}` is not tagged C2; eigenvalue criteria need a C2 field")]
    NotSmooth(String),
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("Hermitian embedding eigenvalues could not be paired (gap {gap:e})")]
    Pairing { gap: f64 },
    #[error("envelope LP is unbounded: the center is not enclosed by the samples")]
    Unbounded,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("point {point:?} is not a member of the set")]
    NotMember { point: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
