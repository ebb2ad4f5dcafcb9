use thiserror::Error;

/// Errors raised by operator construction, state factories and entropy evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("factor dimensions {dims:?} do not multiply to matrix order {order}")]
    DimsMismatch { dims: Vec<usize>, order: usize },

    #[error("matrix is not Hermitian (max entrywise asymmetry {max_asymmetry:e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("density matrix trace is {trace}, expected 1")]
    Trace { trace: f64 },

    #[error("invalid bipartite cut: {0}")]
    InvalidCut(String),

    #[error("state leaks weight {leaked:e} outside the support of the reference operator")]
    SupportViolation { leaked: f64 },

    #[error("state is not in the symmetric subspace (projection residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("parameter x = {x} outside family domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed state file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
