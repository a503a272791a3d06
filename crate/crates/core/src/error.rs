use thiserror::Error;

/// Errors raised by the kernel, refinement, solver, and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    Asymmetric { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scalar kernels of K are not a prefix of those of G: {0}")]
    NotPrefix(String),

    #[error("dimension order violated: m = {m} < n = {n}")]
    DimOrder { n: usize, m: usize },

    #[error("basis functions are linearly dependent: {0}")]
    DependentBasis(String),

    #[error("precedence is undecidable in the symbolic measure class: {0}")]
    Undecidable(String),

    #[error("transformation map sequences differ")]
    MapMismatch,

    #[error("kernel family not supported here: {0}")]
    Unsupported(String),

    #[error("kernel is not finite-dimensional: {0}")]
    NotFiniteDimensional(String),

    #[error("insufficient points: need {needed} output constraints, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("duplicate points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("negative squared RKHS norm {0:e}")]
    NegativeNorm(f64),

    #[error("could not sample a strictly positive-definite matrix after {0} attempts")]
    DegenerateMatrix(usize),

    #[error("target function has (near) zero L2 norm")]
    DegenerateTarget,

    #[error("malformed CSV: {0}")]
    MalformedCsv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
