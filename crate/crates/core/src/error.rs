use thiserror::Error;

/// Errors from geometry construction.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("resolution too coarse: {0}")]
    TooCoarse(String),
    #[error("grid interval {interval} crosses the boundary more than once")]
    MultipleCrossings { interval: String },
    #[error("root finder failed on interval {interval}: {detail}")]
    RootFinding { interval: String, detail: String },
    #[error("boundary not strictly inside the box: {0}")]
    BoundaryTouchesBox(String),
    #[error("{side} grid points are not connected through uncut intervals ({components} components)")]
    Disconnected { side: String, components: usize },
    #[error("interior point {point} has every stencil arm cut")]
    AllArmsCut { point: usize },
}

/// Errors from field operations (structural misuse, not numerics).
#[derive(Debug, Error)]
pub enum FieldError {
    #[error("side mismatch: expected {expected}, got {got}")]
    SideMismatch { expected: String, got: String },
    #[error("boundary function indexed by {got}, expected {expected}")]
    IndexingMismatch { expected: String, got: String },
    #[error("missing extension value for cut interval {0}")]
    MissingExtension(usize),
}

/// Errors from the iterative and direct solvers.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("{method} did not converge: {iterations} iterations, relative residual {residual:.3e}")]
    NoConvergence {
        method: String,
        iterations: usize,
        residual: f64,
    },
    #[error("singular pivot in row {row} of the {method} factorization")]
    SingularPivot { method: String, row: usize },
}

/// Errors from the boundary-operator layer.
#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("input not single-valued at multiple cut point {group}: spread {spread:.3e}")]
    NotSharp { group: usize, spread: f64 },
    #[error("Gram matrix is not positive definite (Cholesky failed)")]
    GramNotSpd,
}

/// Errors from configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("boundary DOF count {count} exceeds dense cap {cap}")]
    DenseCapExceeded { count: usize, cap: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
