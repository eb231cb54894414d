use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tridiagonal eigen-solve failed for {nodes} nodes (alpha={alpha}, beta={beta}): {detail}")]
    EigenSolve {
        nodes: usize,
        alpha: f64,
        beta: f64,
        detail: String,
    },

    #[error("gram matrix numerically singular at basis index {index} (degree {degree}, norm {norm:e}); reduce the degree")]
    SingularGram { index: usize, degree: usize, norm: f64 },

    #[error("epsilon too coarse for degree {n}; decrease delta (delta={delta}, {detail})")]
    Infeasible { n: usize, delta: f64, detail: String },

    #[error("cubature search exhausted after {attempts} attempts for degree {n} (last delta={last_delta}, residual={residual:e}, {detail})")]
    RetriesExhausted {
        n: usize,
        attempts: usize,
        last_delta: f64,
        residual: f64,
        detail: String,
    },

    #[error("integration rule exact to degree {available} cannot integrate degree {required}")]
    InsufficientDegree { required: usize, available: usize },

    #[error("unknown knot {index} at level {level}")]
    UnknownKnot { level: usize, index: usize },

    #[error("coefficient set does not belong to this frame: {0}")]
    FrameMismatch(String),

    #[error("truncation precondition violated: 2^(J-2) = {cap} must exceed degree {degree}")]
    Truncation { cap: usize, degree: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
