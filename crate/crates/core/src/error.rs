use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed edge-list, partition or config text.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("node {node} out of range for graph with {n} nodes")]
    InvalidNode { node: usize, n: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("node {0} has degree zero")]
    ZeroDegree(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix dimension {n} exceeds dense solver cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("{segments} segments available, {c} clusters requested")]
    InsufficientSegments { segments: usize, c: usize },

    #[error("infeasible sweep point: gap {gap} gives b_out = {b_out}")]
    InfeasibleGap { gap: f64, b_out: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
