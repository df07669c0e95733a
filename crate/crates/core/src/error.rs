use thiserror::Error;

/// Errors raised by the clustering library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HcError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("invalid weight {weight} on edge ({u}, {v}): weights must be finite and nonnegative")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    #[error("tree leaves do not match the vertex set 0..{n}")]
    LeafMismatch { n: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("constraints are infeasible on cluster {cluster:?}; use the regularized objective (rhsc) instead")]
    Infeasible { cluster: Vec<usize> },

    #[error("instance has {n} vertices, above the exhaustive limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("hyperedge weights ({w_ab_c}, {w_ac_b}, {w_bc_a}) violate the triangle inequality; the gadget would need a negative edge")]
    TriangleInequality {
        w_ab_c: f64,
        w_ac_b: f64,
        w_bc_a: f64,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, HcError>;

impl From<std::io::Error> for HcError {
    fn from(e: std::io::Error) -> Self {
        HcError::Io(e.to_string())
    }
}
