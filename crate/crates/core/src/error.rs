use thiserror::Error;

/// Errors raised anywhere in the agglomeration / discretization pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cell {cell}: {reason}")]
    InvalidCell { cell: usize, reason: String },

    #[error("cell {cell} references vertex {index}, but the mesh has {count} vertices")]
    DanglingIndex { cell: usize, index: usize, count: usize },

    #[error("edge ({0}, {1}) is shared by more than two cells")]
    NonManifoldEdge(usize, usize),

    #[error("constrained edge ({0}, {1}) is not an edge of the mesh")]
    UnknownConstrainedEdge(usize, usize),

    #[error("cell {0} is degenerate (zero area)")]
    DegenerateCell(usize),

    #[error("cannot merge cells: the set is not edge-connected")]
    DisconnectedMerge,

    #[error("cannot merge cells: the union is not a simple polygon ({0})")]
    InvalidMerge(&'static str),

    #[error("triangulation failed: {0}")]
    Triangulation(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("singular local Gram matrix on cell {cell}")]
    SingularProjector { cell: usize },

    #[error("conductivity tensor is not symmetric positive definite")]
    NotSpd,

    #[error("matrix is not positive definite (factorization broke down: {0})")]
    Indefinite(String),

    #[error("no Dirichlet boundary: the problem is singular")]
    MissingBoundary,

    #[error("fractures {0} and {1} are coplanar and overlap")]
    CoplanarFractures(usize, usize),

    #[error("trace {trace} leaves fracture {fracture}")]
    TraceOutsideFracture { fracture: usize, trace: usize },

    #[error("trace {trace}: ambiguous node matching ({message})")]
    NodeMatching { trace: usize, message: String },

    #[error("invalid network: {0}")]
    Network(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularProjector { .. }
            | Error::Indefinite(_)
            | Error::Triangulation(_)
            | Error::NodeMatching { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn cell(cell: usize, reason: impl Into<String>) -> Self {
        Error::InvalidCell { cell, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
