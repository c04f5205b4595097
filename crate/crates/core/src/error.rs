use std::path::PathBuf;

use crate::graph::EdgeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("edge {0} is a self-loop")]
    SelfLoop(EdgeId),
    #[error("edge {0} has an endpoint outside the vertex range")]
    VertexOutOfRange(EdgeId),
    #[error("a graph needs at least one vertex")]
    EmptyGraph,

    #[error("edge set is not a spanning tree of the graph")]
    NotASpanningTree,
    #[error("edge {0} is already in the tree")]
    EdgeInTree(EdgeId),
    #[error("edge {edge} is not in tree {tree}")]
    EdgeNotInTree { edge: EdgeId, tree: usize },
    #[error("factorization is not valid for this graph: {0}")]
    InvalidFactorization(String),
    #[error("swapping edges {e} and {f} does not give two spanning trees")]
    InvalidSwap { e: EdgeId, f: EdgeId },
    #[error("vertex {0} does not have degree three")]
    NotDegreeThree(usize),

    #[error("reduction case is not present in the graph: {0}")]
    CaseNotPresent(String),
    #[error("input factorization has imbalance {0} > 5")]
    ImbalancedInput(u64),
    #[error("graph is not a double tree: {0}")]
    NotADoubleTree(String),
    #[error("graph is not a {k}-multiple tree: {reason}")]
    NotKMultipleTree { k: usize, reason: String },
    #[error("kernel with {kernel_edges} edges stuck at imbalance {imbalance}")]
    BoundNotCertified {
        kernel_edges: usize,
        imbalance: u64,
        persisted: Option<PathBuf>,
    },
    #[error("halves do not form two {0}-factorizations partitioning the graph")]
    InvalidHalves(usize),
    #[error("first-tree extraction did not settle within {cap} iterations")]
    IterationCapExceeded {
        cap: usize,
        persisted: Option<PathBuf>,
    },
    #[error("instance too large for exhaustive search ({edges} edges, cap {cap})")]
    TooLarge { edges: usize, cap: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Research events: bounds guaranteed by theory that the implementation did not reach.
    pub fn is_research_event(&self) -> bool {
        matches!(
            self,
            Error::BoundNotCertified { .. } | Error::IterationCapExceeded { .. }
        )
    }

    /// Short stable tag used in CSV failure rows.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::SelfLoop(_) => "SelfLoop",
            Error::VertexOutOfRange(_) => "VertexOutOfRange",
            Error::EmptyGraph => "EmptyGraph",
            Error::NotASpanningTree => "NotASpanningTree",
            Error::EdgeInTree(_) => "EdgeInTree",
            Error::EdgeNotInTree { .. } => "EdgeNotInTree",
            Error::InvalidFactorization(_) => "InvalidFactorization",
            Error::InvalidSwap { .. } => "InvalidSwap",
            Error::NotDegreeThree(_) => "NotDegreeThree",
            Error::CaseNotPresent(_) => "CaseNotPresent",
            Error::ImbalancedInput(_) => "ImbalancedInput",
            Error::NotADoubleTree(_) => "NotADoubleTree",
            Error::NotKMultipleTree { .. } => "NotKMultipleTree",
            Error::BoundNotCertified { .. } => "BoundNotCertified",
            Error::InvalidHalves(_) => "InvalidHalves",
            Error::IterationCapExceeded { .. } => "IterationCapExceeded",
            Error::TooLarge { .. } => "TooLarge",
            Error::Parse { .. } => "Parse",
            Error::Io(_) => "Io",
        }
    }
}
