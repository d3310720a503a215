use thiserror::Error;

use crate::quiver::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: arrow endpoint `{vertex}` was never declared")]
    UndeclaredEndpoint { line: usize, vertex: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("malformed ZQ vertex `{0}` (expected `n:base`)")]
    MalformedZVertex(String),

    #[error("the base scope of an infinite quiver must be a finite interval")]
    UnboundedScope,

    #[error("the operation needs a finite quiver")]
    NotFinite,

    #[error("quiver has an oriented cycle through {}", display_cycle(.0))]
    Cyclic(Vec<VertexId>),

    #[error("quiver is not connected within the scope ({0} components)")]
    Disconnected(usize),

    #[error("expansion budget exhausted after {expansions} expansions while resolving orbit `{orbit}`")]
    BudgetExhausted { orbit: VertexId, expansions: usize },

    #[error("window too small: the reachable region touches slice {top} without meeting the target orbit")]
    WindowTooSmall { top: i64 },

    #[error("window slices must start at or below the source slice {source_slice}")]
    WindowBelowSource { source_slice: i64 },

    #[error("selection is not a valid section: {0}")]
    InvalidSection(String),
}

fn display_cycle(cycle: &[VertexId]) -> String {
    cycle.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> ")
}
