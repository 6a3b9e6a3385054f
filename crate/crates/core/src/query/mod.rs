//! Query structure: triple patterns, basic graph patterns and join edges.

mod model;
mod parser;

pub use model::{
    join_edges, BasicGraphPattern, JoinEdge, JoinKind, Position, Slot, TriplePattern,
};
pub use parser::{parse_query, QueryError};
