//! Finite combinatorics of trees of graphs: multigraph surgery, twin-graph
//! decomposition, Whitehead graphs, connecting systems and the expansion
//! engine for their finite approximations.

pub mod exec;
pub mod graph;
pub mod jsj;
pub mod rcs;
pub mod twin;
pub mod vsystem;
pub mod words;

pub use exec::Execution;

/// Version tag carried by every JSON document the tools read or write.
pub const SCHEMA: &str = "tog/1";
