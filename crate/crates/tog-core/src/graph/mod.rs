//! Multigraphs with loops and parallel edges, and the point-level surgery
//! calculus on their realizations: blow-up, blow-down, connected sum and the
//! components of a complement.

mod blowup;
mod canon;
mod connectivity;
mod locus;
mod multigraph;

use thiserror::Error;

pub use blowup::{
    blow_down, blow_down_to, blow_up, complement_components, components, connected_sum, interior_splice, self_sum,
    ArcOrigin, BlowUpResult, Branch, ComplementReport, ConnectedSum, DivisorPoint, LinkMap, SumOrigin,
};
pub use canon::{canonical_form, homeomorphic, isomorphic, smooth, CanonicalForm};
pub use connectivity::{is_connected, is_two_connected, low_link, LowLink};
pub use locus::{PointLocus, Pos};
pub use multigraph::{Dir, EdgeEnd, EdgeId, Multigraph, OrientedEdge, Side, VertexId};

pub(crate) use multigraph::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge id {0} used twice")]
    DuplicateEdge(EdgeId),
    #[error("locus {0} listed twice")]
    DuplicateLocus(String),
    #[error("position {pos} on edge {edge} is not strictly between 0 and 1")]
    PositionOutOfRange { edge: EdgeId, pos: String },
    #[error("degrees do not match: {left} vs {right}, link map has {map} pairs")]
    DegreeMismatch { left: usize, right: usize, map: usize },
    #[error("link map is not a bijection between the two divisors")]
    NotBijective,
    #[error("inconsistent blow-up data: {0}")]
    InconsistentDivisor(String),
}

/// Graphviz rendering. `vertex_attrs` and `edge_attrs` add extra attributes
/// (already formatted as `key="value"` pairs).
pub fn to_dot(
    g: &Multigraph,
    name: &str,
    vertex_attrs: impl Fn(VertexId) -> Vec<(String, String)>,
    edge_attrs: impl Fn(EdgeId) -> Vec<(String, String)>,
) -> String {
    use std::fmt::Write;
    let fmt_attrs = |attrs: Vec<(String, String)>| -> String {
        if attrs.is_empty() {
            return String::new();
        }
        let body: Vec<String> = attrs
            .into_iter()
            .map(|(k, v)| format!("{k}=\"{}\"", v.replace('\\', "\\\\").replace('"', "\\\"")))
            .collect();
        format!(" [{}]", body.join(", "))
    };
    let mut s = String::new();
    let _ = writeln!(s, "graph \"{name}\" {{");
    for v in g.vertices() {
        let _ = writeln!(s, "  v{v}{};", fmt_attrs(vertex_attrs(v)));
    }
    for (e, [a, b]) in g.edges() {
        let mut attrs = vec![("id".to_string(), e.to_string())];
        attrs.extend(edge_attrs(e));
        let _ = writeln!(s, "  v{a} -- v{b}{};", fmt_attrs(attrs));
    }
    s.push_str("}\n");
    s
}
