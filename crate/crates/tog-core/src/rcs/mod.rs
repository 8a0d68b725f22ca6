//! Graphical connecting systems `(Γ, a, A)`, the site scheduler and the
//! engine that expands them into finite partial unions.

mod expand;
mod project;
mod schedule;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{components, EdgeId, Multigraph, OrientedEdge, UnionFind, VertexId};
use crate::vsystem::{ConnectingVSystem, VSystemJson, Violation, ViolationCode};

pub use expand::{
    ArcKey, ExpandConfig, Link, LinkKind, Node, NodeId, PartialUnion, Realization, Site, SiteKind, VertexKey,
};
pub use project::{analyze_point, CellMap, Image, PairTrace, PointAnalysis, PointTrace};
pub use schedule::{schedule_arc, schedule_sites, Schedule, ScheduledSite};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RcsError {
    #[error("connecting system is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("no component with index {0}")]
    BadComponent(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("oriented edge {0:?} has no E-connection partner")]
    EmptyPartnerSet(OrientedEdge),
    #[error("site is not in the frontier")]
    StaleSite,
    #[error("copy cap of {cap} exceeded")]
    CapExceeded { cap: usize },
    #[error("resolution must be at least 1")]
    ZeroResolution,
    #[error("trees are not nested: {0}")]
    IncompatibleTrees(String),
    #[error("point {0} cannot be tracked")]
    Untracked(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicalConnectingSystem {
    pub vsys: ConnectingVSystem,
    pub econnections: BTreeSet<(OrientedEdge, OrientedEdge)>,
    components: Vec<Vec<VertexId>>,
    component_of: BTreeMap<VertexId, usize>,
}

impl GraphicalConnectingSystem {
    pub fn new(vsys: ConnectingVSystem, econnections: BTreeSet<(OrientedEdge, OrientedEdge)>) -> Self {
        let components = components(&vsys.graph);
        let component_of = components.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |&v| (v, j))).collect();
        GraphicalConnectingSystem { vsys, econnections, components, component_of }
    }

    /// `a = id`, `α = id` and `A` the diagonal `{(ε, ε)}`.
    pub fn reflection(graph: Multigraph) -> Self {
        let econnections = graph.oriented_edges().map(|o| (o, o)).collect();
        Self::new(ConnectingVSystem::reflection(graph), econnections)
    }

    pub fn graph(&self) -> &Multigraph {
        &self.vsys.graph
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Vertex sets of the components, ordered by least vertex id.
    pub fn components(&self) -> &[Vec<VertexId>] {
        &self.components
    }

    pub fn component_of_vertex(&self, v: VertexId) -> Option<usize> {
        self.component_of.get(&v).copied()
    }

    pub fn component_of_edge(&self, e: EdgeId) -> Option<usize> {
        self.graph().ends(e).and_then(|[t, _]| self.component_of_vertex(t))
    }

    pub fn component_graph(&self, j: usize) -> Option<Multigraph> {
        let vs: BTreeSet<VertexId> = self.components.get(j)?.iter().copied().collect();
        Some(self.graph().induced(&vs))
    }

    /// `O_ε = {ε′ : (ε, ε′) ∈ A}` in sorted order.
    pub fn partners(&self, oe: OrientedEdge) -> Vec<OrientedEdge> {
        self.econnections.range((oe, min_oe())..).take_while(|(a, _)| *a == oe).map(|&(_, b)| b).collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        use ViolationCode::*;
        let g = self.graph();
        let mut out = self.vsys.validate();
        if g.vertex_count() == 0 {
            out.push(Violation::new(EmptyComponent, "the graph has no components"));
        }
        for (j, c) in self.components.iter().enumerate() {
            let vs: BTreeSet<VertexId> = c.iter().copied().collect();
            if g.induced(&vs).edge_count() == 0 {
                out.push(Violation::new(EmptyComponent, format!("component {j} has no edges")));
            }
        }
        for &(x, y) in &self.econnections {
            for o in [x, y] {
                if !g.has_edge(o.edge) {
                    out.push(Violation::new(UnknownEdge, format!("E-connection mentions unknown edge {}", o.edge)));
                }
            }
            if !self.econnections.contains(&(y, x)) {
                out.push(Violation::new(NotSwapClosed, format!("{x:?},{y:?} present without its swap")));
            }
            if !self.econnections.contains(&(x.bar(), y.bar())) {
                out.push(Violation::new(NotBarClosed, format!("{x:?},{y:?} present without its bar")));
            }
        }
        let covered: BTreeSet<OrientedEdge> = self.econnections.iter().flat_map(|&(x, y)| [x, y]).collect();
        for o in g.oriented_edges() {
            if !covered.contains(&o) {
                out.push(Violation::new(Uncovered, format!("oriented edge {o:?} is in no E-connection")));
            }
        }
        if !self.transitive() {
            out.push(Violation::new(NotTransitive, "components are not linked by a or A"));
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn transitive(&self) -> bool {
        let k = self.components.len();
        let mut uf = UnionFind::new(k);
        for (&v, &w) in &self.vsys.a {
            if let (Some(i), Some(j)) = (self.component_of_vertex(v), self.component_of_vertex(w)) {
                uf.union(i, j);
            }
        }
        for &(x, y) in &self.econnections {
            if let (Some(i), Some(j)) = (self.component_of_edge(x.edge), self.component_of_edge(y.edge)) {
                uf.union(i, j);
            }
        }
        (0..k).all(|j| uf.find(j) == uf.find(0))
    }
}

fn min_oe() -> OrientedEdge {
    OrientedEdge::forward(0)
}

/// Closure of a set of pairs under swap and bar.
pub fn close_econnections(
    pairs: impl IntoIterator<Item = (OrientedEdge, OrientedEdge)>,
) -> BTreeSet<(OrientedEdge, OrientedEdge)> {
    let mut out = BTreeSet::new();
    for (x, y) in pairs {
        out.insert((x, y));
        out.insert((y, x));
        out.insert((x.bar(), y.bar()));
        out.insert((y.bar(), x.bar()));
    }
    out
}

/// Wire form: the V-system plus the list of E-connections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcsJson {
    pub schema: String,
    pub vsystem: VSystemJson,
    pub econnections: Vec<[OrientedEdge; 2]>,
}

impl From<&GraphicalConnectingSystem> for RcsJson {
    fn from(r: &GraphicalConnectingSystem) -> Self {
        RcsJson {
            schema: crate::SCHEMA.to_string(),
            vsystem: VSystemJson::from(&r.vsys),
            econnections: r.econnections.iter().map(|&(x, y)| [x, y]).collect(),
        }
    }
}

impl RcsJson {
    pub fn into_system(self) -> Result<GraphicalConnectingSystem, Vec<Violation>> {
        let vsys = self.vsystem.into_system()?;
        Ok(GraphicalConnectingSystem::new(vsys, self.econnections.into_iter().map(|[x, y]| (x, y)).collect()))
    }
}
