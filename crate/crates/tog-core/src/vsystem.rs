//! Connecting V-systems: a vertex involution `a` with link bijections
//! `α_v : Lk(v) → Lk(a(v))`, and the lines traced by the gluing successor.
//!
//! `α` is stored as one map on edge-ends. The compatibility law
//! `α_{a(v)} = α_v⁻¹` then says exactly that this map is an involution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::graph::{EdgeEnd, EdgeId, Multigraph, OrientedEdge, Side, UnionFind, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    LoopEdge,
    IsolatedVertex,
    UnknownVertex,
    NotInvolution,
    DegreeMismatch,
    AlphaMissing,
    AlphaWrongTarget,
    AlphaNotInverse,
    // graphical connecting systems
    EmptyComponent,
    DisconnectedComponent,
    ComponentMismatch,
    UnknownEdge,
    NotSwapClosed,
    NotBarClosed,
    Uncovered,
    NotTransitive,
    // input parsing
    MalformedInput,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub detail: String,
}

impl Violation {
    pub fn new(code: ViolationCode, detail: impl Into<String>) -> Self {
        Violation { code, detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.code, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectingVSystem {
    pub graph: Multigraph,
    pub a: BTreeMap<VertexId, VertexId>,
    pub alpha: BTreeMap<EdgeEnd, EdgeEnd>,
}

impl ConnectingVSystem {
    pub fn new(graph: Multigraph, a: BTreeMap<VertexId, VertexId>, alpha: BTreeMap<EdgeEnd, EdgeEnd>) -> Self {
        ConnectingVSystem { graph, a, alpha }
    }

    /// Standard system of the θ-graph with `k` edges: `a` swaps the two
    /// vertices and `α` sends each end of an edge to its other end.
    pub fn standard_theta(k: usize) -> Self {
        Self::standard_on(Multigraph::theta(k), 0, 1)
    }

    /// Standard system on a θ-graph whose two vertices are `u` and `v` and
    /// whose edges all run `u → v`.
    pub fn standard_on(graph: Multigraph, u: VertexId, v: VertexId) -> Self {
        let a = BTreeMap::from([(u, v), (v, u)]);
        let mut alpha = BTreeMap::new();
        for e in graph.edge_ids() {
            let (t, h) = (EdgeEnd::new(e, Side::Tail), EdgeEnd::new(e, Side::Head));
            alpha.insert(t, h);
            alpha.insert(h, t);
        }
        ConnectingVSystem { graph, a, alpha }
    }

    /// `a = id`, `α = id`.
    pub fn reflection(graph: Multigraph) -> Self {
        let a = graph.vertices().map(|v| (v, v)).collect();
        let alpha = graph.links().into_values().flatten().map(|p| (p, p)).collect();
        ConnectingVSystem { graph, a, alpha }
    }

    /// Disjoint union with `other`, whose ids are shifted past ours. Returns
    /// the vertex and edge offsets applied to `other`.
    pub fn disjoint_union(&self, other: &ConnectingVSystem) -> (ConnectingVSystem, VertexId, EdgeId) {
        let (graph, dv, de) = self.graph.disjoint_union(&other.graph);
        let mut a = self.a.clone();
        a.extend(other.a.iter().map(|(&v, &w)| (v + dv, w + dv)));
        let mut alpha = self.alpha.clone();
        let shift = |p: EdgeEnd| EdgeEnd::new(p.edge + de, p.side);
        alpha.extend(other.alpha.iter().map(|(&p, &q)| (shift(p), shift(q))));
        (ConnectingVSystem { graph, a, alpha }, dv, de)
    }

    pub fn involution(&self, v: VertexId) -> Option<VertexId> {
        self.a.get(&v).copied()
    }

    pub fn validate(&self) -> Vec<Violation> {
        use ViolationCode::*;
        let g = &self.graph;
        let mut out = Vec::new();
        for (e, [x, y]) in g.edges() {
            if x == y {
                out.push(Violation::new(LoopEdge, format!("edge {e} is a loop at {x}")));
            }
        }
        let links = g.links();
        for (&v, l) in &links {
            if l.is_empty() {
                out.push(Violation::new(IsolatedVertex, format!("vertex {v}")));
            }
            let Some(&w) = self.a.get(&v) else {
                out.push(Violation::new(UnknownVertex, format!("a is undefined at {v}")));
                continue;
            };
            if !g.has_vertex(w) {
                out.push(Violation::new(UnknownVertex, format!("a({v}) = {w} is not a vertex")));
                continue;
            }
            if self.a.get(&w) != Some(&v) {
                out.push(Violation::new(NotInvolution, format!("a(a({v})) != {v}")));
            }
            if links[&w].len() != l.len() {
                out.push(Violation::new(
                    DegreeMismatch,
                    format!("deg {v} = {} but deg a({v}) = {}", l.len(), links[&w].len()),
                ));
            }
            for &p in l {
                match self.alpha.get(&p) {
                    None => out.push(Violation::new(AlphaMissing, format!("alpha undefined at {p:?} (vertex {v})"))),
                    Some(&q) => {
                        if g.endpoint(q) != Some(w) {
                            out.push(Violation::new(
                                AlphaWrongTarget,
                                format!("alpha({p:?}) = {q:?} does not lie at a({v}) = {w}"),
                            ));
                        } else if self.alpha.get(&q) != Some(&p) {
                            out.push(Violation::new(AlphaNotInverse, format!("alpha(alpha({p:?})) != {p:?}")));
                        }
                    }
                }
            }
        }
        for v in self.a.keys() {
            if !g.has_vertex(*v) {
                out.push(Violation::new(UnknownVertex, format!("a is defined at non-vertex {v}")));
            }
        }
        for p in self.alpha.keys() {
            if g.endpoint(*p).is_none() {
                out.push(Violation::new(UnknownEdge, format!("alpha is defined at unknown end {p:?}")));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Continue across the head of `oe` into the copy glued along `a(head)`.
    pub fn successor(&self, oe: OrientedEdge) -> OrientedEdge {
        self.alpha[&oe.head_end()].issuing()
    }

    pub fn predecessor(&self, oe: OrientedEdge) -> OrientedEdge {
        self.successor(oe.bar()).bar()
    }

    /// Successor orbit of `oe`, starting with `oe`.
    pub fn orbit(&self, oe: OrientedEdge) -> Vec<OrientedEdge> {
        let mut out = vec![oe];
        let mut cur = self.successor(oe);
        while cur != oe {
            out.push(cur);
            cur = self.successor(cur);
        }
        out
    }

    pub fn lines(&self) -> Vec<Line> {
        self.lines_with(Execution::Sequential)
    }

    /// Each oriented edge computes its own orbit independently; a line is
    /// kept by the least oriented edge it contains (in either orientation).
    pub fn lines_with(&self, exec: Execution) -> Vec<Line> {
        let oes: Vec<OrientedEdge> = self.graph.oriented_edges().collect();
        let found = exec.map(&oes, |&oe| {
            let orbit = self.orbit(oe);
            let least = orbit.iter().flat_map(|&o| [o, o.bar()]).min().expect("nonempty");
            (least == oe).then(|| Line::from_orbit(orbit))
        });
        found.into_iter().flatten().collect()
    }

    /// Fixed-point criterion: some `v = a(v)` with `α_v(p) = p`.
    pub fn has_nonorientable_line(&self) -> bool {
        self.graph
            .links()
            .iter()
            .any(|(v, l)| self.a.get(v) == Some(v) && l.iter().any(|p| self.alpha.get(p) == Some(p)))
    }

    /// Lines grouped by shared end pair: two lines go together when their
    /// successor walks, started at oriented edges with the same tail and head,
    /// visit the same vertex pairs for a full common period. Groups are lists
    /// of indices into `lines`, sorted.
    pub fn lines_sharing_ends(&self, lines: &[Line]) -> Vec<Vec<usize>> {
        let ends = |oe: OrientedEdge| (self.graph.tail(oe), self.graph.head(oe));
        let mut uf = UnionFind::new(lines.len());
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (l1, l2) = (&lines[i], &lines[j]);
                let start = l1.orbit[0];
                let span = lcm(l1.period(), l2.period());
                let synced = l2.orbit.iter().flat_map(|&o| [o, o.bar()]).any(|other| {
                    let (mut x, mut y) = (start, other);
                    for _ in 0..span {
                        if ends(x) != ends(y) {
                            return false;
                        }
                        x = self.successor(x);
                        y = self.successor(y);
                    }
                    true
                });
                if synced {
                    uf.union(i, j);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..lines.len() {
            groups.entry(uf.find(i)).or_default().push(i);
        }
        groups.into_values().collect()
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// One period of a line, rotated to start at its least oriented edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Line {
    pub orbit: Vec<OrientedEdge>,
    pub orientable: bool,
    pub edge_class: BTreeSet<EdgeId>,
}

impl Line {
    fn from_orbit(orbit: Vec<OrientedEdge>) -> Line {
        let members: BTreeSet<OrientedEdge> = orbit.iter().copied().collect();
        let orientable = !orbit.iter().any(|o| members.contains(&o.bar()));
        let edge_class = orbit.iter().map(|o| o.edge).collect();
        Line { orbit, orientable, edge_class }
    }

    pub fn period(&self) -> usize {
        self.orbit.len()
    }
}

/// Wire form of a V-system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VSystemJson {
    pub graph: Multigraph,
    pub a: Vec<[VertexId; 2]>,
    pub alpha: Vec<VertexAlpha>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexAlpha {
    pub vertex: VertexId,
    /// `[p, α_v(p)]` for each `p ∈ Lk(v)`.
    pub map: Vec<[EdgeEnd; 2]>,
}

impl From<&ConnectingVSystem> for VSystemJson {
    fn from(vs: &ConnectingVSystem) -> Self {
        let alpha = vs
            .graph
            .links()
            .into_iter()
            .map(|(vertex, l)| VertexAlpha {
                vertex,
                map: l.into_iter().filter_map(|p| vs.alpha.get(&p).map(|&q| [p, q])).collect(),
            })
            .collect();
        VSystemJson { graph: vs.graph.clone(), a: vs.a.iter().map(|(&v, &w)| [v, w]).collect(), alpha }
    }
}

impl VSystemJson {
    /// Rebuilds the system; malformed entries come back as violations
    /// (deeper checks are left to [`ConnectingVSystem::validate`]).
    pub fn into_system(self) -> Result<ConnectingVSystem, Vec<Violation>> {
        let mut bad = Vec::new();
        let mut a = BTreeMap::new();
        for [v, w] in self.a {
            if a.insert(v, w).is_some() {
                bad.push(Violation::new(ViolationCode::MalformedInput, format!("a listed twice at {v}")));
            }
        }
        let mut alpha = BTreeMap::new();
        for va in self.alpha {
            for [p, q] in va.map {
                if self.graph.endpoint(p) != Some(va.vertex) {
                    bad.push(Violation::new(
                        ViolationCode::MalformedInput,
                        format!("end {p:?} is not at vertex {}", va.vertex),
                    ));
                }
                if alpha.insert(p, q).is_some() {
                    bad.push(Violation::new(ViolationCode::MalformedInput, format!("alpha listed twice at {p:?}")));
                }
            }
        }
        if bad.is_empty() {
            Ok(ConnectingVSystem::new(self.graph, a, alpha))
        } else {
            Err(bad)
        }
    }
}
