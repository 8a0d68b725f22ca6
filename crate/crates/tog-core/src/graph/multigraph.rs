use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::GraphError;

pub type VertexId = u32;
pub type EdgeId = u32;

/// Which end of an edge, relative to its reference orientation `[tail, head]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Tail,
    Head,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Tail => Side::Head,
            Side::Head => Side::Tail,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Side::Tail => 0,
            Side::Head => 1,
        }
    }
}

/// One element of a vertex link. A loop contributes both of its ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: EdgeId,
    pub side: Side,
}

impl EdgeEnd {
    pub fn new(edge: EdgeId, side: Side) -> Self {
        EdgeEnd { edge, side }
    }

    pub fn opposite(self) -> Self {
        EdgeEnd { edge: self.edge, side: self.side.other() }
    }

    /// The oriented edge issuing from the vertex this end sits at.
    pub fn issuing(self) -> OrientedEdge {
        match self.side {
            Side::Tail => OrientedEdge::forward(self.edge),
            Side::Head => OrientedEdge::backward(self.edge),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Forward,
    Backward,
}

/// An edge together with a choice of direction. `Forward` follows the
/// reference orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub dir: Dir,
}

impl OrientedEdge {
    pub fn forward(edge: EdgeId) -> Self {
        OrientedEdge { edge, dir: Dir::Forward }
    }

    pub fn backward(edge: EdgeId) -> Self {
        OrientedEdge { edge, dir: Dir::Backward }
    }

    pub fn is_forward(self) -> bool {
        self.dir == Dir::Forward
    }

    pub fn bar(self) -> Self {
        let dir = match self.dir {
            Dir::Forward => Dir::Backward,
            Dir::Backward => Dir::Forward,
        };
        OrientedEdge { edge: self.edge, dir }
    }

    pub fn tail_end(self) -> EdgeEnd {
        match self.dir {
            Dir::Forward => EdgeEnd::new(self.edge, Side::Tail),
            Dir::Backward => EdgeEnd::new(self.edge, Side::Head),
        }
    }

    pub fn head_end(self) -> EdgeEnd {
        self.tail_end().opposite()
    }
}

/// Finite graph with loops and parallel edges. Ids are arbitrary labels; the
/// ordered containers keep every traversal deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GraphRepr", try_from = "GraphRepr")]
pub struct Multigraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, [VertexId; 2]>,
}

/// Wire form: `{"vertices": [..], "edges": [{"id": e, "ends": [tail, head]}, ..]}`.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeRepr>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    id: EdgeId,
    ends: [VertexId; 2],
}

impl From<Multigraph> for GraphRepr {
    fn from(g: Multigraph) -> Self {
        GraphRepr {
            vertices: g.vertices.into_iter().collect(),
            edges: g.edges.into_iter().map(|(id, ends)| EdgeRepr { id, ends }).collect(),
        }
    }
}

impl TryFrom<GraphRepr> for Multigraph {
    type Error = GraphError;

    fn try_from(r: GraphRepr) -> Result<Self, GraphError> {
        Multigraph::from_parts(r.vertices, r.edges.into_iter().map(|e| (e.id, e.ends)))
    }
}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (EdgeId, [VertexId; 2])>,
    ) -> Result<Self, GraphError> {
        let mut g = Multigraph::new();
        for v in vertices {
            g.add_vertex(v);
        }
        for (id, ends) in edges {
            g.add_edge(id, ends[0], ends[1])?;
        }
        Ok(g)
    }

    /// Vertices `0..n`, edges numbered in the given order.
    pub fn from_edge_list(n: u32, edges: &[(VertexId, VertexId)]) -> Self {
        let mut g = Multigraph::new();
        for v in 0..n {
            g.add_vertex(v);
        }
        for (i, &(a, b)) in edges.iter().enumerate() {
            g.add_edge(i as EdgeId, a, b).expect("edge list references vertices 0..n");
        }
        g
    }

    /// The θ-graph with `k` edges on vertices 0 and 1.
    pub fn theta(k: usize) -> Self {
        Self::from_edge_list(2, &vec![(0, 1); k])
    }

    /// A cycle on `n ≥ 2` vertices (two parallel edges when `n = 2`).
    pub fn cycle(n: u32) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edge_list(n, &edges)
    }

    pub fn complete(n: u32) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Self::from_edge_list(n, &edges)
    }

    pub fn add_vertex(&mut self, v: VertexId) -> bool {
        self.vertices.insert(v)
    }

    pub fn add_edge(&mut self, id: EdgeId, tail: VertexId, head: VertexId) -> Result<(), GraphError> {
        for v in [tail, head] {
            if !self.vertices.contains(&v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        if self.edges.insert(id, [tail, head]).is_some() {
            return Err(GraphError::DuplicateEdge(id));
        }
        Ok(())
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<[VertexId; 2]> {
        self.edges.remove(&id)
    }

    /// Removes a vertex together with every edge touching it.
    pub fn remove_vertex(&mut self, v: VertexId) -> bool {
        if !self.vertices.remove(&v) {
            return false;
        }
        self.edges.retain(|_, ends| ends[0] != v && ends[1] != v);
        true
    }

    pub(crate) fn set_end(&mut self, end: EdgeEnd, v: VertexId) {
        if let Some(ends) = self.edges.get_mut(&end.edge) {
            ends[end.side.index()] = v;
        }
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (EdgeId, [VertexId; 2])> + '_ {
        self.edges.iter().map(|(&id, &ends)| (id, ends))
    }

    pub fn edge_ids(&self) -> impl ExactSizeIterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn ends(&self, e: EdgeId) -> Option<[VertexId; 2]> {
        self.edges.get(&e).copied()
    }

    pub fn try_ends(&self, e: EdgeId) -> Result<[VertexId; 2], GraphError> {
        self.ends(e).ok_or(GraphError::UnknownEdge(e))
    }

    pub fn endpoint(&self, end: EdgeEnd) -> Option<VertexId> {
        self.ends(end.edge).map(|ends| ends[end.side.index()])
    }

    pub fn tail(&self, oe: OrientedEdge) -> Option<VertexId> {
        self.endpoint(oe.tail_end())
    }

    pub fn head(&self, oe: OrientedEdge) -> Option<VertexId> {
        self.endpoint(oe.head_end())
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.ends(e).is_some_and(|[a, b]| a == b)
    }

    pub fn has_loops(&self) -> bool {
        self.edges.values().any(|[a, b]| a == b)
    }

    /// Link of `v`, sorted by `(edge, side)`.
    pub fn link(&self, v: VertexId) -> Vec<EdgeEnd> {
        let mut out = Vec::new();
        for (&id, ends) in &self.edges {
            if ends[0] == v {
                out.push(EdgeEnd::new(id, Side::Tail));
            }
            if ends[1] == v {
                out.push(EdgeEnd::new(id, Side::Head));
            }
        }
        out
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.values().map(|ends| usize::from(ends[0] == v) + usize::from(ends[1] == v)).sum()
    }

    /// All links at once; cheaper than repeated `link` calls.
    pub fn links(&self) -> BTreeMap<VertexId, Vec<EdgeEnd>> {
        let mut out: BTreeMap<VertexId, Vec<EdgeEnd>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for (&id, ends) in &self.edges {
            for side in [Side::Tail, Side::Head] {
                if let Some(l) = out.get_mut(&ends[side.index()]) {
                    l.push(EdgeEnd::new(id, side));
                }
            }
        }
        out
    }

    pub fn degrees(&self) -> BTreeMap<VertexId, usize> {
        let mut out: BTreeMap<VertexId, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for ends in self.edges.values() {
            for v in ends {
                *out.get_mut(v).expect("edge endpoints are vertices") += 1;
            }
        }
        out
    }

    pub fn oriented_edges(&self) -> impl Iterator<Item = OrientedEdge> + '_ {
        self.edges.keys().flat_map(|&e| [OrientedEdge::forward(e), OrientedEdge::backward(e)])
    }

    pub fn next_vertex_id(&self) -> VertexId {
        self.vertices.last().map_or(0, |v| v + 1)
    }

    pub fn next_edge_id(&self) -> EdgeId {
        self.edges.keys().last().map_or(0, |e| e + 1)
    }

    /// Disjoint union with `other` shifted past this graph's ids. Returns the
    /// vertex and edge offsets applied to `other`.
    pub fn disjoint_union(&self, other: &Multigraph) -> (Multigraph, VertexId, EdgeId) {
        let dv = self.next_vertex_id();
        let de = self.next_edge_id();
        let mut g = self.clone();
        for v in other.vertices() {
            g.add_vertex(v + dv);
        }
        for (id, [a, b]) in other.edges() {
            g.edges.insert(id + de, [a + dv, b + dv]);
        }
        (g, dv, de)
    }

    /// Induced subgraph on `keep`.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Multigraph {
        Multigraph {
            vertices: self.vertices.intersection(keep).copied().collect(),
            edges: self
                .edges
                .iter()
                .filter(|(_, ends)| keep.contains(&ends[0]) && keep.contains(&ends[1]))
                .map(|(&id, &ends)| (id, ends))
                .collect(),
        }
    }

    /// Renumbers vertices and edges to `0..n` in their current order.
    pub fn compacted(&self) -> Multigraph {
        let vmap: HashMap<VertexId, VertexId> =
            self.vertices.iter().enumerate().map(|(i, &v)| (v, i as VertexId)).collect();
        Multigraph {
            vertices: (0..self.vertices.len() as VertexId).collect(),
            edges: self.edges.values().enumerate().map(|(i, [a, b])| (i as EdgeId, [vmap[a], vmap[b]])).collect(),
        }
    }

    pub(crate) fn dense(&self) -> Dense {
        Dense::new(self)
    }
}

/// Index-based view used by the kernels: vertices `0..n`, edges `0..m`.
#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub ids: Vec<VertexId>,
    pub edge_ids: Vec<EdgeId>,
    pub ends: Vec<[usize; 2]>,
    /// Per vertex: `(edge index, neighbour index)` for every edge-end.
    pub adj: Vec<Vec<(usize, usize)>>,
}

impl Dense {
    fn new(g: &Multigraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edge_ids = Vec::with_capacity(g.edge_count());
        let mut ends = Vec::with_capacity(g.edge_count());
        let mut adj = vec![Vec::new(); ids.len()];
        for (k, (id, [a, b])) in g.edges().enumerate() {
            let (a, b) = (index[&a], index[&b]);
            edge_ids.push(id);
            ends.push([a, b]);
            adj[a].push((k, b));
            adj[b].push((k, a));
        }
        Dense { ids, edge_ids, ends, adj }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }
}

/// Plain union-find over `0..n`.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // smaller root wins so class representatives are stable
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }
}
