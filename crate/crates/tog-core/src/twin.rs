//! Twin pairs in 2-connected graphs and the splitting of twin graphs into
//! connected sums of thick θ-graphs.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::graph::{
    complement_components, homeomorphic, is_two_connected, self_sum, Branch, EdgeEnd, GraphError, LinkMap, Multigraph,
    PointLocus, Side, UnionFind, VertexId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwinError {
    #[error("graph is not 2-connected")]
    NotTwoConnected,
    #[error("the two loci coincide")]
    SameLocus,
    #[error("vertex {vertex} has degree {degree}; an essential vertex of degree at least 3 is required")]
    NotEssential { vertex: VertexId, degree: usize },
    #[error("not a twin graph")]
    NotTwinGraph,
    #[error("graph is homeomorphic to the circle")]
    IsCircle,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwinReport {
    pub pair: [PointLocus; 2],
    /// `None` when the two degrees differ.
    pub common_degree: Option<usize>,
    pub component_count: usize,
    pub is_twin: bool,
}

pub fn is_twin_pair(g: &Multigraph, x: PointLocus, y: PointLocus) -> Result<TwinReport, TwinError> {
    if x == y {
        return Err(TwinError::SameLocus);
    }
    if !is_two_connected(g) {
        return Err(TwinError::NotTwoConnected);
    }
    let (dx, dy) = (x.degree(g)?, y.degree(g)?);
    let count = complement_components(g, &[x, y])?.count;
    let common_degree = (dx == dy).then_some(dx);
    Ok(TwinReport { pair: [x, y], common_degree, component_count: count, is_twin: dx == dy && dx == count })
}

/// One component of `X ∖ {x, y}` for vertices `x, y`.
#[derive(Clone, Debug)]
struct PairComponent {
    vertices: Vec<VertexId>,
    essential: usize,
}

/// Components of the complement of two vertices. Open edges running between
/// the two (or looping at one) are components without vertices.
fn pair_split(g: &Multigraph, x: VertexId, y: VertexId, degree: &BTreeMap<VertexId, usize>) -> Vec<PairComponent> {
    let ids: Vec<VertexId> = g.vertices().filter(|&v| v != x && v != y).collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(ids.len());
    let mut open = 0;
    for (_, [a, b]) in g.edges() {
        match (index.get(&a), index.get(&b)) {
            (Some(&i), Some(&j)) => {
                uf.union(i, j);
            }
            (None, None) => open += 1,
            _ => {}
        }
    }
    let mut classes: BTreeMap<usize, PairComponent> = BTreeMap::new();
    for (i, &v) in ids.iter().enumerate() {
        let c = classes.entry(uf.find(i)).or_insert_with(|| PairComponent { vertices: Vec::new(), essential: 0 });
        c.vertices.push(v);
        if degree[&v] != 2 {
            c.essential += 1;
        }
    }
    let mut out: Vec<PairComponent> = classes.into_values().collect();
    out.extend((0..open).map(|_| PairComponent { vertices: Vec::new(), essential: 0 }));
    out
}

fn twin_scan(g: &Multigraph, x: VertexId, degree: &BTreeMap<VertexId, usize>) -> Option<VertexId> {
    let d = degree[&x];
    degree
        .iter()
        .filter(|&(&v, &dv)| v != x && dv == d)
        .map(|(&v, _)| v)
        .find(|&v| pair_split(g, x, v, degree).len() == d)
}

/// The twin of an essential vertex, if any. Twins of essential vertices are
/// unique, so the scan stops at the first hit.
pub fn essential_twin(g: &Multigraph, x: VertexId) -> Result<Option<VertexId>, TwinError> {
    if !g.has_vertex(x) {
        return Err(GraphError::UnknownVertex(x).into());
    }
    if !is_two_connected(g) {
        return Err(TwinError::NotTwoConnected);
    }
    let degree = g.degrees();
    if degree[&x] < 3 {
        return Err(TwinError::NotEssential { vertex: x, degree: degree[&x] });
    }
    Ok(twin_scan(g, x, &degree))
}

pub fn is_twin_graph(g: &Multigraph) -> bool {
    is_twin_graph_with(g, Execution::Sequential)
}

/// 2-connected, and every essential vertex has a twin. Degree-2 points always
/// have twins in a 2-connected graph (nearby points on the same edge).
pub fn is_twin_graph_with(g: &Multigraph, exec: Execution) -> bool {
    if !is_two_connected(g) {
        return false;
    }
    let degree = g.degrees();
    let essential: Vec<VertexId> = degree.iter().filter(|(_, &d)| d != 2).map(|(&v, _)| v).collect();
    exec.all(&essential, |&x| twin_scan(g, x, &degree).is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaSummand {
    pub size: usize,
    pub essential: [VertexId; 2],
    #[serde(skip)]
    pub graph: Multigraph,
}

/// One connected-sum operation: the degree-2 vertex `left_vertex` of summand
/// `left` is summed with `right_vertex` of summand `right` along `pairs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gluing {
    pub left: usize,
    pub left_vertex: VertexId,
    pub right: usize,
    pub right_vertex: VertexId,
    pub pairs: Vec<(Branch, Branch)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaSumTree {
    pub summands: Vec<ThetaSummand>,
    pub gluings: Vec<Gluing>,
}

impl ThetaSumTree {
    pub fn sizes(&self) -> Vec<usize> {
        self.summands.iter().map(|s| s.size).collect()
    }

    pub fn sorted_sizes(&self) -> Vec<usize> {
        let mut v = self.sizes();
        v.sort_unstable();
        v
    }

    /// Rebuilds the graph from the summands by performing every gluing.
    /// Homeomorphic to the decomposed input; it carries extra degree-2
    /// vertices where the gluings happened.
    pub fn replay(&self) -> Result<Multigraph, GraphError> {
        let mut g = Multigraph::new();
        for s in &self.summands {
            for v in s.graph.vertices() {
                g.add_vertex(v);
            }
            for (e, [a, b]) in s.graph.edges() {
                g.add_edge(e, a, b)?;
            }
        }
        for gl in &self.gluings {
            g = self_sum(&g, PointLocus::vertex(gl.left_vertex), PointLocus::vertex(gl.right_vertex), &gl.pairs)?;
        }
        Ok(g)
    }
}

struct Descent {
    x: VertexId,
    twin: VertexId,
    core: Option<PairComponent>,
}

/// Twin pair with at most one complement component holding essential
/// vertices, reached from the least essential pair by complexity descent.
fn inner_pair(g: &Multigraph, degree: &BTreeMap<VertexId, usize>) -> Result<Descent, TwinError> {
    let essential: Vec<VertexId> = degree.iter().filter(|(_, &d)| d != 2).map(|(&v, _)| v).collect();
    let n = essential.len();
    let mut x = essential[0];
    let mut last_c = usize::MAX;
    loop {
        let twin = twin_scan(g, x, degree).ok_or(TwinError::NotTwinGraph)?;
        let comps = pair_split(g, x, twin, degree);
        // largest by essential count, ties to the earliest (least vertex)
        let largest =
            comps.iter().enumerate().fold(0, |best, (i, c)| if c.essential > comps[best].essential { i } else { best });
        let n_pair = comps[largest].essential;
        let c = n - n_pair - 2;
        if c == 0 {
            let core = (n_pair > 0).then(|| comps[largest].clone());
            return Ok(Descent { x, twin, core });
        }
        if c >= last_c {
            // in a twin graph each descent step strictly lowers the complexity
            return Err(TwinError::NotTwinGraph);
        }
        last_c = c;
        x = comps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != largest)
            .flat_map(|(_, c)| c.vertices.iter().copied())
            .filter(|v| degree[v] != 2)
            .min()
            .expect("c > 0 leaves an essential vertex outside the largest component");
    }
}

/// Splits a twin graph into thick θ summands, peeling one summand per step at
/// an inner twin pair.
pub fn theta_sum_decomposition(g: &Multigraph) -> Result<ThetaSumTree, TwinError> {
    if !is_two_connected(g) {
        return Err(TwinError::NotTwinGraph);
    }
    if g.degrees().values().all(|&d| d == 2) {
        return Err(TwinError::IsCircle);
    }
    if !is_twin_graph(g) {
        return Err(TwinError::NotTwinGraph);
    }
    let mut work = g.clone();
    let mut next_v = g.next_vertex_id();
    let mut next_e = g.next_edge_id();
    let mut pieces: Vec<(Multigraph, [VertexId; 2])> = Vec::new();
    let mut raw: Vec<(VertexId, VertexId, LinkMap)> = Vec::new();

    loop {
        let degree = work.degrees();
        let Descent { x, twin, core } = inner_pair(&work, &degree)?;
        let Some(core) = core else {
            pieces.push((work, [x, twin]));
            break;
        };
        let inside: BTreeSet<VertexId> = core.vertices.iter().copied().collect();
        let (m1, m2) = (next_v, next_v + 1);
        next_v += 2;
        work.add_vertex(m1);
        work.add_vertex(m2);
        let mut pairs = Vec::with_capacity(2);
        for v in [x, twin] {
            let end = work
                .link(v)
                .into_iter()
                .find(|end| work.endpoint(end.opposite()).is_some_and(|w| inside.contains(&w)))
                .expect("an edge from each twin enters the core component");
            // the core side keeps the edge id so recorded branches stay valid
            work.set_end(end, m2);
            work.add_edge(next_e, v, m1)?;
            pairs.push((Branch { edge: next_e, side: Side::Head }, Branch::from(EdgeEnd::new(end.edge, end.side))));
            next_e += 1;
        }
        raw.push((m1, m2, pairs));

        let theta_side = component_of(&work, x);
        let piece = work.induced(&theta_side);
        let rest: BTreeSet<VertexId> = work.vertices().filter(|v| !theta_side.contains(v)).collect();
        work = work.induced(&rest);
        pieces.push((piece, [x, twin]));
    }

    let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, (p, _)) in pieces.iter().enumerate() {
        for v in p.vertices() {
            owner.insert(v, i);
        }
    }
    let summands = pieces
        .into_iter()
        .map(|(graph, essential)| ThetaSummand { size: graph.degree(essential[0]), essential, graph })
        .collect();
    let gluings = raw
        .into_iter()
        .map(|(m1, m2, pairs)| Gluing { left: owner[&m1], left_vertex: m1, right: owner[&m2], right_vertex: m2, pairs })
        .collect();
    Ok(ThetaSumTree { summands, gluings })
}

fn component_of(g: &Multigraph, v: VertexId) -> BTreeSet<VertexId> {
    crate::graph::components(g)
        .into_iter()
        .find(|c| c.contains(&v))
        .map(|c| c.into_iter().collect())
        .unwrap_or_default()
}

/// Decomposes and checks the replay against the input up to homeomorphism.
pub fn verified_decomposition(g: &Multigraph) -> Result<(ThetaSumTree, bool), TwinError> {
    let tree = theta_sum_decomposition(g)?;
    let ok = homeomorphic(&tree.replay()?, g);
    Ok((tree, ok))
}

/// Distinct edges are interchangeable for twin questions, so one interior
/// representative per edge suffices alongside the vertices.
pub fn representative_loci(g: &Multigraph) -> Vec<PointLocus> {
    let mut out: Vec<PointLocus> = g.vertices().map(PointLocus::vertex).collect();
    out.extend(g.edge_ids().map(PointLocus::midpoint));
    out
}
