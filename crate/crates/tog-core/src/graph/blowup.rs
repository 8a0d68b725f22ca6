use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::locus::{PointLocus, Pos};
use super::multigraph::{EdgeEnd, EdgeId, Multigraph, Side, UnionFind, VertexId};
use super::GraphError;

/// Local branch at a blown-up point.
///
/// At a vertex locus this is the edge-end sitting at the vertex. At an interior
/// locus `side` names the direction the branch runs in: `Tail` is the piece
/// towards the edge's tail, whose divisor point is the near-tail one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub edge: EdgeId,
    pub side: Side,
}

impl From<EdgeEnd> for Branch {
    fn from(e: EdgeEnd) -> Self {
        Branch { edge: e.edge, side: e.side }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub vertex: VertexId,
    pub branch: Branch,
}

/// Where an edge of a blow-up sits inside the original graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcOrigin {
    pub edge: EdgeId,
    pub from: Pos,
    pub to: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowUpResult {
    pub graph: Multigraph,
    pub divisors: BTreeMap<PointLocus, Vec<DivisorPoint>>,
    /// Midpoints inserted on arcs whose both ends are divisor points.
    pub auxiliary: BTreeSet<VertexId>,
    pub arcs: BTreeMap<EdgeId, ArcOrigin>,
    /// Vertices of the original graph that survive unchanged.
    pub kept: BTreeSet<VertexId>,
}

impl BlowUpResult {
    pub fn divisor(&self, x: &PointLocus) -> Option<&[DivisorPoint]> {
        self.divisors.get(x).map(Vec::as_slice)
    }

    pub fn divisor_vertex(&self, x: &PointLocus, b: Branch) -> Option<VertexId> {
        self.divisor(x)?.iter().find(|d| d.branch == b).map(|d| d.vertex)
    }

    pub fn loci(&self) -> BTreeSet<PointLocus> {
        self.divisors.keys().copied().collect()
    }
}

fn check_loci(g: &Multigraph, sites: &[PointLocus]) -> Result<BTreeSet<PointLocus>, GraphError> {
    let mut set = BTreeSet::new();
    for x in sites {
        x.check(g)?;
        if !set.insert(*x) {
            return Err(GraphError::DuplicateLocus(x.to_string()));
        }
    }
    Ok(set)
}

/// Blows up `g` at every locus of `sites` simultaneously.
///
/// Surviving vertices keep their ids. Edges that are neither cut nor turned
/// into an isolated arc keep their ids as well. New vertices and edges are
/// numbered past the old maxima in locus order.
pub fn blow_up(g: &Multigraph, sites: &[PointLocus]) -> Result<BlowUpResult, GraphError> {
    let sites = check_loci(g, sites)?;
    let mut next_v = g.next_vertex_id();
    let mut next_e = g.next_edge_id();

    let mut divisors: BTreeMap<PointLocus, Vec<DivisorPoint>> = BTreeMap::new();
    let mut end_vertex: BTreeMap<EdgeEnd, VertexId> = BTreeMap::new();
    let mut cuts: BTreeMap<EdgeId, Vec<(Pos, VertexId, VertexId)>> = BTreeMap::new();
    let links = g.links();

    for x in &sites {
        let mut points = Vec::new();
        match *x {
            PointLocus::Vertex { vertex } => {
                for &end in &links[&vertex] {
                    end_vertex.insert(end, next_v);
                    points.push(DivisorPoint { vertex: next_v, branch: end.into() });
                    next_v += 1;
                }
            }
            PointLocus::Interior { edge, pos } => {
                let (lo, hi) = (next_v, next_v + 1);
                next_v += 2;
                points.push(DivisorPoint { vertex: lo, branch: Branch { edge, side: Side::Tail } });
                points.push(DivisorPoint { vertex: hi, branch: Branch { edge, side: Side::Head } });
                cuts.entry(edge).or_default().push((pos, lo, hi));
            }
        }
        divisors.insert(*x, points);
    }

    let blown: BTreeSet<VertexId> = sites
        .iter()
        .filter_map(|x| match x {
            PointLocus::Vertex { vertex } => Some(*vertex),
            _ => None,
        })
        .collect();
    let kept: BTreeSet<VertexId> = g.vertices().filter(|v| !blown.contains(v)).collect();
    let divisor_vertices: BTreeSet<VertexId> = divisors.values().flatten().map(|d| d.vertex).collect();

    let mut out = Multigraph::new();
    for &v in kept.iter().chain(divisor_vertices.iter()) {
        out.add_vertex(v);
    }
    let mut auxiliary = BTreeSet::new();
    let mut arcs = BTreeMap::new();

    for (e, [t, h]) in g.edges() {
        let start = *end_vertex.get(&EdgeEnd::new(e, Side::Tail)).unwrap_or(&t);
        let finish = *end_vertex.get(&EdgeEnd::new(e, Side::Head)).unwrap_or(&h);
        let mut here = cuts.remove(&e).unwrap_or_default();
        here.sort();
        // segment list: (from vertex, to vertex, from pos, to pos)
        let mut segs = Vec::with_capacity(here.len() + 1);
        let (mut cur_v, mut cur_p) = (start, Pos::zero());
        for &(p, lo, hi) in &here {
            segs.push((cur_v, lo, cur_p, p));
            cur_v = hi;
            cur_p = p;
        }
        segs.push((cur_v, finish, cur_p, Pos::one()));

        let untouched = segs.len() == 1;
        for (a, b, from, to) in segs {
            let open = divisor_vertices.contains(&a) && divisor_vertices.contains(&b);
            if open {
                let m = next_v;
                next_v += 1;
                out.add_vertex(m);
                auxiliary.insert(m);
                let mid = from.midpoint(to);
                for (x, y, f, t) in [(a, m, from, mid), (m, b, mid, to)] {
                    out.add_edge(next_e, x, y)?;
                    arcs.insert(next_e, ArcOrigin { edge: e, from: f, to: t });
                    next_e += 1;
                }
            } else {
                let id = if untouched {
                    e
                } else {
                    next_e += 1;
                    next_e - 1
                };
                out.add_edge(id, a, b)?;
                arcs.insert(id, ArcOrigin { edge: e, from, to });
            }
        }
    }

    Ok(BlowUpResult { graph: out, divisors, auxiliary, arcs, kept })
}

/// Collapses every divisor back to its point and rejoins the arcs of each
/// original edge. Inverse of [`blow_up`] on the nose, ids included.
pub fn blow_down(r: &BlowUpResult) -> Result<Multigraph, GraphError> {
    let mut point_of: BTreeMap<VertexId, PointLocus> = BTreeMap::new();
    for (x, pts) in &r.divisors {
        for d in pts {
            point_of.insert(d.vertex, *x);
        }
    }
    let mut g = Multigraph::new();
    for &v in &r.kept {
        if !r.graph.has_vertex(v) {
            return Err(GraphError::InconsistentDivisor(format!("kept vertex {v} missing")));
        }
        g.add_vertex(v);
    }
    for x in r.divisors.keys() {
        if let PointLocus::Vertex { vertex } = x {
            g.add_vertex(*vertex);
        }
    }
    // endpoints of each original edge, read off the arcs at 0 and 1
    let mut ends: BTreeMap<EdgeId, [Option<VertexId>; 2]> = BTreeMap::new();
    for (&id, o) in &r.arcs {
        let [a, b] = r.graph.try_ends(id)?;
        let slot = ends.entry(o.edge).or_default();
        if o.from == Pos::zero() {
            slot[0] = Some(a);
        }
        if o.to == Pos::one() {
            slot[1] = Some(b);
        }
    }
    let resolve = |v: VertexId| -> Result<VertexId, GraphError> {
        match point_of.get(&v) {
            None => Ok(v),
            Some(PointLocus::Vertex { vertex }) => Ok(*vertex),
            Some(x) => Err(GraphError::InconsistentDivisor(format!("interior divisor of {x} at an edge end"))),
        }
    };
    for (e, slot) in ends {
        let (Some(a), Some(b)) = (slot[0], slot[1]) else {
            return Err(GraphError::InconsistentDivisor(format!("edge {e} has a missing end")));
        };
        g.add_edge(e, resolve(a)?, resolve(b)?)?;
    }
    Ok(g)
}

/// Blow-down from the loci of `r` to the subset `keep`: the result is the
/// blow-up of the underlying graph at `keep` alone.
pub fn blow_down_to(r: &BlowUpResult, keep: &[PointLocus]) -> Result<BlowUpResult, GraphError> {
    let all = r.loci();
    if let Some(x) = keep.iter().find(|x| !all.contains(x)) {
        return Err(GraphError::InconsistentDivisor(format!("{x} is not blown up")));
    }
    blow_up(&blow_down(r)?, keep)
}

/// Connected components, each sorted, listed by least vertex.
pub fn components(g: &Multigraph) -> Vec<Vec<VertexId>> {
    let d = g.dense();
    let mut uf = UnionFind::new(d.n());
    for &[a, b] in &d.ends {
        uf.union(a, b);
    }
    let mut classes: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for i in 0..d.n() {
        classes.entry(uf.find(i)).or_default().push(d.ids[i]);
    }
    classes.into_values().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementReport {
    pub count: usize,
    /// Component index for every divisor point, keyed by locus.
    pub divisor_components: BTreeMap<PointLocus, Vec<(Branch, usize)>>,
    pub blow_up_components: Vec<Vec<VertexId>>,
}

/// π₀ of `g` minus `sites`, computed as π₀ of the blow-up.
pub fn complement_components(g: &Multigraph, sites: &[PointLocus]) -> Result<ComplementReport, GraphError> {
    let r = blow_up(g, sites)?;
    let comps = components(&r.graph);
    let mut which = BTreeMap::new();
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            which.insert(v, i);
        }
    }
    let divisor_components =
        r.divisors.iter().map(|(x, pts)| (*x, pts.iter().map(|d| (d.branch, which[&d.vertex])).collect())).collect();
    Ok(ComplementReport { count: comps.len(), divisor_components, blow_up_components: comps })
}

/// Pairing of the branches at `x1` with those at `x2`.
pub type LinkMap = Vec<(Branch, Branch)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "from", rename_all = "lowercase")]
pub enum SumOrigin {
    Left { vertex: VertexId },
    Right { vertex: VertexId },
    Junction { left: VertexId, right: VertexId },
}

#[derive(Clone, Debug)]
pub struct ConnectedSum {
    pub graph: Multigraph,
    pub left: BlowUpResult,
    pub right: BlowUpResult,
    /// Offsets applied to the right blow-up's ids.
    pub right_vertex_offset: VertexId,
    pub right_edge_offset: EdgeId,
    pub vertex_origin: BTreeMap<VertexId, SumOrigin>,
    pub junctions: Vec<VertexId>,
}

impl ConnectedSum {
    /// Image of a vertex under the projection to the left summand: right-side
    /// cells collapse to `x1`.
    pub fn project_left(&self, v: VertexId, x1: PointLocus) -> Option<PointLocus> {
        match self.vertex_origin.get(&v)? {
            SumOrigin::Left { vertex } if self.left.kept.contains(vertex) => Some(PointLocus::vertex(*vertex)),
            _ => Some(x1),
        }
    }
}

fn check_link_map(deg: usize, left: &[DivisorPoint], right: &[DivisorPoint], ell: &LinkMap) -> Result<(), GraphError> {
    if left.len() != deg || right.len() != deg || ell.len() != deg {
        return Err(GraphError::DegreeMismatch { left: left.len(), right: right.len(), map: ell.len() });
    }
    let dom: BTreeSet<Branch> = ell.iter().map(|p| p.0).collect();
    let cod: BTreeSet<Branch> = ell.iter().map(|p| p.1).collect();
    let l: BTreeSet<Branch> = left.iter().map(|d| d.branch).collect();
    let r: BTreeSet<Branch> = right.iter().map(|d| d.branch).collect();
    if dom != l || cod != r {
        return Err(GraphError::NotBijective);
    }
    Ok(())
}

/// `g1 #_ℓ g2`: blow up both points and identify `p` with `ℓ(p)`.
pub fn connected_sum(
    g1: &Multigraph,
    x1: PointLocus,
    g2: &Multigraph,
    x2: PointLocus,
    ell: &LinkMap,
) -> Result<ConnectedSum, GraphError> {
    let left = blow_up(g1, &[x1])?;
    let right = blow_up(g2, &[x2])?;
    check_link_map(x1.degree(g1)?, &left.divisors[&x1], &right.divisors[&x2], ell)?;
    if x2.degree(g2)? != x1.degree(g1)? {
        return Err(GraphError::DegreeMismatch { left: x1.degree(g1)?, right: x2.degree(g2)?, map: ell.len() });
    }

    let (mut g, dv, de) = left.graph.disjoint_union(&right.graph);
    let mut vertex_origin: BTreeMap<VertexId, SumOrigin> = BTreeMap::new();
    for v in left.graph.vertices() {
        vertex_origin.insert(v, SumOrigin::Left { vertex: v });
    }
    for v in right.graph.vertices() {
        vertex_origin.insert(v + dv, SumOrigin::Right { vertex: v });
    }
    let mut junctions = Vec::new();
    for &(p, q) in ell {
        let a = left.divisor_vertex(&x1, p).expect("checked");
        let b = right.divisor_vertex(&x2, q).expect("checked") + dv;
        merge_into(&mut g, b, a);
        vertex_origin.remove(&b);
        vertex_origin.insert(a, SumOrigin::Junction { left: a, right: b - dv });
        junctions.push(a);
    }
    junctions.sort();
    Ok(ConnectedSum { graph: g, left, right, right_vertex_offset: dv, right_edge_offset: de, vertex_origin, junctions })
}

/// Connected sum of a graph with itself at two distinct points; used to
/// replay gluings inside a disjoint union.
pub fn self_sum(g: &Multigraph, x1: PointLocus, x2: PointLocus, ell: &LinkMap) -> Result<Multigraph, GraphError> {
    let r = blow_up(g, &[x1, x2])?;
    check_link_map(x1.degree(g)?, &r.divisors[&x1], &r.divisors[&x2], ell)?;
    let mut out = r.graph.clone();
    for &(p, q) in ell {
        let a = r.divisor_vertex(&x1, p).expect("checked");
        let b = r.divisor_vertex(&x2, q).expect("checked");
        merge_into(&mut out, b, a);
    }
    Ok(out)
}

/// Moves every edge-end at `from` onto `to` and deletes `from`.
fn merge_into(g: &mut Multigraph, from: VertexId, to: VertexId) {
    for end in g.link(from) {
        g.set_end(end, to);
    }
    g.remove_vertex(from);
}

/// Link map for an interior splice that matches near-tail with near-tail when
/// `same_direction`, and crosses them otherwise.
pub fn interior_splice(e1: EdgeId, e2: EdgeId, same_direction: bool) -> LinkMap {
    let b = |e, side| Branch { edge: e, side };
    if same_direction {
        vec![(b(e1, Side::Tail), b(e2, Side::Tail)), (b(e1, Side::Head), b(e2, Side::Head))]
    } else {
        vec![(b(e1, Side::Tail), b(e2, Side::Head)), (b(e1, Side::Head), b(e2, Side::Tail))]
    }
}
