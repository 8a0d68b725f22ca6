//! Brute-force oracles and seeded generators for the test suites.
//!
//! The oracles avoid the library's own kernels: they work on subdivided
//! copies of the realization inside petgraph, so a point of a graph becomes
//! a vertex and every question turns into plain vertex connectivity.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::{connected_components, is_isomorphic_matching};
use petgraph::graph::{NodeIndex, UnGraph};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tog_core::graph::{EdgeEnd, EdgeId, Multigraph, PointLocus, Pos, Side, VertexId};
use tog_core::vsystem::ConnectingVSystem;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Simple graph modelling the realization. Each edge is cut at the given
/// interior positions (plus enough extra points that every open arc keeps a
/// vertex of its own). Returns the graph and the node of each requested point.
struct Subdivided {
    graph: UnGraph<u8, ()>,
    points: Vec<NodeIndex>,
}

fn subdivide(g: &Multigraph, loci: &[PointLocus]) -> Subdivided {
    let mut out: UnGraph<u8, ()> = UnGraph::new_undirected();
    let mut node: BTreeMap<VertexId, NodeIndex> = BTreeMap::new();
    for v in g.vertices() {
        node.insert(v, out.add_node(0));
    }
    let mut cuts: BTreeMap<EdgeId, Vec<(Pos, usize)>> = BTreeMap::new();
    for (i, x) in loci.iter().enumerate() {
        if let PointLocus::Interior { edge, pos } = *x {
            cuts.entry(edge).or_default().push((pos, i));
        }
    }
    let mut points = vec![NodeIndex::end(); loci.len()];
    for (i, x) in loci.iter().enumerate() {
        if let PointLocus::Vertex { vertex } = *x {
            points[i] = node[&vertex];
        }
    }
    for (e, [a, b]) in g.edges() {
        let mut cs = cuts.remove(&e).unwrap_or_default();
        cs.sort();
        let mut prev = node[&a];
        for (_, i) in cs {
            let filler = out.add_node(1);
            out.add_edge(prev, filler, ());
            let p = out.add_node(1);
            out.add_edge(filler, p, ());
            points[i] = p;
            prev = p;
        }
        // two fillers on the last arc keep loops and parallel edges simple
        let f1 = out.add_node(1);
        let f2 = out.add_node(1);
        out.add_edge(prev, f1, ());
        out.add_edge(f1, f2, ());
        out.add_edge(f2, node[&b], ());
    }
    Subdivided { graph: out, points }
}

fn without(graph: &UnGraph<u8, ()>, removed: &BTreeSet<NodeIndex>) -> UnGraph<u8, ()> {
    graph.filter_map(|n, w| (!removed.contains(&n)).then_some(*w), |_, _| Some(()))
}

/// Number of components of the realization minus the given points.
pub fn complement_count(g: &Multigraph, loci: &[PointLocus]) -> usize {
    let s = subdivide(g, loci);
    let removed: BTreeSet<NodeIndex> = s.points.iter().copied().collect();
    connected_components(&without(&s.graph, &removed))
}

/// No point of the realization disconnects it.
pub fn brute_two_connected(g: &Multigraph) -> bool {
    if g.vertex_count() < 2 {
        return false;
    }
    let s = subdivide(g, &[]);
    if connected_components(&s.graph) != 1 {
        return false;
    }
    s.graph.node_indices().all(|n| connected_components(&without(&s.graph, &BTreeSet::from([n]))) == 1)
}

/// Twin of `x` found by testing every other vertex of equal degree.
pub fn brute_essential_twin(g: &Multigraph, x: VertexId) -> Option<VertexId> {
    let d = g.degree(x);
    if d < 3 {
        return None;
    }
    g.vertices()
        .filter(|&y| y != x && g.degree(y) == d)
        .find(|&y| complement_count(g, &[PointLocus::vertex(x), PointLocus::vertex(y)]) == d)
}

fn double_subdivision(g: &Multigraph) -> UnGraph<u8, ()> {
    subdivide(g, &[]).graph
}

/// Multigraph isomorphism through VF2 on the coloured double subdivision.
pub fn petgraph_isomorphic(a: &Multigraph, b: &Multigraph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && is_isomorphic_matching(&double_subdivision(a), &double_subdivision(b), |x, y| x == y, |_, _| true)
}

/// Lines of a V-system through a dense permutation of oriented edges
/// (`2e` forward, `2e+1` backward): `(period, orientable, edge class)`.
pub fn brute_lines(vs: &ConnectingVSystem) -> Vec<(usize, bool, BTreeSet<EdgeId>)> {
    let edges: Vec<EdgeId> = vs.graph.edge_ids().collect();
    let index: BTreeMap<EdgeId, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let m = edges.len();
    let succ: Vec<usize> = (0..2 * m)
        .map(|k| {
            let e = edges[k / 2];
            // head end of the oriented edge
            let head = if k % 2 == 0 { EdgeEnd::new(e, Side::Head) } else { EdgeEnd::new(e, Side::Tail) };
            let q = vs.alpha[&head];
            2 * index[&q.edge] + if q.side == Side::Tail { 0 } else { 1 }
        })
        .collect();
    let mut seen = vec![false; 2 * m];
    let mut out = Vec::new();
    for k in 0..2 * m {
        if seen[k] {
            continue;
        }
        let mut orbit = vec![k];
        let mut c = succ[k];
        while c != k {
            orbit.push(c);
            c = succ[c];
        }
        let members: BTreeSet<usize> = orbit.iter().copied().collect();
        for &o in &orbit {
            seen[o] = true;
            seen[o ^ 1] = true;
        }
        let orientable = !orbit.iter().any(|o| members.contains(&(o ^ 1)));
        out.push((orbit.len(), orientable, orbit.iter().map(|o| edges[o / 2]).collect()));
    }
    out
}

/// 2-connected loopless multigraph built from a cycle by random ears.
pub fn random_two_connected(rng: &mut impl Rng, max_vertices: u32) -> Multigraph {
    let max_vertices = max_vertices.max(2);
    let n0 = rng.random_range(2..=max_vertices.min(5));
    let mut g = Multigraph::cycle(n0);
    let ears = rng.random_range(1..=4);
    for _ in 0..ears {
        let vs: Vec<VertexId> = g.vertices().collect();
        let u = *vs.choose(rng).expect("nonempty");
        let w = loop {
            let w = *vs.choose(rng).expect("nonempty");
            if w != u {
                break w;
            }
        };
        let room = max_vertices.saturating_sub(g.vertex_count() as u32);
        let inner = rng.random_range(0..=room.min(3));
        let mut prev = u;
        for _ in 0..inner {
            let v = g.next_vertex_id();
            g.add_vertex(v);
            g.add_edge(g.next_edge_id(), prev, v).expect("fresh");
            prev = v;
        }
        g.add_edge(g.next_edge_id(), prev, w).expect("fresh");
    }
    g
}

/// Connected sum of θ-graphs at interior points of edges, built by direct
/// rewiring: edges `a-b` and `c-d` become `a-j0-c` and `b-j1-d` (or the
/// crossed version). Returns the graph and the sizes used.
pub fn random_theta_sum(
    rng: &mut impl Rng,
    count: usize,
    sizes: std::ops::RangeInclusive<usize>,
) -> (Multigraph, Vec<usize>) {
    let picked: Vec<usize> = (0..count).map(|_| rng.random_range(sizes.clone())).collect();
    let mut g = Multigraph::theta(picked[0]);
    for &k in &picked[1..] {
        let (mut h, _, de) = g.disjoint_union(&Multigraph::theta(k));
        let old: Vec<EdgeId> = g.edge_ids().collect();
        let e1 = *old.choose(rng).expect("edges");
        let e2 = de + rng.random_range(0..k as u32);
        let [a, b] = h.remove_edge(e1).expect("present");
        let [c, d] = h.remove_edge(e2).expect("present");
        let (j0, j1) = (h.next_vertex_id(), h.next_vertex_id() + 1);
        h.add_vertex(j0);
        h.add_vertex(j1);
        let (x, y) = if rng.random_bool(0.5) { (c, d) } else { (d, c) };
        for (p, q) in [(a, j0), (j0, x), (b, j1), (j1, y)] {
            h.add_edge(h.next_edge_id(), p, q).expect("fresh");
        }
        g = h;
    }
    (g, picked)
}

/// Random valid V-system on a loopless multigraph with at most
/// `max_vertices` vertices. Fixed points of `a` and of `α` are frequent
/// enough that both orientability outcomes show up.
pub fn random_vsystem(rng: &mut impl Rng, max_vertices: u32) -> ConnectingVSystem {
    let n = rng.random_range(2..=max_vertices.max(2));
    let mut g = Multigraph::new();
    for v in 0..n {
        g.add_vertex(v);
    }
    let m = rng.random_range(n..=2 * n + 2);
    for _ in 0..m {
        let u = rng.random_range(0..n);
        let w = loop {
            let w = rng.random_range(0..n);
            if w != u {
                break w;
            }
        };
        g.add_edge(g.next_edge_id(), u, w).expect("fresh");
    }
    // no isolated vertices
    for v in 0..n {
        if g.degree(v) == 0 {
            let w = (v + 1) % n;
            g.add_edge(g.next_edge_id(), v, w).expect("fresh");
        }
    }
    let links = g.links();
    let mut by_degree: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for (&v, l) in &links {
        by_degree.entry(l.len()).or_default().push(v);
    }
    let mut a = BTreeMap::new();
    let mut alpha = BTreeMap::new();
    for (_, mut class) in by_degree {
        class.shuffle(rng);
        while let Some(v) = class.pop() {
            let pair = if !class.is_empty() && rng.random_bool(0.6) { class.pop() } else { None };
            match pair {
                Some(w) => {
                    a.insert(v, w);
                    a.insert(w, v);
                    let mut target = links[&w].clone();
                    target.shuffle(rng);
                    for (&p, &q) in links[&v].iter().zip(&target) {
                        alpha.insert(p, q);
                        alpha.insert(q, p);
                    }
                }
                None => {
                    a.insert(v, v);
                    let mut ends = links[&v].clone();
                    ends.shuffle(rng);
                    while let Some(p) = ends.pop() {
                        let paired = !ends.is_empty() && rng.random_bool(0.7);
                        match paired.then(|| ends.pop()).flatten() {
                            Some(q) => {
                                alpha.insert(p, q);
                                alpha.insert(q, p);
                            }
                            None => {
                                alpha.insert(p, p);
                            }
                        }
                    }
                }
            }
        }
    }
    ConnectingVSystem::new(g, a, alpha)
}
