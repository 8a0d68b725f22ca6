use std::collections::BTreeSet;

use super::multigraph::{Dense, EdgeId, Multigraph, UnionFind, VertexId};

pub fn is_connected(g: &Multigraph) -> bool {
    let d = g.dense();
    let mut uf = UnionFind::new(d.n());
    let mut classes = d.n();
    for &[a, b] in &d.ends {
        if uf.union(a, b) {
            classes -= 1;
        }
    }
    classes == 1
}

/// Cut vertices and bridges from one low-link pass. Parallel edges are never
/// bridges since the walk skips the tree edge by id, not by endpoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LowLink {
    pub cut_vertices: BTreeSet<VertexId>,
    pub bridges: BTreeSet<EdgeId>,
}

pub fn low_link(g: &Multigraph) -> LowLink {
    let d = g.dense();
    let n = d.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut out = LowLink::default();
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        walk(&d, root, &mut disc, &mut low, &mut timer, &mut out);
    }
    out
}

fn walk(d: &Dense, root: usize, disc: &mut [usize], low: &mut [usize], timer: &mut usize, out: &mut LowLink) {
    // frame: (vertex, edge index used to enter, next adjacency slot)
    let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
    disc[root] = *timer;
    low[root] = *timer;
    *timer += 1;
    let mut root_children = 0;
    while let Some(&mut (v, via, ref mut slot)) = stack.last_mut() {
        if *slot < d.adj[v].len() {
            let (e, w) = d.adj[v][*slot];
            *slot += 1;
            if e == via || w == v {
                continue;
            }
            if disc[w] == usize::MAX {
                disc[w] = *timer;
                low[w] = *timer;
                *timer += 1;
                if v == root {
                    root_children += 1;
                }
                stack.push((w, e, 0));
            } else {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                low[p] = low[p].min(low[v]);
                if low[v] > disc[p] {
                    out.bridges.insert(d.edge_ids[via]);
                }
                if p != root && low[v] >= disc[p] {
                    out.cut_vertices.insert(d.ids[p]);
                }
            }
        }
    }
    if root_children > 1 {
        out.cut_vertices.insert(d.ids[root]);
    }
}

/// Nonempty, connected, at least two vertices, and no cut point in the
/// realization: no cut vertex, no bridge, and no loop (a loop's vertex
/// separates the loop from the rest).
pub fn is_two_connected(g: &Multigraph) -> bool {
    if g.vertex_count() < 2 || !is_connected(g) || g.has_loops() {
        return false;
    }
    let ll = low_link(g);
    ll.cut_vertices.is_empty() && ll.bridges.is_empty()
}
