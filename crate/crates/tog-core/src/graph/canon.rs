use std::collections::BTreeMap;

use super::multigraph::{EdgeEnd, Multigraph, VertexId};

/// Suppresses degree-2 vertices whose two ends lie on distinct edges, merging
/// the edges. The result is the homeomorphism-type representative with the
/// fewest vertices; a circle component keeps one vertex and a loop.
pub fn smooth(g: &Multigraph) -> Multigraph {
    let mut g = g.clone();
    loop {
        let links = g.links();
        let target = links.iter().find(|(_, l)| l.len() == 2 && l[0].edge != l[1].edge).map(|(&v, l)| (v, l[0], l[1]));
        let Some((v, p, q)) = target else { break };
        let far = |end: EdgeEnd| g.endpoint(end.opposite()).expect("edge exists");
        let (a, b) = (far(p), far(q));
        // keep the smaller edge id, oriented from `a` to `b`
        let keep = p.edge.min(q.edge);
        g.remove_edge(p.edge);
        g.remove_edge(q.edge);
        g.remove_vertex(v);
        g.add_edge(keep, a, b).expect("endpoints survive");
    }
    g
}

/// Isomorphism invariant that determines a multigraph up to isomorphism:
/// vertex count plus the upper triangle of the multiplicity matrix under the
/// lexicographically least ordering reachable by refinement and
/// individualisation. Exponential on very symmetric inputs; meant for the
/// small graphs that appear in round-trip checks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub n: usize,
    pub code: Vec<u32>,
}

pub fn canonical_form(g: &Multigraph) -> CanonicalForm {
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut m = vec![vec![0u32; n]; n];
    for (_, [a, b]) in g.edges() {
        let (a, b) = (index[&a], index[&b]);
        m[a][b] += 1;
        if a != b {
            m[b][a] += 1;
        }
    }
    if n == 0 {
        return CanonicalForm { n, code: Vec::new() };
    }
    // initial cells by (loop count, degree)
    let mut keyed: Vec<((u32, u32), usize)> = (0..n)
        .map(|v| {
            let deg: u32 = (0..n).map(|w| if w == v { 2 * m[v][v] } else { m[v][w] }).sum();
            ((m[v][v], deg), v)
        })
        .collect();
    keyed.sort();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut last = None;
    for (k, v) in keyed {
        if last != Some(k) {
            cells.push(Vec::new());
            last = Some(k);
        }
        cells.last_mut().expect("pushed").push(v);
    }
    let mut best: Option<Vec<u32>> = None;
    search(&m, refine(&m, cells), &mut best);
    CanonicalForm { n, code: best.expect("at least one leaf") }
}

fn refine(m: &[Vec<u32>], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let n = m.len();
    loop {
        let mut cell_of = vec![0usize; n];
        for (i, c) in cells.iter().enumerate() {
            for &v in c {
                cell_of[v] = i;
            }
        }
        let mut next = Vec::with_capacity(cells.len());
        let mut split = false;
        for c in &cells {
            if c.len() == 1 {
                next.push(c.clone());
                continue;
            }
            let mut sig: Vec<(Vec<u32>, usize)> = c
                .iter()
                .map(|&v| {
                    let mut s = vec![0u32; cells.len()];
                    for w in 0..n {
                        s[cell_of[w]] += m[v][w];
                    }
                    (s, v)
                })
                .collect();
            sig.sort();
            let mut start = next.len();
            next.push(vec![sig[0].1]);
            for k in 1..sig.len() {
                if sig[k].0 != sig[k - 1].0 {
                    next.push(Vec::new());
                    split = true;
                    start += 1;
                }
                next[start].push(sig[k].1);
            }
        }
        cells = next;
        if !split {
            return cells;
        }
    }
}

fn search(m: &[Vec<u32>], cells: Vec<Vec<usize>>, best: &mut Option<Vec<u32>>) {
    match cells.iter().position(|c| c.len() > 1) {
        None => {
            let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let mut code = Vec::with_capacity(order.len() * (order.len() + 1) / 2);
            for i in 0..order.len() {
                for j in i..order.len() {
                    code.push(m[order[i]][order[j]]);
                }
            }
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
        }
        Some(i) => {
            for &v in &cells[i] {
                let mut next = cells[..i].to_vec();
                next.push(vec![v]);
                next.push(cells[i].iter().copied().filter(|&w| w != v).collect());
                next.extend_from_slice(&cells[i + 1..]);
                search(m, refine(m, next), best);
            }
        }
    }
}

pub fn isomorphic(a: &Multigraph, b: &Multigraph) -> bool {
    a.vertex_count() == b.vertex_count() && a.edge_count() == b.edge_count() && canonical_form(a) == canonical_form(b)
}

/// Same topological type after suppressing degree-2 vertices.
pub fn homeomorphic(a: &Multigraph, b: &Multigraph) -> bool {
    isomorphic(&smooth(a), &smooth(b))
}
