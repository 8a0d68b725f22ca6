use std::collections::BTreeSet;

use proptest::prelude::*;
use tog_core::graph::*;
use tog_core::twin::*;
use tog_core::Execution;
use tog_testkit::{brute_essential_twin, complement_count, random_theta_sum, random_two_connected, rng};

fn theta_sum(a: usize, b: usize) -> Multigraph {
    let (ta, tb) = (Multigraph::theta(a), Multigraph::theta(b));
    let x = PointLocus::midpoint(0);
    connected_sum(&ta, x, &tb, x, &interior_splice(0, 0, true)).unwrap().graph
}

fn essential(g: &Multigraph) -> Vec<VertexId> {
    g.vertices().filter(|&v| g.degree(v) >= 3).collect()
}

#[test]
fn twin_pair_examples() {
    let t = Multigraph::theta(3);
    let r = is_twin_pair(&t, PointLocus::vertex(0), PointLocus::vertex(1)).unwrap();
    assert!(r.is_twin);
    assert_eq!(r.common_degree, Some(3));
    assert_eq!(r.component_count, 3);

    let same_edge = is_twin_pair(&t, PointLocus::interior(1, Pos::new(1, 3)), PointLocus::interior(1, Pos::new(2, 3)));
    assert!(same_edge.unwrap().is_twin);

    let k4 = Multigraph::complete(4);
    let r = is_twin_pair(&k4, PointLocus::vertex(0), PointLocus::vertex(3)).unwrap();
    assert!(!r.is_twin);
    assert_eq!(r.common_degree, Some(3));
    assert_eq!(r.component_count, 2);
}

#[test]
fn twin_pair_errors() {
    let t = Multigraph::theta(3);
    assert_eq!(is_twin_pair(&t, PointLocus::vertex(0), PointLocus::vertex(0)), Err(TwinError::SameLocus));
    let path = Multigraph::from_edge_list(3, &[(0, 1), (1, 2)]);
    assert_eq!(is_twin_pair(&path, PointLocus::vertex(0), PointLocus::vertex(2)), Err(TwinError::NotTwoConnected));
}

#[test]
fn essential_twin_examples() {
    assert_eq!(essential_twin(&Multigraph::theta(4), 0), Ok(Some(1)));
    let k4 = Multigraph::complete(4);
    for v in k4.vertices() {
        assert_eq!(essential_twin(&k4, v), Ok(None));
        assert_eq!(brute_essential_twin(&k4, v), None);
    }
    assert!(matches!(essential_twin(&Multigraph::cycle(3), 0), Err(TwinError::NotEssential { degree: 2, .. })));
}

#[test]
fn twins_stay_inside_their_summand() {
    let g = theta_sum(3, 3);
    // the left summand keeps ids 0 and 1
    assert_eq!(essential_twin(&g, 0), Ok(Some(1)));
    assert_eq!(essential_twin(&g, 1), Ok(Some(0)));
    for v in essential(&g) {
        let twin = essential_twin(&g, v).unwrap().unwrap();
        assert_eq!(Some(twin), brute_essential_twin(&g, v));
    }
}

#[test]
fn twin_graph_examples() {
    for k in 2..7 {
        assert!(is_twin_graph(&Multigraph::theta(k)));
    }
    assert!(!is_twin_graph(&Multigraph::complete(4)));
    assert!(is_twin_graph(&Multigraph::cycle(2)));
    assert!(!is_twin_graph(&Multigraph::from_edge_list(2, &[(0, 1)])));
}

#[test]
fn decompose_single_theta() {
    let tree = theta_sum_decomposition(&Multigraph::theta(5)).unwrap();
    assert_eq!(tree.sizes(), vec![5]);
    assert!(tree.gluings.is_empty());
}

#[test]
fn decompose_theta3_theta4() {
    let g = theta_sum(3, 4);
    let (tree, replay_ok) = verified_decomposition(&g).unwrap();
    assert_eq!(tree.sorted_sizes(), vec![3, 4]);
    assert_eq!(tree.gluings.len(), 1);
    assert!(replay_ok);
    let census: Vec<usize> = {
        let mut d: Vec<usize> = essential(&g).into_iter().map(|v| g.degree(v)).collect();
        d.sort();
        d
    };
    assert_eq!(census, vec![3, 3, 4, 4]);
}

#[test]
fn decompose_errors() {
    assert_eq!(theta_sum_decomposition(&Multigraph::complete(4)).unwrap_err(), TwinError::NotTwinGraph);
    assert_eq!(theta_sum_decomposition(&Multigraph::cycle(4)).unwrap_err(), TwinError::IsCircle);
}

/// Edge of the blow-up containing the point at 1/3 of `e`. Not the midpoint:
/// an isolated arc is split there by its auxiliary vertex.
fn arc_through_third(r: &BlowUpResult, g: &Multigraph, e: EdgeId) -> EdgeId {
    let p = Pos::new(1, 3);
    r.graph
        .edge_ids()
        .find(|f| match r.arcs.get(f) {
            Some(o) => o.edge == e && o.from < p && p < o.to,
            None => *f == e && g.has_edge(e),
        })
        .expect("point survives")
}

fn separated(g: &Multigraph, pair: [VertexId; 2], e1: EdgeId, e2: EdgeId) -> bool {
    let r = blow_up(g, &[PointLocus::vertex(pair[0]), PointLocus::vertex(pair[1])]).unwrap();
    let comps = components(&r.graph);
    let comp = |e: EdgeId| {
        let v = r.graph.ends(arc_through_third(&r, g, e)).unwrap()[0];
        comps.iter().position(|c| c.contains(&v)).unwrap()
    };
    comp(e1) != comp(e2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn twin_report_is_definitional(seed in any::<u64>(), i in 0usize..40, j in 0usize..40) {
        let g = random_two_connected(&mut rng(seed), 7);
        let loci = representative_loci(&g);
        let (x, y) = (loci[i % loci.len()], loci[j % loci.len()]);
        prop_assume!(x != y);
        let r = is_twin_pair(&g, x, y).unwrap();
        let (dx, dy) = (x.degree(&g).unwrap(), y.degree(&g).unwrap());
        let count = complement_count(&g, &[x, y]);
        prop_assert_eq!(r.component_count, count);
        prop_assert_eq!(r.is_twin, dx == dy && dx == count);
    }

    #[test]
    fn essential_twin_matches_scan(seed in any::<u64>()) {
        let g = random_two_connected(&mut rng(seed), 8);
        for v in essential(&g) {
            prop_assert_eq!(essential_twin(&g, v).unwrap(), brute_essential_twin(&g, v));
        }
        let brute = essential(&g).into_iter().all(|v| brute_essential_twin(&g, v).is_some());
        prop_assert_eq!(is_twin_graph(&g), brute);
        prop_assert_eq!(is_twin_graph_with(&g, Execution::Sequential), is_twin_graph_with(&g, Execution::Parallel));
    }

    #[test]
    fn theta_sums_round_trip(seed in any::<u64>(), count in 1usize..=4) {
        let (g, sizes) = random_theta_sum(&mut rng(seed), count, 3..=5);
        prop_assert!(is_twin_graph(&g));
        let (tree, ok) = verified_decomposition(&g).unwrap();
        let mut want = sizes.clone();
        want.sort();
        prop_assert_eq!(tree.sorted_sizes(), want);
        prop_assert!(ok);
    }

    #[test]
    fn twins_persist_under_distant_sums(s1 in any::<u64>(), s2 in any::<u64>(), i in 0usize..32, j in 0usize..32) {
        let g1 = random_two_connected(&mut rng(s1), 6);
        let g2 = random_two_connected(&mut rng(s2), 6);
        let e1 = g1.edge_ids().nth(i % g1.edge_count()).unwrap();
        let e2 = g2.edge_ids().nth(j % g2.edge_count()).unwrap();
        let sum = connected_sum(&g1, PointLocus::midpoint(e1), &g2, PointLocus::midpoint(e2), &interior_splice(e1, e2, true)).unwrap();
        for x in essential(&g1) {
            if let Some(y) = essential_twin(&g1, x).unwrap() {
                prop_assert_eq!(essential_twin(&sum.graph, x).unwrap(), Some(y));
            }
        }
    }

    #[test]
    fn sums_of_twin_graphs_are_twin_graphs(s1 in any::<u64>(), s2 in any::<u64>(), flip in any::<bool>()) {
        let (g1, _) = random_theta_sum(&mut rng(s1), 2, 3..=4);
        let (g2, _) = random_theta_sum(&mut rng(s2), 2, 3..=4);
        let e1 = g1.edge_ids().next().unwrap();
        let e2 = g2.edge_ids().last().unwrap();
        let sum = connected_sum(&g1, PointLocus::midpoint(e1), &g2, PointLocus::midpoint(e2), &interior_splice(e1, e2, flip)).unwrap();
        prop_assert!(is_twin_graph(&sum.graph));
    }
}

/// Exhaustive over edge-midpoint pairs: non-twin points with connected
/// complement are split apart by some essential twin pair.
#[test]
fn non_twin_points_are_separated() {
    for seed in 0..40 {
        let count = 2 + (seed as usize % 4);
        let (g, _) = random_theta_sum(&mut rng(seed), count, 3..=4);
        let pairs: BTreeSet<[VertexId; 2]> = essential(&g)
            .into_iter()
            .filter_map(|x| essential_twin(&g, x).unwrap().map(|y| [x.min(y), x.max(y)]))
            .collect();
        let edges: Vec<EdgeId> = g.edge_ids().collect();
        for (a, &e1) in edges.iter().enumerate() {
            for &e2 in &edges[a + 1..] {
                let (x, y) = (PointLocus::midpoint(e1), PointLocus::midpoint(e2));
                if complement_count(&g, &[x, y]) != 1 {
                    continue;
                }
                assert!(
                    pairs.iter().any(|&p| separated(&g, p, e1, e2)),
                    "seed {seed}: edges {e1} and {e2} not separated"
                );
            }
        }
    }
}
