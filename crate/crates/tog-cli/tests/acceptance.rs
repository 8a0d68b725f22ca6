//! Acceptance checks. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any fails or runs over its
//! time limit.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::{IndexedRandom, SliceRandom};
use tog_core::graph::{
    connected_sum, interior_splice, is_two_connected, isomorphic, Branch, EdgeId, LinkMap, Multigraph, OrientedEdge,
    PointLocus, Pos, VertexId,
};
use tog_core::jsj::{golden, synthesize};
use tog_core::rcs::{analyze_point, CellMap, ExpandConfig, GraphicalConnectingSystem, PartialUnion};
use tog_core::twin::{essential_twin, theta_sum_decomposition};
use tog_core::vsystem::ConnectingVSystem;
use tog_core::words::{whitehead_graph, whitehead_v_involution, CyclicWord, WhiteheadGraph};
use tog_testkit::{
    brute_essential_twin, brute_lines, brute_two_connected, petgraph_isomorphic, random_theta_sum,
    random_two_connected, random_vsystem, rng,
};

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn words(list: &[(&str, &str)]) -> Vec<(CyclicWord, String)> {
    list.iter().map(|(w, l)| (CyclicWord::parse(w).unwrap(), l.to_string())).collect()
}

fn k4_whitehead() -> WhiteheadGraph {
    whitehead_graph(2, &words(&[("a", "a"), ("b", "b"), ("abAB", "c")])).unwrap()
}

fn labelled(wg: &WhiteheadGraph, label: &str) -> Vec<EdgeId> {
    wg.labels.iter().filter(|(_, l)| l.label == label).map(|(&e, _)| e).collect()
}

fn both(e: EdgeId) -> [OrientedEdge; 2] {
    [OrientedEdge::forward(e), OrientedEdge::backward(e)]
}

fn full_square(edges: &[EdgeId]) -> BTreeSet<(OrientedEdge, OrientedEdge)> {
    let all: Vec<OrientedEdge> = edges.iter().flat_map(|&e| both(e)).collect();
    all.iter().flat_map(|&x| all.iter().map(move |&y| (x, y))).collect()
}

fn whitehead_golden() -> Check {
    let wg = k4_whitehead();
    let g = &wg.graph;
    let k4 = Multigraph::complete(4);
    ensure(isomorphic(g, &k4) && petgraph_isomorphic(g, &k4), || "not isomorphic to K4".into())?;
    let square = labelled(&wg, "c");
    ensure(square.len() == 4, || format!("{} commutator edges", square.len()))?;
    let mut deg: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &e in &square {
        for v in g.ends(e).unwrap() {
            *deg.entry(v).or_default() += 1;
        }
    }
    let sub = Multigraph::from_edge_list(
        4,
        &square
            .iter()
            .map(|&e| {
                let [a, b] = g.ends(e).unwrap();
                (a, b)
            })
            .collect::<Vec<_>>(),
    );
    ensure(deg.len() == 4 && deg.values().all(|&d| d == 2) && isomorphic(&sub, &Multigraph::cycle(4)), || {
        "commutator edges do not form a 4-cycle".into()
    })?;
    for (l, x) in [("a", 0), ("b", 2)] {
        let es = labelled(&wg, l);
        ensure(es.len() == 1, || format!("{} edges labelled {l}", es.len()))?;
        let mut ends = g.ends(es[0]).unwrap();
        ends.sort();
        // the diagonal joins a letter to its inverse
        ensure(ends == [x, x + 1], || format!("edge {l} joins {ends:?}"))?;
    }
    Ok("K4, square + two diagonals".into())
}

fn g2_golden() -> Check {
    let s = synthesize(&golden("g2").unwrap()).map_err(|e| e.to_string())?;
    let wg = k4_whitehead();
    ensure(s.system.graph() == &wg.graph, || "graph differs from the Whitehead graph".into())?;
    ensure(isomorphic(s.system.graph(), &Multigraph::complete(4)), || "not K4".into())?;
    let mut want = full_square(&labelled(&wg, "c"));
    for l in ["a", "b"] {
        for o in both(labelled(&wg, l)[0]) {
            want.insert((o, o));
        }
    }
    ensure(s.system.econnections == want, || {
        format!("A has {} pairs, expected {}", s.system.econnections.len(), want.len())
    })?;
    ensure(s.system.is_valid(), || "synthesized system is invalid".into())?;
    Ok(format!("K4, |A| = {}", want.len()))
}

fn racg_golden() -> Check {
    let s = synthesize(&golden("racg1").unwrap()).map_err(|e| e.to_string())?;
    let mut sizes: Vec<usize> = s.components.iter().map(|c| c.edges.len()).collect();
    sizes.sort();
    ensure(sizes == [3, 4, 4], || format!("component sizes {sizes:?}"))?;
    for c in &s.components {
        let vs: BTreeSet<VertexId> = c.vertices.iter().copied().collect();
        let sub = s.system.graph().induced(&vs);
        ensure(isomorphic(&sub, &Multigraph::theta(c.edges.len())), || {
            format!("component {:?} is not a θ-graph", c.vertices)
        })?;
    }
    let mut blocks = s.ledger.sizes();
    blocks.sort();
    ensure(blocks == [1, 1, 2, 2, 5], || format!("block sizes {blocks:?}"))?;
    let want: BTreeSet<_> = s.ledger.blocks.iter().flat_map(|b| full_square(&b.edges)).collect();
    ensure(s.system.econnections == want, || "A is not the union of block squares".into())?;
    ensure(s.system.is_valid(), || "synthesized system is invalid".into())?;
    Ok("θ3, θ4, θ4; blocks {1,1,2,2,5}".into())
}

/// A random bijection between the branches at two vertices of equal degree.
fn vertex_link(g1: &Multigraph, v1: VertexId, g2: &Multigraph, v2: VertexId, r: &mut impl rand::Rng) -> LinkMap {
    let b1: Vec<Branch> = g1.links()[&v1].iter().map(|&e| Branch::from(e)).collect();
    let mut b2: Vec<Branch> = g2.links()[&v2].iter().map(|&e| Branch::from(e)).collect();
    b2.shuffle(r);
    b1.into_iter().zip(b2).collect()
}

fn connected_sums() -> Check {
    let mut at_vertices = 0;
    for i in 0..200u64 {
        let mut r = rng(0xC0_5EED + i);
        let g1 = random_two_connected(&mut r, 12);
        let g2 = random_two_connected(&mut r, 12);
        ensure(brute_two_connected(&g1) && brute_two_connected(&g2), || {
            format!("pair {i}: generator gave a bad summand")
        })?;
        // alternate between vertex sums (when degrees allow) and edge splices
        let pick = if i % 2 == 0 {
            let v1: Vec<VertexId> = g1.vertices().filter(|&v| g1.degree(v) >= 3).collect();
            v1.iter().find_map(|&a| g2.vertices().find(|&b| g2.degree(b) == g1.degree(a)).map(|b| (a, b)))
        } else {
            None
        };
        let sum = match pick {
            Some((a, b)) => {
                at_vertices += 1;
                let ell = vertex_link(&g1, a, &g2, b, &mut r);
                connected_sum(&g1, PointLocus::vertex(a), &g2, PointLocus::vertex(b), &ell)
            }
            None => {
                let e1 = *g1.edge_ids().collect::<Vec<_>>().choose(&mut r).unwrap();
                let e2 = *g2.edge_ids().collect::<Vec<_>>().choose(&mut r).unwrap();
                let x1 = PointLocus::interior(e1, Pos::new(1, 3));
                connected_sum(&g1, x1, &g2, PointLocus::midpoint(e2), &interior_splice(e1, e2, i % 4 == 1))
            }
        }
        .map_err(|e| format!("pair {i}: {e}"))?;
        ensure(is_two_connected(&sum.graph) && brute_two_connected(&sum.graph), || {
            format!("pair {i}: sum is not 2-connected")
        })?;
    }
    Ok(format!("200 sums ({at_vertices} at vertices)"))
}

fn theta_round_trip() -> Check {
    for i in 0..100u64 {
        let mut r = rng(0x7E7A + i);
        let count = 2 + (i as usize % 4);
        let (g, mut sizes) = random_theta_sum(&mut r, count, 3..=6);
        let tree = theta_sum_decomposition(&g).map_err(|e| format!("sum {i}: {e}"))?;
        sizes.sort();
        let got = tree.sorted_sizes();
        ensure(got == sizes, || format!("sum {i}: got {got:?}, built from {sizes:?}"))?;
    }
    Ok("100 sums of 2-5 θ-graphs".into())
}

fn k4_not_twin() -> Check {
    let k4 = Multigraph::complete(4);
    for v in k4.vertices() {
        let fast = essential_twin(&k4, v).map_err(|e| e.to_string())?;
        let brute = brute_essential_twin(&k4, v);
        ensure(fast.is_none() && brute.is_none(), || format!("vertex {v}: twin {fast:?} / oracle {brute:?}"))?;
    }
    Ok("no vertex has a twin".into())
}

fn orientability() -> Check {
    let mut nonorientable = 0;
    for i in 0..600u64 {
        let vs = random_vsystem(&mut rng(0x0B17 + i), 8);
        ensure(vs.is_valid(), || format!("system {i} is invalid"))?;
        // the oracle walks orbits by hand and looks for an edge met in both directions
        let by_orbit = brute_lines(&vs).iter().any(|l| !l.1);
        ensure(vs.has_nonorientable_line() == by_orbit, || format!("system {i}: criteria disagree"))?;
        nonorientable += by_orbit as usize;
    }
    Ok(format!("600 systems, {nonorientable} with a non-orientable line"))
}

fn line_census() -> Check {
    for k in 2..=8 {
        let vs = ConnectingVSystem::standard_theta(k);
        let lines = vs.lines();
        ensure(lines.len() == k && lines.iter().all(|l| l.edge_class.len() == 1), || {
            format!("θ{k}: {} lines", lines.len())
        })?;
        ensure(vs.lines_sharing_ends(&lines) == vec![(0..k).collect::<Vec<_>>()], || {
            format!("θ{k}: lines split into several groups")
        })?;
    }
    let vs = whitehead_v_involution(&k4_whitehead()).map_err(|e| e.to_string())?;
    let lines = vs.lines();
    let mut sizes: Vec<usize> = lines.iter().map(|l| l.edge_class.len()).collect();
    sizes.sort();
    ensure(sizes == [1, 1, 4], || format!("K4 edge classes {sizes:?}"))?;
    ensure(lines.iter().all(|l| l.orientable), || "K4 has a non-orientable line".into())?;
    let groups = vs.lines_sharing_ends(&lines);
    ensure(groups.len() == 3 && groups.iter().all(|g| g.len() == 1), || format!("K4 groups {groups:?}"))?;
    Ok("θ2..θ8 and K4".into())
}

fn expansion_coherence() -> Check {
    let rcs = GraphicalConnectingSystem::reflection(Multigraph::theta(3));
    let cfg = ExpandConfig { resolution: 2, ..ExpandConfig::default() };
    let mut pu = PartialUnion::init(rcs, 0, cfg).map_err(|e| e.to_string())?;
    let mut st = vec![pu.clone()];
    for d in 1..=3 {
        pu.expand_to_depth(d).map_err(|e| e.to_string())?;
        st.push(pu.clone());
    }
    for (d, s) in st.iter().enumerate() {
        ensure(is_two_connected(&s.realize().graph), || format!("depth {d} is not 2-connected"))?;
    }
    for i in 0..st.len() {
        for j in 0..i {
            let direct = CellMap::project(&st[i], &st[j]).map_err(|e| e.to_string())?;
            for k in j..=i {
                let via = CellMap::project(&st[i], &st[k]).unwrap().then(&CellMap::project(&st[k], &st[j]).unwrap());
                ensure(direct == via, || format!("projection {i} -> {k} -> {j} differs from {i} -> {j}"))?;
            }
        }
    }
    for v in [0, 1] {
        let a = analyze_point(&st, PointLocus::vertex(v), None).map_err(|e| e.to_string())?;
        ensure(a.traces.len() == 4 && a.traces.iter().all(|t| t.degree == Some(3)), || {
            format!("vertex {v}: {:?}", a.traces)
        })?;
    }
    let mut tracked = 0;
    for e in 0..3 {
        for pos in [Pos::new(1, 5), Pos::new(1, 4), Pos::new(2, 3)] {
            let a = analyze_point(&st, PointLocus::interior(e, pos), None).map_err(|e| e.to_string())?;
            for t in a.traces.iter().filter(|t| t.locus.is_some()) {
                tracked += 1;
                ensure(t.degree == Some(2), || format!("e{e}@{pos} at depth {}: degree {:?}", t.depth, t.degree))?;
            }
        }
    }
    Ok(format!("depths 0-3, copies {}, {tracked} tracked interior points", st[3].copy_count()))
}

fn determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("tog-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let tog = env!("CARGO_BIN_EXE_tog");
    let run = |tag: &str| -> Result<Vec<u8>, String> {
        let sys = dir.join(format!("g2-{tag}.json"));
        let status = Command::new(tog)
            .args(["jsj", "synth", "--golden", "g2", "--out"])
            .arg(&sys)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("jsj synth exited with {status}"))?;
        let out = Command::new(tog)
            .args(["rcs", "expand", "--depth", "2", "--resolution", "2"])
            .arg(&sys)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("rcs expand exited with {}", out.status))?;
        Ok(out.stdout)
    };
    let (a, b) = (run("a")?, run("b")?);
    let _ = std::fs::remove_dir_all(&dir);
    ensure(!a.is_empty() && a == b, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("whitehead golden", 1, whitehead_golden),
        ("jsj golden G2", 1, g2_golden),
        ("jsj golden RACG", 1, racg_golden),
        ("connected sums stay 2-connected", 30, connected_sums),
        ("theta-sum round trip", 60, theta_round_trip),
        ("K4 is not a twin graph", 1, k4_not_twin),
        ("orientability criteria agree", 30, orientability),
        ("line census", 1, line_census),
        ("expansion coherence", 30, expansion_coherence),
        ("determinism", 10, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let took = t.elapsed();
        let limit = Duration::from_secs(*limit);
        let (ok, detail) = match result {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over time limit")),
            Err(e) => (false, e),
        };
        failed += !ok as usize;
        println!(
            "{} {:>2} {:<34} {:>8.3}s / {:>2}s  {}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            name,
            took.as_secs_f64(),
            limit.as_secs(),
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
