//! Synthesis of the connecting system of a group from combinatorial data of
//! its reduced JSJ splitting: flexible orbits, θ-type vertices and rigid
//! cluster factors given as free factors with peripheral words.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Multigraph, OrientedEdge, VertexId};
use crate::rcs::GraphicalConnectingSystem;
use crate::vsystem::{ConnectingVSystem, Violation, ViolationCode};
use crate::words::{check_rigidity_proxy, extended_whitehead_graph, CyclicWord, PeripheralSpec, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsjError {
    #[error("flexible orbit {0} is declared twice")]
    DuplicateOrbit(String),
    #[error("flexible orbit {0} is never referenced")]
    OrbitUnreferenced(String),
    #[error("unknown flexible orbit {0}")]
    UnknownOrbit(String),
    #[error("orbit {0} is non-orientable but a sharp orientation was given")]
    SharpOnNonOrientable(String),
    #[error("θ representative {rep} needs k >= 3, got {k}")]
    ThetaTooSmall { rep: usize, k: usize },
    #[error("representative {rep}: expected {expected} edge slots, got {got}")]
    SlotCount { rep: usize, expected: usize, got: usize },
    #[error("representative {rep}: {source}")]
    Word { rep: usize, source: WordError },
    #[error("Whitehead graph of representative {0} is not 2-connected")]
    WhiteheadNotTwoConnected(usize),
    #[error("packet of {size} slots of {label} on orbit {orbit} must have even size")]
    OddPacketInMixedOrientationCase { label: String, orbit: String, size: usize },
    #[error("synthesized system is not transitive")]
    TransitivityFailure,
    #[error("synthesized system is invalid: {0:?}")]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sharp {
    Forward,
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlexibleOrbit {
    pub id: String,
    pub orientable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub orbit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharp: Option<Sharp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Peripheral {
    pub word: String,
    pub label: String,
    pub multiplicity: u32,
    /// Orientability of the edge group. Packet parity is only checked when
    /// this is known to be orientable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientable: Option<bool>,
    /// One slot per `(ξ, j)`, `j = 1..multiplicity-1`.
    pub slots: Vec<Slot>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rep {
    V2 { k: usize, edges: Vec<Slot> },
    Rigid { rank: usize, peripherals: Vec<Peripheral> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsjInput {
    #[serde(default)]
    pub schema: Option<String>,
    pub flexible_orbits: Vec<FlexibleOrbit>,
    pub reps: Vec<Rep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub orbit: String,
    pub orientable: bool,
    pub edges: Vec<EdgeId>,
    /// `ε#` for each edge, orientable orbits only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharp: Option<Vec<OrientedEdge>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BlockLedger {
    pub blocks: Vec<Block>,
}

impl BlockLedger {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.edges.len()).collect()
    }

    pub fn block_of(&self, e: EdgeId) -> Option<&Block> {
        self.blocks.iter().find(|b| b.edges.contains(&e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Theta,
    Whitehead,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentInfo {
    pub rep: usize,
    pub kind: ComponentKind,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Packet {
    pub orbit: String,
    pub slots: Vec<u32>,
    pub edges: Vec<EdgeId>,
    /// Orientable orbit and all slots carry the same sharp orientation.
    pub uniform_sharp: Option<bool>,
}

/// Bunch of a rigid cluster: the copies replacing one Whitehead edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bunch {
    pub rep: usize,
    pub label: String,
    pub position: usize,
    pub packets: Vec<Packet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synthesis {
    pub system: GraphicalConnectingSystem,
    pub ledger: BlockLedger,
    pub components: Vec<ComponentInfo>,
    pub bunches: Vec<Bunch>,
    /// Edge of the synthesized graph for each slot, in input order:
    /// `(rep, peripheral or 0, slot index)`.
    pub slot_edges: BTreeMap<(usize, usize, usize), Vec<EdgeId>>,
    pub warnings: Vec<String>,
}

struct SlotUse<'a> {
    edge: EdgeId,
    slot: &'a Slot,
    /// reference orientation is the order-induced one for `Forward`
    reference: OrientedEdge,
}

pub fn synthesize(input: &JsjInput) -> Result<Synthesis, JsjError> {
    let mut orbits: BTreeMap<&str, bool> = BTreeMap::new();
    for o in &input.flexible_orbits {
        if orbits.insert(&o.id, o.orientable).is_some() {
            return Err(JsjError::DuplicateOrbit(o.id.clone()));
        }
    }
    let mut warnings = Vec::new();
    let mut system: Option<ConnectingVSystem> = None;
    let mut uses: Vec<SlotUse> = Vec::new();
    let mut components = Vec::new();
    let mut bunches = Vec::new();
    let mut slot_edges: BTreeMap<(usize, usize, usize), Vec<EdgeId>> = BTreeMap::new();

    for (ri, rep) in input.reps.iter().enumerate() {
        let (part, kind) = match rep {
            Rep::V2 { k, edges } => {
                if *k < 3 {
                    return Err(JsjError::ThetaTooSmall { rep: ri, k: *k });
                }
                if edges.len() != *k {
                    return Err(JsjError::SlotCount { rep: ri, expected: *k, got: edges.len() });
                }
                (ConnectingVSystem::standard_theta(*k), ComponentKind::Theta)
            }
            Rep::Rigid { rank, peripherals } => {
                let mut specs = Vec::new();
                for p in peripherals {
                    let word = CyclicWord::parse(&p.word).map_err(|source| JsjError::Word { rep: ri, source })?;
                    let expected = p.multiplicity.saturating_sub(1) as usize;
                    if p.slots.len() != expected {
                        return Err(JsjError::SlotCount { rep: ri, expected, got: p.slots.len() });
                    }
                    specs.push(PeripheralSpec::new(word, p.label.clone(), p.multiplicity));
                }
                let (wg, vs) =
                    extended_whitehead_graph(*rank, &specs).map_err(|source| JsjError::Word { rep: ri, source })?;
                if !check_rigidity_proxy(&wg) {
                    return Err(JsjError::WhiteheadNotTwoConnected(ri));
                }
                (vs, ComponentKind::Whitehead)
            }
        };
        let (merged, dv, de) = match &system {
            None => (part.clone(), 0, 0),
            Some(s) => s.disjoint_union(&part),
        };
        components.push(ComponentInfo {
            rep: ri,
            kind,
            vertices: part.graph.vertices().map(|v| v + dv).collect(),
            edges: part.graph.edge_ids().map(|e| e + de).collect(),
        });
        match rep {
            Rep::V2 { edges, .. } => {
                for (i, slot) in edges.iter().enumerate() {
                    let e = i as EdgeId + de;
                    uses.push(SlotUse { edge: e, slot, reference: OrientedEdge::forward(e) });
                    slot_edges.insert((ri, 0, i), vec![e]);
                }
            }
            Rep::Rigid { rank, peripherals } => {
                let specs: Vec<PeripheralSpec> = peripherals
                    .iter()
                    .map(|p| {
                        PeripheralSpec::new(
                            CyclicWord::parse(&p.word).expect("parsed above"),
                            p.label.clone(),
                            p.multiplicity,
                        )
                    })
                    .collect();
                let (wg, _) = extended_whitehead_graph(*rank, &specs).expect("built above");
                let mut by_bunch: BTreeMap<(usize, usize), Vec<(u32, EdgeId)>> = BTreeMap::new();
                for (&e, label) in &wg.labels {
                    let occ = wg.occurrences[&e];
                    let slot = &peripherals[label.word].slots[label.copy as usize - 1];
                    uses.push(SlotUse { edge: e + de, slot, reference: OrientedEdge::forward(e + de) });
                    slot_edges.entry((ri, label.word, label.copy as usize - 1)).or_default().push(e + de);
                    by_bunch.entry((label.word, occ.position)).or_default().push((label.copy, e + de));
                }
                for ((wi, position), members) in by_bunch {
                    let p = &peripherals[wi];
                    let mut packets: BTreeMap<&str, Packet> = BTreeMap::new();
                    for (copy, e) in members {
                        let slot = &p.slots[copy as usize - 1];
                        let entry = packets.entry(&slot.orbit).or_insert_with(|| Packet {
                            orbit: slot.orbit.clone(),
                            slots: Vec::new(),
                            edges: Vec::new(),
                            uniform_sharp: None,
                        });
                        entry.slots.push(copy);
                        entry.edges.push(e);
                    }
                    for packet in packets.values_mut() {
                        let Some(&orientable) = orbits.get(packet.orbit.as_str()) else {
                            return Err(JsjError::UnknownOrbit(packet.orbit.clone()));
                        };
                        if orientable {
                            let sharps: BTreeSet<Sharp> = packet
                                .slots
                                .iter()
                                .map(|&j| p.slots[j as usize - 1].sharp.unwrap_or(Sharp::Forward))
                                .collect();
                            packet.uniform_sharp = Some(sharps.len() == 1);
                        } else if p.orientable == Some(true) && packet.slots.len() % 2 == 1 {
                            return Err(JsjError::OddPacketInMixedOrientationCase {
                                label: p.label.clone(),
                                orbit: packet.orbit.clone(),
                                size: packet.slots.len(),
                            });
                        }
                    }
                    bunches.push(Bunch {
                        rep: ri,
                        label: p.label.clone(),
                        position,
                        packets: packets.into_values().collect(),
                    });
                }
            }
        }
        system = Some(merged);
    }
    let vsys = system.unwrap_or_else(|| ConnectingVSystem::new(Multigraph::new(), BTreeMap::new(), BTreeMap::new()));

    let mut blocks: BTreeMap<&str, (Vec<EdgeId>, Vec<OrientedEdge>)> =
        orbits.keys().map(|&id| (id, (Vec::new(), Vec::new()))).collect();
    for u in &uses {
        let id = u.slot.orbit.as_str();
        let Some(&orientable) = orbits.get(id) else {
            return Err(JsjError::UnknownOrbit(id.to_string()));
        };
        let sharp = match (orientable, u.slot.sharp) {
            (false, Some(_)) => return Err(JsjError::SharpOnNonOrientable(id.to_string())),
            (false, None) => None,
            (true, Some(s)) => Some(s),
            (true, None) => {
                warnings.push(format!(
                    "edge {}: no sharp orientation for orientable orbit {id}, using the reference orientation; \
                     another choice gives an isomorphic system",
                    u.edge
                ));
                Some(Sharp::Forward)
            }
        };
        let block = blocks.get_mut(id).expect("orbit known");
        block.0.push(u.edge);
        if let Some(s) = sharp {
            block.1.push(match s {
                Sharp::Forward => u.reference,
                Sharp::Reverse => u.reference.bar(),
            });
        }
    }
    let mut econnections = BTreeSet::new();
    let mut ledger = BlockLedger::default();
    for (id, (mut edges, mut sharp)) in blocks {
        if edges.is_empty() {
            return Err(JsjError::OrbitUnreferenced(id.to_string()));
        }
        let orientable = orbits[id];
        edges.sort_unstable();
        sharp.sort_unstable();
        if orientable {
            // closure of E# x E# under the two involutions
            for &o1 in &sharp {
                for &o2 in &sharp {
                    econnections.insert((o1, o2));
                    econnections.insert((o1.bar(), o2.bar()));
                }
            }
        } else {
            let all: Vec<OrientedEdge> =
                edges.iter().flat_map(|&e| [OrientedEdge::forward(e), OrientedEdge::backward(e)]).collect();
            for &o1 in &all {
                for &o2 in &all {
                    econnections.insert((o1, o2));
                }
            }
        }
        ledger.blocks.push(Block { orbit: id.to_string(), orientable, edges, sharp: orientable.then_some(sharp) });
    }

    let system = GraphicalConnectingSystem::new(vsys, econnections);
    let violations = system.validate();
    if violations.iter().any(|v| v.code == ViolationCode::NotTransitive) {
        return Err(JsjError::TransitivityFailure);
    }
    if !violations.is_empty() {
        return Err(JsjError::Invalid(violations));
    }
    Ok(Synthesis { system, ledger, components, bunches, slot_edges, warnings })
}

/// Bunches of rigid cluster `rep` carrying `label`.
pub fn packets<'a>(synthesis: &'a Synthesis, rep: usize, label: &str) -> Vec<&'a Bunch> {
    synthesis.bunches.iter().filter(|b| b.rep == rep && b.label == label).collect()
}

fn slot(orbit: &str, sharp: Option<Sharp>) -> Slot {
    Slot { orbit: orbit.to_string(), sharp }
}

/// Built-in fixtures for the two worked examples.
pub fn golden(name: &str) -> Option<JsjInput> {
    match name {
        // one rigid cluster, free of rank 2 with peripheral words a, b and
        // the commutator; the two generator orbits are orientable, the
        // commutator orbit is not
        "g2" => {
            let periph = |word: &str, label: &str, orbit: &str, orientable: bool| Peripheral {
                word: word.to_string(),
                label: label.to_string(),
                multiplicity: 2,
                orientable: orientable.then_some(true),
                slots: vec![slot(orbit, orientable.then_some(Sharp::Forward))],
            };
            Some(JsjInput {
                schema: Some(crate::SCHEMA.to_string()),
                flexible_orbits: vec![
                    FlexibleOrbit { id: "x_a".into(), orientable: true },
                    FlexibleOrbit { id: "x_b".into(), orientable: true },
                    FlexibleOrbit { id: "x_c".into(), orientable: false },
                ],
                reps: vec![Rep::Rigid {
                    rank: 2,
                    peripherals: vec![
                        periph("a", "a", "x_a", true),
                        periph("b", "b", "x_b", true),
                        periph("abAB", "c", "x_c", false),
                    ],
                }],
            })
        }
        // three θ-vertices with edges a b c / d e f g / h i j k, all five
        // flexible orbits non-orientable
        "racg1" => {
            let theta =
                |orbits: &[&str]| Rep::V2 { k: orbits.len(), edges: orbits.iter().map(|o| slot(o, None)).collect() };
            let ids = ["y_a", "y_b", "y_cdehi", "y_fg", "y_jk"];
            Some(JsjInput {
                schema: Some(crate::SCHEMA.to_string()),
                flexible_orbits: ids.iter().map(|id| FlexibleOrbit { id: id.to_string(), orientable: false }).collect(),
                reps: vec![
                    theta(&["y_a", "y_b", "y_cdehi"]),
                    theta(&["y_cdehi", "y_cdehi", "y_fg", "y_fg"]),
                    theta(&["y_cdehi", "y_cdehi", "y_jk", "y_jk"]),
                ],
            })
        }
        _ => None,
    }
}
