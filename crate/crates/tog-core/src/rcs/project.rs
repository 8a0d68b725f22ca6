use serde::Serialize;

use super::expand::{ArcKey, LinkKind, NodeId, PartialUnion, Realization, VertexKey};
use super::RcsError;
use crate::graph::{complement_components, EdgeId, PointLocus, Pos, VertexId};

/// Where a cell of the deeper graph lands in the shallower one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Image {
    Vertex {
        vertex: VertexId,
    },
    /// Interior point of an edge.
    Point {
        edge: EdgeId,
        pos: Pos,
    },
    /// The part `[from, to]` of an edge, orientation preserved.
    Arc {
        edge: EdgeId,
        from: Pos,
        to: Pos,
    },
}

impl Image {
    pub fn is_point(&self) -> bool {
        !matches!(self, Image::Arc { .. })
    }

    pub fn as_locus(&self) -> Option<PointLocus> {
        match *self {
            Image::Vertex { vertex } => Some(PointLocus::vertex(vertex)),
            Image::Point { edge, pos } => Some(PointLocus::interior(edge, pos)),
            Image::Arc { .. } => None,
        }
    }
}

/// Cellular map `X_deep → X_shallow` that collapses every subtree hanging off
/// the shallow tree to its attachment point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMap {
    pub vertices: Vec<Image>,
    pub edges: Vec<Image>,
    target_ends: Vec<[VertexId; 2]>,
}

impl CellMap {
    pub fn between(
        deep: &PartialUnion,
        deep_real: &Realization,
        shallow: &PartialUnion,
        shallow_real: &Realization,
    ) -> Result<Self, RcsError> {
        check_nested(deep, shallow)?;
        let cut = shallow.nodes().len() as NodeId;
        let attachment = |mut n: NodeId| -> Image {
            loop {
                let link = deep.nodes()[n as usize].parent.expect("non-root node");
                if link.parent < cut {
                    return match link.kind {
                        LinkKind::Vertex { vertex, .. } => {
                            let key = VertexKey::Original { node: link.parent, vertex };
                            Image::Vertex { vertex: shallow_real.vertex(&key).expect("attachment vertex survives") }
                        }
                        LinkKind::Edge { edge, pos, .. } => {
                            let (id, k) = shallow_real.arc_at(link.parent, edge, pos).expect("arc through site");
                            Image::Point { edge: id, pos: pos.relative_to(k.lo, k.hi) }
                        }
                    };
                }
                n = link.parent;
            }
        };
        let vertices = deep_real
            .vertex_keys
            .iter()
            .map(|key| {
                if key.node() < cut {
                    let v = shallow_real.vertex(key).expect("shallow copy keeps the vertex");
                    Image::Vertex { vertex: v }
                } else {
                    attachment(key.node())
                }
            })
            .collect();
        let edges = deep_real
            .edge_keys
            .iter()
            .map(|k: &ArcKey| {
                if k.node < cut {
                    let (id, s) = shallow_real.arc_at(k.node, k.edge, k.lo.midpoint(k.hi)).expect("covering arc");
                    Image::Arc { edge: id, from: k.lo.relative_to(s.lo, s.hi), to: k.hi.relative_to(s.lo, s.hi) }
                } else {
                    attachment(k.node)
                }
            })
            .collect();
        let target_ends = shallow_real.graph.edges().map(|(_, ends)| ends).collect();
        Ok(CellMap { vertices, edges, target_ends })
    }

    pub fn project(deep: &PartialUnion, shallow: &PartialUnion) -> Result<Self, RcsError> {
        Self::between(deep, &deep.realize(), shallow, &shallow.realize())
    }

    fn point(&self, edge: EdgeId, pos: Pos) -> Image {
        let [t, h] = self.target_ends[edge as usize];
        if pos == Pos::zero() {
            Image::Vertex { vertex: t }
        } else if pos == Pos::one() {
            Image::Vertex { vertex: h }
        } else {
            Image::Point { edge, pos }
        }
    }

    /// Pushes an image of the source of `self` forward along `self`.
    pub fn apply(&self, img: Image) -> Image {
        match img {
            Image::Vertex { vertex } => self.vertices[vertex as usize],
            Image::Point { edge, pos } => match self.edges[edge as usize] {
                Image::Arc { edge: e, from, to } => self.point(e, Pos::lerp(from, to, pos)),
                p => p,
            },
            Image::Arc { edge, from, to } => match self.edges[edge as usize] {
                Image::Arc { edge: e, from: f, to: t } => {
                    Image::Arc { edge: e, from: Pos::lerp(f, t, from), to: Pos::lerp(f, t, to) }
                }
                p => p,
            },
        }
    }

    /// `other ∘ self`, where `self: A → B` and `other: B → C`.
    pub fn then(&self, other: &CellMap) -> CellMap {
        CellMap {
            vertices: self.vertices.iter().map(|&i| other.apply(i)).collect(),
            edges: self.edges.iter().map(|&i| other.apply(i)).collect(),
            target_ends: other.target_ends.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vertices.iter().enumerate().all(|(i, img)| *img == Image::Vertex { vertex: i as VertexId })
            && self
                .edges
                .iter()
                .enumerate()
                .all(|(i, img)| *img == Image::Arc { edge: i as EdgeId, from: Pos::zero(), to: Pos::one() })
    }
}

fn check_nested(deep: &PartialUnion, shallow: &PartialUnion) -> Result<(), RcsError> {
    if deep.rcs() != shallow.rcs() {
        return Err(RcsError::IncompatibleTrees("different connecting systems".into()));
    }
    let (d, s) = (deep.nodes(), shallow.nodes());
    if s.len() > d.len() || d[..s.len()] != *s {
        return Err(RcsError::IncompatibleTrees("shallow tree is not a prefix of the deep one".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointTrace {
    pub depth: usize,
    pub copies: usize,
    /// Tracked point in this approximation; `None` once tracking is lost.
    pub locus: Option<PointLocus>,
    pub degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairTrace {
    pub depth: usize,
    pub complement_components: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointAnalysis {
    pub locus: PointLocus,
    pub traces: Vec<PointTrace>,
    /// Degree shared by every traced depth, if tracking never failed.
    pub stable_degree: Option<usize>,
    pub partner: Option<PointLocus>,
    pub pair: Vec<PairTrace>,
    /// The last two complement counts agree.
    pub pair_stabilized: Option<bool>,
}

/// Follows a point of the root copy through a nested sequence of
/// approximations. A vertex that gets blown up is followed to the unique
/// point of its preimage with the same degree; if there is none, or more
/// than one, tracking stops. Optionally reports complement component counts
/// for a pair of points.
pub fn analyze_point(
    stages: &[PartialUnion],
    locus: PointLocus,
    partner: Option<PointLocus>,
) -> Result<PointAnalysis, RcsError> {
    let Some(first) = stages.first() else {
        return Err(RcsError::Untracked("no approximations given".into()));
    };
    let root = first.nodes()[0].component;
    let base = PartialUnion::init_shared(std::sync::Arc::new(first.rcs().clone()), root, first.config())?;
    let base_real = base.realize();
    let start = |x: PointLocus| -> Result<PointLocus, RcsError> {
        x.check(first.rcs().graph())?;
        let in_root = match x {
            PointLocus::Vertex { vertex } => first.rcs().component_of_vertex(vertex),
            PointLocus::Interior { edge, .. } => first.rcs().component_of_edge(edge),
        };
        if in_root != Some(root) {
            return Err(RcsError::Untracked(format!("{x} is not in the root component")));
        }
        Ok(match x {
            PointLocus::Vertex { vertex } => {
                PointLocus::vertex(base_real.vertex(&VertexKey::Original { node: 0, vertex }).expect("root vertex"))
            }
            PointLocus::Interior { edge, pos } => {
                let (id, k) = base_real.arc_at(0, edge, pos).expect("root edge");
                PointLocus::interior(id, pos.relative_to(k.lo, k.hi))
            }
        })
    };
    let mut cur = Some(start(locus)?);
    let mut cur_other = partner.map(start).transpose()?;
    let (mut prev, mut prev_real) = (base, base_real);
    let mut traces = Vec::new();
    let mut pair = Vec::new();
    for stage in stages {
        let real = stage.realize();
        let map = CellMap::between(stage, &real, &prev, &prev_real)?;
        cur = cur.and_then(|x| lift(&map, &real, &prev_real, x));
        cur_other = cur_other.and_then(|x| lift(&map, &real, &prev_real, x));
        traces.push(PointTrace {
            depth: stage.depth(),
            copies: stage.copy_count(),
            locus: cur,
            degree: cur.and_then(|x| x.degree(&real.graph).ok()),
        });
        if partner.is_some() {
            let count = match (cur, cur_other) {
                (Some(x), Some(y)) if x != y => complement_components(&real.graph, &[x, y]).ok().map(|r| r.count),
                _ => None,
            };
            pair.push(PairTrace { depth: stage.depth(), complement_components: count });
        }
        prev = stage.clone();
        prev_real = real;
    }
    let degrees: Vec<Option<usize>> = traces.iter().map(|t| t.degree).collect();
    let stable_degree = match degrees.first() {
        Some(&Some(d)) if degrees.iter().all(|&x| x == Some(d)) => Some(d),
        _ => None,
    };
    let pair_stabilized = match pair.as_slice() {
        [.., a, b] => Some(a.complement_components.is_some() && a.complement_components == b.complement_components),
        _ => None,
    };
    Ok(PointAnalysis { locus, traces, stable_degree, partner, pair, pair_stabilized })
}

/// Unique preimage of `x` under `map` with the same local degree.
fn lift(map: &CellMap, deep: &Realization, shallow: &Realization, x: PointLocus) -> Option<PointLocus> {
    let want = x.degree(&shallow.graph).ok()?;
    let mut found: Vec<PointLocus> = Vec::new();
    for (v, img) in map.vertices.iter().enumerate() {
        if img.as_locus() == Some(x) && deep.graph.degree(v as VertexId) == want {
            found.push(PointLocus::vertex(v as VertexId));
        }
    }
    if let PointLocus::Interior { edge, pos } = x {
        for (e, img) in map.edges.iter().enumerate() {
            if let Image::Arc { edge: se, from, to } = *img {
                if se == edge && from < pos && pos < to {
                    found.push(PointLocus::interior(e as EdgeId, pos.relative_to(from, to)));
                }
            }
        }
    }
    match found.as_slice() {
        [one] => Some(*one),
        _ => None,
    }
}
