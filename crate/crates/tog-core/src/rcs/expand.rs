use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use super::schedule::{schedule_arc, schedule_sites};
use super::{GraphicalConnectingSystem, RcsError};
use crate::exec::Execution;
use crate::graph::{EdgeEnd, EdgeId, Multigraph, OrientedEdge, Pos, Side, VertexId};

pub type NodeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SiteKind {
    /// Vertex site at `vertex`; the copy glued here is attached at `partner = a(vertex)`.
    V { vertex: VertexId, partner: VertexId },
    /// Interior site on `edge`, position along its reference orientation.
    E { edge: EdgeId, pos: Pos, partner: OrientedEdge },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Site {
    pub node: NodeId,
    #[serde(flatten)]
    pub kind: SiteKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LinkKind {
    Vertex {
        vertex: VertexId,
        partner: VertexId,
    },
    /// The child is glued at `partner_pos` on `|partner|`.
    Edge {
        edge: EdgeId,
        pos: Pos,
        partner: OrientedEdge,
        partner_pos: Pos,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Link {
    pub parent: NodeId,
    #[serde(flatten)]
    pub kind: LinkKind,
}

impl Link {
    fn from_site(s: &Site) -> Link {
        let kind = match s.kind {
            SiteKind::V { vertex, partner } => LinkKind::Vertex { vertex, partner },
            SiteKind::E { edge, pos, partner } => LinkKind::Edge { edge, pos, partner, partner_pos: Pos::half() },
        };
        Link { parent: s.node, kind }
    }
}

/// One copy of a component in the finite subtree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: NodeId,
    pub component: usize,
    pub parent: Option<Link>,
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpandConfig {
    pub resolution: usize,
    pub cap: usize,
    pub exec: Execution,
}

impl Default for ExpandConfig {
    fn default() -> Self {
        ExpandConfig { resolution: 2, cap: 10_000, exec: Execution::Sequential }
    }
}

/// A finite partial union: the tree of glued copies and its frontier of
/// unexpanded sites. The graph itself is produced by [`PartialUnion::realize`].
#[derive(Clone, Debug)]
pub struct PartialUnion {
    rcs: Arc<GraphicalConnectingSystem>,
    config: ExpandConfig,
    nodes: Vec<Node>,
    frontier: BTreeSet<Site>,
    warnings: BTreeSet<String>,
    comp_vertices: Vec<Vec<VertexId>>,
    comp_edges: Vec<Vec<EdgeId>>,
    links: BTreeMap<VertexId, Vec<EdgeEnd>>,
}

impl PartialUnion {
    pub fn init(rcs: GraphicalConnectingSystem, root: usize, config: ExpandConfig) -> Result<Self, RcsError> {
        Self::init_shared(Arc::new(rcs), root, config)
    }

    pub fn init_shared(
        rcs: Arc<GraphicalConnectingSystem>,
        root: usize,
        config: ExpandConfig,
    ) -> Result<Self, RcsError> {
        let violations = rcs.validate();
        if !violations.is_empty() {
            return Err(RcsError::Invalid(violations));
        }
        if root >= rcs.component_count() {
            return Err(RcsError::BadComponent(root));
        }
        if config.resolution == 0 {
            return Err(RcsError::ZeroResolution);
        }
        if config.cap == 0 {
            return Err(RcsError::CapExceeded { cap: 0 });
        }
        let comp_vertices = rcs.components().to_vec();
        let mut comp_edges = vec![Vec::new(); comp_vertices.len()];
        for e in rcs.graph().edge_ids() {
            comp_edges[rcs.component_of_edge(e).expect("edge endpoints exist")].push(e);
        }
        let links = rcs.graph().links();
        let mut pu = PartialUnion {
            rcs,
            config,
            nodes: Vec::new(),
            frontier: BTreeSet::new(),
            warnings: BTreeSet::new(),
            comp_vertices,
            comp_edges,
            links,
        };
        let (sites, warnings) = pu.fresh_sites(root, None)?;
        pu.push_node(root, None, sites, warnings);
        Ok(pu)
    }

    pub fn rcs(&self) -> &GraphicalConnectingSystem {
        &self.rcs
    }

    pub fn config(&self) -> ExpandConfig {
        self.config
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn frontier(&self) -> &BTreeSet<Site> {
        &self.frontier
    }

    pub fn warnings(&self) -> impl Iterator<Item = &str> {
        self.warnings.iter().map(String::as_str)
    }

    pub fn copy_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Sites of a new copy of component `j`: every vertex except the one it
    /// is glued at, and `r` scheduled points per edge (per arc on the edge
    /// it is glued along).
    fn fresh_sites(&self, j: usize, link: Option<&LinkKind>) -> Result<(Vec<SiteKind>, Vec<String>), RcsError> {
        let r = self.config.resolution;
        let mut sites = Vec::new();
        let mut warnings = Vec::new();
        let glue_vertex = match link {
            Some(LinkKind::Vertex { partner, .. }) => Some(*partner),
            _ => None,
        };
        let glue_edge = match link {
            Some(LinkKind::Edge { partner, partner_pos, .. }) => Some((partner.edge, *partner_pos)),
            _ => None,
        };
        for &v in &self.comp_vertices[j] {
            if Some(v) != glue_vertex {
                let partner = self.rcs.vsys.a[&v];
                sites.push(SiteKind::V { vertex: v, partner });
            }
        }
        for &e in &self.comp_edges[j] {
            let scheduled = match glue_edge {
                Some((ge, at)) if ge == e => {
                    let mut s = schedule_arc(&self.rcs, e, Pos::zero(), at, r, 0)?;
                    s.extend(schedule_arc(&self.rcs, e, at, Pos::one(), r, r)?);
                    s
                }
                _ => {
                    let s = schedule_sites(&self.rcs, e, r)?;
                    warnings.extend(s.warning);
                    s.sites
                }
            };
            sites.extend(scheduled.into_iter().map(|s| SiteKind::E { edge: e, pos: s.pos, partner: s.partner }));
        }
        Ok((sites, warnings))
    }

    fn push_node(
        &mut self,
        component: usize,
        parent: Option<Link>,
        sites: Vec<SiteKind>,
        warnings: Vec<String>,
    ) -> NodeId {
        let id = self.nodes.len() as NodeId;
        let depth = parent.map_or(0, |l| self.nodes[l.parent as usize].depth + 1);
        self.nodes.push(Node { id, component, parent, depth });
        self.frontier.extend(sites.into_iter().map(|kind| Site { node: id, kind }));
        self.warnings.extend(warnings);
        id
    }

    fn child_of(&self, s: &Site) -> Result<(usize, Link, Vec<SiteKind>, Vec<String>), RcsError> {
        let link = Link::from_site(s);
        let component = match s.kind {
            SiteKind::V { partner, .. } => self.rcs.component_of_vertex(partner),
            SiteKind::E { partner, .. } => self.rcs.component_of_edge(partner.edge),
        }
        .expect("validated system");
        let (sites, warnings) = self.fresh_sites(component, Some(&link.kind))?;
        Ok((component, link, sites, warnings))
    }

    /// Glues a fresh copy of the partner component at `s`.
    pub fn expand_site(&mut self, s: &Site) -> Result<NodeId, RcsError> {
        if !self.frontier.contains(s) {
            return Err(RcsError::StaleSite);
        }
        if self.nodes.len() >= self.config.cap {
            return Err(RcsError::CapExceeded { cap: self.config.cap });
        }
        let (component, link, sites, warnings) = self.child_of(s)?;
        self.frontier.remove(s);
        Ok(self.push_node(component, Some(link), sites, warnings))
    }

    /// Breadth-first: expands, level by level, every frontier site whose copy
    /// sits at depth `< d`. On a cap error the state is left at the last
    /// complete level.
    pub fn expand_to_depth(&mut self, d: usize) -> Result<(), RcsError> {
        loop {
            let depth_of = |s: &Site| self.nodes[s.node as usize].depth;
            let Some(level) = self.frontier.iter().map(depth_of).filter(|&k| k < d).min() else {
                return Ok(());
            };
            let batch: Vec<Site> = self.frontier.iter().filter(|s| depth_of(s) == level).copied().collect();
            if self.nodes.len() + batch.len() > self.config.cap {
                return Err(RcsError::CapExceeded { cap: self.config.cap });
            }
            let children = self.config.exec.map(&batch, |s| self.child_of(s));
            let children = children.into_iter().collect::<Result<Vec<_>, _>>()?;
            for (s, (component, link, sites, warnings)) in batch.iter().zip(children) {
                self.frontier.remove(s);
                self.push_node(component, Some(link), sites, warnings);
            }
        }
    }

    fn children(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for n in &self.nodes {
            if let Some(l) = n.parent {
                out[l.parent as usize].push(n.id);
            }
        }
        out
    }

    fn link_index(&self, v: VertexId, p: EdgeEnd) -> u32 {
        self.links[&v].iter().position(|&q| q == p).expect("end sits at vertex") as u32
    }

    /// Vertices and arcs contributed by one copy, as provenance keys.
    fn node_cells(&self, id: NodeId, children: &[NodeId]) -> (Vec<VertexKey>, Vec<(ArcKey, VertexKey, VertexKey)>) {
        let node = self.nodes[id as usize];
        let g = self.rcs.graph();
        // vertex -> how its ends resolve to junctions
        let mut blown: BTreeMap<VertexId, Box<dyn Fn(EdgeEnd) -> VertexKey + '_>> = BTreeMap::new();
        let mut cuts: BTreeMap<EdgeId, Vec<(Pos, VertexKey, VertexKey)>> = BTreeMap::new();
        if let Some(link) = node.parent {
            match link.kind {
                LinkKind::Vertex { vertex, partner } => {
                    let f = move |p: EdgeEnd| VertexKey::Junction {
                        link: id,
                        k: self.link_index(vertex, self.rcs.vsys.alpha[&p]),
                    };
                    blown.insert(partner, Box::new(f));
                }
                LinkKind::Edge { partner, partner_pos, .. } => {
                    let (j0, j1) = (VertexKey::Junction { link: id, k: 0 }, VertexKey::Junction { link: id, k: 1 });
                    let (below, above) = if partner.is_forward() { (j0, j1) } else { (j1, j0) };
                    cuts.entry(partner.edge).or_default().push((partner_pos, below, above));
                }
            }
        }
        for &c in children {
            let link = self.nodes[c as usize].parent.expect("child has a parent");
            match link.kind {
                LinkKind::Vertex { vertex, .. } => {
                    let f = move |p: EdgeEnd| VertexKey::Junction { link: c, k: self.link_index(vertex, p) };
                    blown.insert(vertex, Box::new(f));
                }
                LinkKind::Edge { edge, pos, .. } => {
                    let (j0, j1) = (VertexKey::Junction { link: c, k: 0 }, VertexKey::Junction { link: c, k: 1 });
                    cuts.entry(edge).or_default().push((pos, j0, j1));
                }
            }
        }

        let j = node.component;
        let mut vertices: Vec<VertexKey> = self.comp_vertices[j]
            .iter()
            .filter(|v| !blown.contains_key(v))
            .map(|&vertex| VertexKey::Original { node: id, vertex })
            .collect();
        if let Some(link) = node.parent {
            let count = match link.kind {
                LinkKind::Vertex { vertex, .. } => self.links[&vertex].len() as u32,
                LinkKind::Edge { .. } => 2,
            };
            vertices.extend((0..count).map(|k| VertexKey::Junction { link: id, k }));
        }

        let mut arcs = Vec::new();
        for &e in &self.comp_edges[j] {
            let [t, h] = g.ends(e).expect("component edge");
            let end_key = |v: VertexId, side: Side| match blown.get(&v) {
                Some(f) => f(EdgeEnd::new(e, side)),
                None => VertexKey::Original { node: id, vertex: v },
            };
            let mut cs = cuts.remove(&e).unwrap_or_default();
            cs.sort_by_key(|c| c.0);
            let mut from = (Pos::zero(), end_key(t, Side::Tail));
            for (pos, below, above) in cs {
                arcs.push((ArcKey { node: id, edge: e, lo: from.0, hi: pos }, from.1, below));
                from = (pos, above);
            }
            arcs.push((ArcKey { node: id, edge: e, lo: from.0, hi: Pos::one() }, from.1, end_key(h, Side::Head)));
        }
        (vertices, arcs)
    }

    /// Builds the graph `X_F`. Ids follow the sorted order of the provenance
    /// keys, so equal trees give identical graphs.
    pub fn realize(&self) -> Realization {
        let children = self.children();
        let cells = self.config.exec.map_range(self.nodes.len(), |i| self.node_cells(i as NodeId, &children[i]));
        let mut vertex_keys = Vec::new();
        let mut arcs = Vec::new();
        for (vs, es) in cells {
            vertex_keys.extend(vs);
            arcs.extend(es);
        }
        vertex_keys.sort();
        arcs.sort_by_key(|a| a.0);
        let vertex_index: BTreeMap<VertexKey, VertexId> =
            vertex_keys.iter().enumerate().map(|(i, &k)| (k, i as VertexId)).collect();
        let mut graph = Multigraph::new();
        for i in 0..vertex_keys.len() {
            graph.add_vertex(i as VertexId);
        }
        let mut edge_keys = Vec::with_capacity(arcs.len());
        for (i, (key, a, b)) in arcs.into_iter().enumerate() {
            graph.add_edge(i as EdgeId, vertex_index[&a], vertex_index[&b]).expect("keys resolve");
            edge_keys.push(key);
        }
        let edge_index = edge_keys.iter().enumerate().map(|(i, &k)| (k, i as EdgeId)).collect();
        Realization { graph, vertex_keys, edge_keys, vertex_index, edge_index }
    }
}

/// Provenance of a vertex of `X_F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VertexKey {
    /// A vertex of the copy at `node` that no gluing touched.
    Original { node: NodeId, vertex: VertexId },
    /// The `k`-th identified divisor point of the gluing that created `link`.
    /// For a vertex gluing `k` indexes the sorted link at the parent's vertex;
    /// for an edge gluing 0 is the near-tail point and 1 the near-head point.
    Junction { link: NodeId, k: u32 },
}

impl VertexKey {
    pub fn node(&self) -> NodeId {
        match *self {
            VertexKey::Original { node, .. } => node,
            VertexKey::Junction { link, .. } => link,
        }
    }
}

/// Provenance of an edge of `X_F`: the part `[lo, hi]` of `edge` in the copy at `node`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ArcKey {
    pub node: NodeId,
    pub edge: EdgeId,
    pub lo: Pos,
    pub hi: Pos,
}

#[derive(Clone, Debug)]
pub struct Realization {
    pub graph: Multigraph,
    pub vertex_keys: Vec<VertexKey>,
    pub edge_keys: Vec<ArcKey>,
    vertex_index: BTreeMap<VertexKey, VertexId>,
    edge_index: BTreeMap<ArcKey, EdgeId>,
}

impl Realization {
    pub fn vertex(&self, key: &VertexKey) -> Option<VertexId> {
        self.vertex_index.get(key).copied()
    }

    pub fn edge(&self, key: &ArcKey) -> Option<EdgeId> {
        self.edge_index.get(key).copied()
    }

    /// The arc of `edge` in copy `node` whose closed span contains `pos`,
    /// preferring one that contains it in its interior.
    pub fn arc_at(&self, node: NodeId, edge: EdgeId, pos: Pos) -> Option<(EdgeId, ArcKey)> {
        let lo = ArcKey { node, edge, lo: Pos::zero(), hi: Pos::zero() };
        let hi = ArcKey { node, edge, lo: Pos::one(), hi: Pos::one() };
        let mut found = None;
        for (k, &id) in self.edge_index.range(lo..=hi) {
            if k.lo < pos && pos < k.hi {
                return Some((id, *k));
            }
            if found.is_none() && k.lo <= pos && pos <= k.hi {
                found = Some((id, *k));
            }
        }
        found
    }
}
