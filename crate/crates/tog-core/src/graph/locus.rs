use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::multigraph::{EdgeId, Multigraph, VertexId};
use super::GraphError;

/// Exact position along an edge, measured from its tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos(pub Ratio<i64>);

impl Pos {
    pub fn new(num: i64, den: i64) -> Self {
        Pos(Ratio::new(num, den))
    }

    pub fn zero() -> Self {
        Pos(Ratio::from_integer(0))
    }

    pub fn one() -> Self {
        Pos(Ratio::from_integer(1))
    }

    pub fn half() -> Self {
        Pos::new(1, 2)
    }

    pub fn is_interior(self) -> bool {
        self > Pos::zero() && self < Pos::one()
    }

    pub fn midpoint(self, other: Pos) -> Pos {
        Pos((self.0 + other.0) / 2)
    }

    /// `self` as a fraction of the interval `[lo, hi]`.
    pub fn relative_to(self, lo: Pos, hi: Pos) -> Pos {
        Pos((self.0 - lo.0) / (hi.0 - lo.0))
    }

    /// The point at fraction `t` of `[lo, hi]`.
    pub fn lerp(lo: Pos, hi: Pos, t: Pos) -> Pos {
        Pos(lo.0 + (hi.0 - lo.0) * t.0)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s.trim().split_once('/').unwrap_or((s.trim(), "1"));
        let n: i64 = n.trim().parse().map_err(|_| format!("bad position {s:?}"))?;
        let d: i64 = d.trim().parse().map_err(|_| format!("bad position {s:?}"))?;
        if d == 0 {
            return Err(format!("bad position {s:?}"));
        }
        Ok(Pos::new(n, d))
    }
}

impl Serialize for Pos {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Pos {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the realization: a vertex, or an interior point of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointLocus {
    Vertex { vertex: VertexId },
    Interior { edge: EdgeId, pos: Pos },
}

impl PointLocus {
    pub fn vertex(v: VertexId) -> Self {
        PointLocus::Vertex { vertex: v }
    }

    pub fn interior(edge: EdgeId, pos: Pos) -> Self {
        PointLocus::Interior { edge, pos }
    }

    pub fn midpoint(edge: EdgeId) -> Self {
        PointLocus::interior(edge, Pos::half())
    }

    pub fn check(&self, g: &Multigraph) -> Result<(), GraphError> {
        match *self {
            PointLocus::Vertex { vertex } if !g.has_vertex(vertex) => Err(GraphError::UnknownVertex(vertex)),
            PointLocus::Interior { edge, .. } if !g.has_edge(edge) => Err(GraphError::UnknownEdge(edge)),
            PointLocus::Interior { edge, pos } if !pos.is_interior() => {
                Err(GraphError::PositionOutOfRange { edge, pos: pos.to_string() })
            }
            _ => Ok(()),
        }
    }

    /// Number of local branches at the point.
    pub fn degree(&self, g: &Multigraph) -> Result<usize, GraphError> {
        self.check(g)?;
        Ok(match *self {
            PointLocus::Vertex { vertex } => g.degree(vertex),
            PointLocus::Interior { .. } => 2,
        })
    }
}

impl fmt::Display for PointLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointLocus::Vertex { vertex } => write!(f, "v{vertex}"),
            PointLocus::Interior { edge, pos } => write!(f, "e{edge}@{pos}"),
        }
    }
}

/// Inverse of `Display`: `v3`, `e2@1/3`, or `e2` for the midpoint.
impl FromStr for PointLocus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("bad point {s:?}; expected v<vertex> or e<edge>[@<num>/<den>]");
        if let Some(v) = s.strip_prefix('v') {
            return v.parse().map(PointLocus::vertex).map_err(|_| bad());
        }
        let rest = s.strip_prefix('e').ok_or_else(bad)?;
        let (edge, pos) = match rest.split_once('@') {
            Some((e, p)) => (e, p.parse::<Pos>()?),
            None => (rest, Pos::half()),
        };
        Ok(PointLocus::interior(edge.parse().map_err(|_| bad())?, pos))
    }
}
