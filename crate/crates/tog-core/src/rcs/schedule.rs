use serde::Serialize;

use super::{GraphicalConnectingSystem, RcsError};
use crate::graph::{EdgeId, OrientedEdge, Pos};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduledSite {
    pub pos: Pos,
    /// Partner of the edge taken in its reference orientation. The partner
    /// for the reversed orientation is its bar.
    pub partner: OrientedEdge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub sites: Vec<ScheduledSite>,
    pub warning: Option<String>,
}

/// `r` sites at `k/(r+1)` along `edge`, partners taken round-robin from the
/// sorted partner set of the forward orientation.
pub fn schedule_sites(rcs: &GraphicalConnectingSystem, edge: EdgeId, r: usize) -> Result<Schedule, RcsError> {
    let sites = schedule_arc(rcs, edge, Pos::zero(), Pos::one(), r, 0)?;
    let o = rcs.partners(OrientedEdge::forward(edge)).len();
    let warning = (r < o).then(|| {
        format!("edge {edge}: resolution {r} is below the {o} partners of the edge; only the first {r} are used")
    });
    Ok(Schedule { sites, warning })
}

/// Same rule on the sub-arc `[lo, hi]`, with the round-robin counter
/// starting at `offset`. Used for edges split by a gluing.
pub fn schedule_arc(
    rcs: &GraphicalConnectingSystem,
    edge: EdgeId,
    lo: Pos,
    hi: Pos,
    r: usize,
    offset: usize,
) -> Result<Vec<ScheduledSite>, RcsError> {
    if r == 0 {
        return Err(RcsError::ZeroResolution);
    }
    if !rcs.graph().has_edge(edge) {
        return Err(RcsError::UnknownEdge(edge));
    }
    let oe = OrientedEdge::forward(edge);
    let partners = rcs.partners(oe);
    if partners.is_empty() {
        return Err(RcsError::EmptyPartnerSet(oe));
    }
    Ok((1..=r)
        .map(|k| ScheduledSite {
            pos: Pos::lerp(lo, hi, Pos::new(k as i64, r as i64 + 1)),
            partner: partners[(offset + k - 1) % partners.len()],
        })
        .collect())
}
