//! Per-vertex edge requirements for the final phases: vertex `v` needs
//! `need(v)` more edges, each to a vertex of its eligible set.

use crate::graph::{AcceptedGraph, VertexSet};
use crate::strategy::Decision;
use crate::stream::{Edge, VertexId};

/// Which endpoints a vertex may still connect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eligible {
    /// Any member of pool `id`.
    Pool(usize),
    /// Any member of pool `id` except the cycle positions `start..start+len`
    /// (cyclically) of the skeleton cycle registered with the map.
    PoolExceptArc { pool: usize, start: u32, len: u32 },
}

#[derive(Debug, Clone)]
pub struct NeedsMap {
    need: Vec<u32>,
    eligible: Vec<Option<Eligible>>,
    pools: Vec<VertexSet>,
    /// Position of each vertex on the skeleton cycle, if any.
    cycle_pos: Vec<u32>,
    cycle_len: u32,
}

const OFF_CYCLE: u32 = u32::MAX;

impl NeedsMap {
    pub fn new(n: u32) -> Self {
        NeedsMap {
            need: vec![0; n as usize],
            eligible: vec![None; n as usize],
            pools: Vec::new(),
            cycle_pos: Vec::new(),
            cycle_len: 0,
        }
    }

    pub fn add_pool(&mut self, pool: VertexSet) -> usize {
        self.pools.push(pool);
        self.pools.len() - 1
    }

    pub fn pool(&self, id: usize) -> &VertexSet {
        &self.pools[id]
    }

    /// Registers the cyclic vertex order used by [`Eligible::PoolExceptArc`].
    pub fn set_cycle(&mut self, cycle: &[VertexId]) {
        self.cycle_pos = vec![OFF_CYCLE; self.need.len()];
        for (i, &v) in cycle.iter().enumerate() {
            self.cycle_pos[v as usize] = i as u32;
        }
        self.cycle_len = cycle.len() as u32;
    }

    pub fn set(&mut self, v: VertexId, need: u32, eligible: Eligible) {
        self.need[v as usize] = need;
        self.eligible[v as usize] = (need > 0).then_some(eligible);
    }

    pub fn need(&self, v: VertexId) -> u32 {
        self.need[v as usize]
    }

    pub fn eligibility(&self, v: VertexId) -> Option<Eligible> {
        self.eligible[v as usize]
    }

    pub fn total_need(&self) -> u64 {
        self.need.iter().map(|&k| k as u64).sum()
    }

    pub fn needy_count(&self) -> usize {
        self.need.iter().filter(|&&k| k > 0).count()
    }

    pub fn is_satisfied(&self) -> bool {
        self.need.iter().all(|&k| k == 0)
    }

    /// Whether `u` lies in `v`'s eligible set (ignoring adjacency).
    pub fn is_eligible(&self, v: VertexId, u: VertexId) -> bool {
        if u == v {
            return false;
        }
        match self.eligible[v as usize] {
            None => false,
            Some(Eligible::Pool(id)) => self.pools[id].contains(u),
            Some(Eligible::PoolExceptArc { pool, start, len }) => {
                if !self.pools[pool].contains(u) {
                    return false;
                }
                let pos = self.cycle_pos.get(u as usize).copied().unwrap_or(OFF_CYCLE);
                if pos == OFF_CYCLE {
                    return true;
                }
                let offset = (pos + self.cycle_len - start) % self.cycle_len;
                offset >= len
            }
        }
    }

    fn serves(&self, v: VertexId, u: VertexId) -> bool {
        self.need[v as usize] > 0 && self.is_eligible(v, u)
    }

    /// Accept iff the edge is new and serves a remaining need of an endpoint.
    pub fn decide(&self, e: Edge, graph: &AcceptedGraph) -> Decision {
        let (a, b) = e.endpoints();
        if !graph.has_edge(a, b) && (self.serves(a, b) || self.serves(b, a)) {
            Decision::Accept
        } else {
            Decision::Reject
        }
    }

    /// Charges an accepted edge against the needs it serves (possibly both ends).
    pub fn record(&mut self, e: Edge) {
        let (a, b) = e.endpoints();
        let (sa, sb) = (self.serves(a, b), self.serves(b, a));
        if sa {
            self.need[a as usize] -= 1;
        }
        if sb {
            self.need[b as usize] -= 1;
        }
    }
}
