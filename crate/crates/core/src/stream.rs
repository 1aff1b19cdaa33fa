//! Seeded random orderings of the edges of `K_n`.
//!
//! A [`ProposalStream`] never materializes the `C(n, 2)` edges. Each call draws a
//! uniform unordered pair and retries while the pair has already been proposed
//! (in the current phase, for auxiliary streams). Once more than half of the
//! edges of a phase are used up, the remaining edges are listed once and drawn
//! from directly, which keeps exhaustion of small complete graphs cheap without
//! changing the distribution.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 0-based vertex index.
pub type VertexId = u32;

/// An undirected edge stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    u: VertexId,
    v: VertexId,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a)),
        }
    }

    pub fn u(&self) -> VertexId {
        self.u
    }

    pub fn v(&self) -> VertexId {
        self.v
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }

    /// The endpoint opposite to `x`, if `x` is an endpoint.
    pub fn other(&self, x: VertexId) -> Option<VertexId> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    pub(crate) fn key(&self, n: u32) -> u64 {
        self.u as u64 * n as u64 + self.v as u64
    }

    pub(crate) fn from_key(key: u64, n: u32) -> Edge {
        Edge {
            u: (key / n as u64) as u32,
            v: (key % n as u64) as u32,
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.u, self.v)
    }
}

/// Number of edges of `K_n`.
pub fn pair_count(n: u32) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamMode {
    /// One uniformly random ordering of `K_n`.
    Real,
    /// `num_phases` independent orderings, each truncated to `phase_length`
    /// proposals. Edges repeat across phases but never within one.
    Auxiliary { num_phases: u32, phase_length: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Proposal {
    /// 1-based round number.
    pub round: u64,
    /// 1-based phase of an auxiliary stream; always 1 for real streams.
    pub phase: u32,
    pub edge: Edge,
}

#[derive(Debug, Clone)]
pub struct ProposalStream {
    n: u32,
    seed: u64,
    mode: StreamMode,
    rng: ChaCha8Rng,
    emitted: FxHashSet<u64>,
    remaining: Option<Vec<u64>>,
    round: u64,
    phase: u32,
    phase_round: u64,
}

impl ProposalStream {
    pub fn new(n: u32, seed: u64, mode: StreamMode) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n as u64));
        }
        if let StreamMode::Auxiliary {
            num_phases,
            phase_length,
        } = mode
        {
            if num_phases == 0 || phase_length == 0 {
                return Err(Error::InvalidMode(
                    "auxiliary streams need at least one phase of at least one round".into(),
                ));
            }
            if phase_length > pair_count(n) {
                return Err(Error::InvalidMode(format!(
                    "phase length {phase_length} exceeds the {} edges of K_{n}",
                    pair_count(n)
                )));
            }
        }
        Ok(ProposalStream {
            n,
            seed,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            emitted: FxHashSet::default(),
            remaining: None,
            round: 0,
            phase: 1,
            phase_round: 0,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> StreamMode {
        self.mode
    }

    /// Rounds emitted so far.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn next_proposal(&mut self) -> Result<Proposal> {
        let total = pair_count(self.n);
        match self.mode {
            StreamMode::Real => {
                if self.phase_round == total {
                    return Err(Error::StreamExhausted(self.round));
                }
            }
            StreamMode::Auxiliary {
                num_phases,
                phase_length,
            } => {
                if self.phase_round == phase_length {
                    if self.phase == num_phases {
                        return Err(Error::StreamExhausted(self.round));
                    }
                    self.phase += 1;
                    self.phase_round = 0;
                    self.emitted.clear();
                    self.remaining = None;
                }
            }
        }
        let key = self.draw(total);
        self.round += 1;
        self.phase_round += 1;
        Ok(Proposal {
            round: self.round,
            phase: self.phase,
            edge: Edge::from_key(key, self.n),
        })
    }

    fn draw(&mut self, total: u64) -> u64 {
        if self.remaining.is_none() && 2 * self.phase_round >= total {
            let n = self.n;
            let mut rest = Vec::with_capacity((total - self.phase_round) as usize);
            for u in 0..n {
                for v in u + 1..n {
                    let key = u as u64 * n as u64 + v as u64;
                    if !self.emitted.contains(&key) {
                        rest.push(key);
                    }
                }
            }
            self.remaining = Some(rest);
        }
        if let Some(rest) = self.remaining.as_mut() {
            let i = self.rng.gen_range(0..rest.len());
            return rest.swap_remove(i);
        }
        loop {
            let a = self.rng.gen_range(0..self.n);
            let mut b = self.rng.gen_range(0..self.n - 1);
            if b >= a {
                b += 1;
            }
            let key = Edge::new(a, b).expect("distinct endpoints").key(self.n);
            if self.emitted.insert(key) {
                return key;
            }
        }
    }
}

impl Iterator for ProposalStream {
    type Item = Proposal;

    fn next(&mut self) -> Option<Proposal> {
        self.next_proposal().ok()
    }
}

/// Number of distinct edges proposed in at least two different phases of an
/// auxiliary stream log.
pub fn repeated_edge_count(log: &[(u32, Edge)]) -> usize {
    // first phase seen, and whether a later distinct phase also proposed it
    let mut seen: FxHashMap<Edge, (u32, bool)> = FxHashMap::default();
    for &(phase, edge) in log {
        let entry = seen.entry(edge).or_insert((phase, false));
        if entry.0 != phase {
            entry.1 = true;
        }
    }
    seen.values().filter(|(_, repeated)| *repeated).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn rejects_tiny_vertex_counts() {
        assert!(matches!(
            ProposalStream::new(1, 0, StreamMode::Real),
            Err(Error::TooFewVertices(1))
        ));
        assert!(ProposalStream::new(
            5,
            0,
            StreamMode::Auxiliary {
                num_phases: 0,
                phase_length: 3
            }
        )
        .is_err());
        assert!(ProposalStream::new(
            4,
            0,
            StreamMode::Auxiliary {
                num_phases: 2,
                phase_length: 7
            }
        )
        .is_err());
    }

    #[test]
    fn k4_is_exhausted_exactly_once() {
        let mut s = ProposalStream::new(4, 7, StreamMode::Real).unwrap();
        let edges: Vec<Edge> = (0..6).map(|_| s.next_proposal().unwrap().edge).collect();
        let distinct: BTreeSet<Edge> = edges.iter().copied().collect();
        assert_eq!(distinct.len(), 6);
        assert!(matches!(s.next_proposal(), Err(Error::StreamExhausted(6))));
    }

    #[test]
    fn replay_is_identical() {
        let a: Vec<Proposal> = ProposalStream::new(4, 7, StreamMode::Real)
            .unwrap()
            .collect();
        let b: Vec<Proposal> = ProposalStream::new(4, 7, StreamMode::Real)
            .unwrap()
            .collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
    }

    #[test]
    fn k2_first_call() {
        let mut s = ProposalStream::new(2, 99, StreamMode::Real).unwrap();
        let p = s.next_proposal().unwrap();
        assert_eq!(p.round, 1);
        assert_eq!(p.edge, Edge::new(0, 1).unwrap());
    }

    #[test]
    fn k3_emits_all_three() {
        for seed in 0..20 {
            let got: BTreeSet<Edge> = ProposalStream::new(3, seed, StreamMode::Real)
                .unwrap()
                .map(|p| p.edge)
                .collect();
            let want: BTreeSet<Edge> = [(0, 1), (0, 2), (1, 2)]
                .iter()
                .map(|&(a, b)| Edge::new(a, b).unwrap())
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn auxiliary_phases_are_internally_distinct() {
        let mode = StreamMode::Auxiliary {
            num_phases: 3,
            phase_length: 50,
        };
        let all: Vec<Proposal> = ProposalStream::new(100, 1, mode).unwrap().collect();
        assert_eq!(all.len(), 150);
        for (k, block) in all.chunks(50).enumerate() {
            let distinct: BTreeSet<Edge> = block.iter().map(|p| p.edge).collect();
            assert_eq!(distinct.len(), 50);
            assert!(block.iter().all(|p| p.phase == k as u32 + 1));
        }
    }

    #[test]
    fn auxiliary_phase_can_exhaust_small_graph_repeatedly() {
        let mode = StreamMode::Auxiliary {
            num_phases: 2,
            phase_length: 6,
        };
        let all: Vec<Proposal> = ProposalStream::new(4, 3, mode).unwrap().collect();
        assert_eq!(all.len(), 12);
        let first: BTreeSet<Edge> = all[..6].iter().map(|p| p.edge).collect();
        let second: BTreeSet<Edge> = all[6..].iter().map(|p| p.edge).collect();
        assert_eq!(first, second);
    }

    #[test]
    fn edge_constructor_canonicalizes() {
        let e = Edge::new(5, 2).unwrap();
        assert_eq!(e.endpoints(), (2, 5));
        assert_eq!(e.other(2), Some(5));
        assert_eq!(e.other(3), None);
        assert!(matches!(Edge::new(4, 4), Err(Error::SelfLoop(4))));
        assert_eq!(Edge::from_key(e.key(10), 10), e);
    }

    #[test]
    fn repeated_edges_are_counted_once() {
        let e01 = Edge::new(0, 1).unwrap();
        let e12 = Edge::new(1, 2).unwrap();
        assert_eq!(repeated_edge_count(&[(1, e01), (2, e01)]), 1);
        assert_eq!(repeated_edge_count(&[(1, e01), (2, e01), (3, e01)]), 1);
        assert_eq!(repeated_edge_count(&[(1, e01), (2, e12)]), 0);
        assert_eq!(repeated_edge_count(&[]), 0);
    }
}
