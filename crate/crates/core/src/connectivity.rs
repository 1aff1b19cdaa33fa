//! Vertex-connectivity threshold tests.
//!
//! `is_d_connected` answers "is κ(G) ≥ d" exactly. Local connectivities are
//! computed with unit-capacity augmenting paths on the vertex-split digraph and
//! stop after `d` augmentations. The set of pairs follows the Esfahanian–Hakimi
//! reduction: for a minimum-degree vertex `v`, every minimum separator either
//! avoids `v` (and then separates `v` from a non-neighbor) or contains `v` (and
//! then separates two non-adjacent neighbors of `v`).

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AcceptedGraph, VertexSet};
use crate::stream::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exact,
    Sampled,
}

impl CheckMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckMode::Exact => "exact",
            CheckMode::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Fewer than `d + 1` vertices.
    TooSmall,
    /// A vertex set of size at most `d - 1` whose removal disconnects the graph.
    Cutset(Vec<VertexId>),
}

impl Witness {
    pub fn size(&self) -> usize {
        match self {
            Witness::TooSmall => 0,
            Witness::Cutset(c) => c.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityVerdict {
    pub k_at_least: u32,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub mode: CheckMode,
}

impl ConnectivityVerdict {
    fn holds(d: u32, mode: CheckMode) -> Self {
        ConnectivityVerdict {
            k_at_least: d,
            holds: true,
            witness: None,
            mode,
        }
    }

    fn fails(d: u32, witness: Witness, mode: CheckMode) -> Self {
        ConnectivityVerdict {
            k_at_least: d,
            holds: false,
            witness: Some(witness),
            mode,
        }
    }

    /// Whether a positive verdict covered every relevant vertex pair.
    pub fn exhaustive(&self) -> bool {
        self.mode == CheckMode::Exact
    }
}

/// Exact test of `κ(G) ≥ d`, with a verifiable cutset on failure.
pub fn is_d_connected(g: &AcceptedGraph, d: u32) -> ConnectivityVerdict {
    let mode = CheckMode::Exact;
    if let Some(v) = gate(g, d, mode) {
        return v;
    }
    if d == 0 {
        return ConnectivityVerdict::holds(d, mode);
    }
    let (v, _) = g.min_degree().expect("n >= d + 1 >= 1");
    let mut net = SplitNetwork::new(g);
    for w in 0..g.n() {
        if w != v && !g.has_edge(v, w) {
            if let Some(cut) = net.separator_below(v, w, d) {
                return ConnectivityVerdict::fails(d, Witness::Cutset(cut), mode);
            }
        }
    }
    let nbrs: Vec<VertexId> = g.neighbors(v).to_vec();
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !g.has_edge(x, y) {
                if let Some(cut) = net.separator_below(x, y, d) {
                    return ConnectivityVerdict::fails(d, Witness::Cutset(cut), mode);
                }
            }
        }
    }
    ConnectivityVerdict::holds(d, mode)
}

/// One-sided check: the minimum-degree gate plus `samples` random
/// non-adjacent pairs. A positive verdict only means no violation was found.
pub fn sampled_connectivity_check(
    g: &AcceptedGraph,
    d: u32,
    samples: u32,
    seed: u64,
) -> ConnectivityVerdict {
    let mode = CheckMode::Sampled;
    if let Some(v) = gate(g, d, mode) {
        return v;
    }
    if d == 0 {
        return ConnectivityVerdict::holds(d, mode);
    }
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = SplitNetwork::new(g);
    let mut tested = 0;
    let mut attempts = 0u64;
    while tested < samples && attempts < 64 * samples as u64 + 64 {
        attempts += 1;
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        if s == t || g.has_edge(s, t) {
            continue;
        }
        tested += 1;
        if let Some(cut) = net.separator_below(s, t, d) {
            return ConnectivityVerdict::fails(d, Witness::Cutset(cut), mode);
        }
    }
    ConnectivityVerdict::holds(d, mode)
}

/// Size and minimum-degree tests shared by the exact and sampled checks.
fn gate(g: &AcceptedGraph, d: u32, mode: CheckMode) -> Option<ConnectivityVerdict> {
    if (g.n() as u64) < d as u64 + 1 {
        return Some(ConnectivityVerdict::fails(d, Witness::TooSmall, mode));
    }
    let (v, deg) = g.min_degree()?;
    if deg < d as usize {
        // n >= d + 1 > deg + 1, so some vertex lies outside N[v]
        let mut cut = g.neighbors(v).to_vec();
        cut.sort_unstable();
        return Some(ConnectivityVerdict::fails(d, Witness::Cutset(cut), mode));
    }
    None
}

/// Exact vertex connectivity by exhaustive separator search, for graphs with
/// at most 12 vertices.
pub fn brute_force_connectivity(g: &AcceptedGraph) -> Result<u32> {
    let n = g.n();
    if n > 12 {
        return Err(Error::GraphTooLarge(n));
    }
    if n <= 1 {
        return Ok(0);
    }
    for k in 0..=n - 2 {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() != k {
                continue;
            }
            let removed = VertexSet::from_vertices(n, (0..n).filter(|v| mask >> v & 1 == 1));
            if g.components_without(&removed) >= 2 {
                return Ok(k);
            }
        }
    }
    Ok(n - 1)
}

/// Whether removing `cut` leaves at least two components.
pub fn is_cutset(g: &AcceptedGraph, cut: &[VertexId]) -> bool {
    let removed = VertexSet::from_vertices(g.n(), cut.iter().copied());
    g.components_without(&removed) >= 2
}

/// Vertex-split residual network: vertex `v` becomes `in = 2v` and
/// `out = 2v + 1` joined by a unit arc; each edge `{u, v}` becomes unit arcs
/// `out(u) -> in(v)` and `out(v) -> in(u)`.
struct SplitNetwork {
    start: Vec<usize>,
    head: Vec<u32>,
    twin: Vec<u32>,
    capacity: Vec<u8>,
    residual: Vec<u8>,
    parent: Vec<u32>,
    queue: VecDeque<u32>,
}

const NO_ARC: u32 = u32::MAX;

impl SplitNetwork {
    fn new(g: &AcceptedGraph) -> Self {
        let nodes = 2 * g.n() as usize;
        let mut arcs: Vec<(u32, u32)> =
            Vec::with_capacity(2 * (g.n() as usize + 2 * g.edge_count()));
        for v in 0..g.n() {
            arcs.push((2 * v, 2 * v + 1));
            for &w in g.neighbors(v) {
                arcs.push((2 * v + 1, 2 * w));
            }
        }
        // forward arc i and its reverse are stored together
        let mut degree = vec![0usize; nodes + 1];
        for &(a, b) in &arcs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut start = vec![0usize; nodes + 1];
        for i in 0..nodes {
            start[i + 1] = start[i] + degree[i];
        }
        let total = start[nodes];
        let mut fill = start.clone();
        let mut head = vec![0u32; total];
        let mut twin = vec![0u32; total];
        let mut capacity = vec![0u8; total];
        for &(a, b) in &arcs {
            let fa = fill[a as usize];
            let fb = fill[b as usize];
            fill[a as usize] += 1;
            fill[b as usize] += 1;
            head[fa] = b;
            twin[fa] = fb as u32;
            capacity[fa] = 1;
            head[fb] = a;
            twin[fb] = fa as u32;
            capacity[fb] = 0;
        }
        SplitNetwork {
            start,
            head,
            twin,
            residual: capacity.clone(),
            capacity,
            parent: vec![NO_ARC; nodes],
            queue: VecDeque::new(),
        }
    }

    /// If fewer than `limit` internally disjoint `s`–`t` paths exist, returns a
    /// minimum separator (of size below `limit`). `s` and `t` must be distinct
    /// and non-adjacent.
    fn separator_below(&mut self, s: VertexId, t: VertexId, limit: u32) -> Option<Vec<VertexId>> {
        self.residual.copy_from_slice(&self.capacity);
        let source = 2 * s + 1;
        let sink = 2 * t;
        let mut flow = 0;
        while flow < limit {
            if !self.search(source, sink) {
                break;
            }
            let mut node = sink;
            while node != source {
                let arc = self.parent[node as usize] as usize;
                self.residual[arc] -= 1;
                self.residual[self.twin[arc] as usize] += 1;
                node = self.head[self.twin[arc] as usize];
            }
            flow += 1;
        }
        if flow >= limit {
            return None;
        }
        // after a failed search, parent marks the residual-reachable nodes
        let reached = |node: u32, parent: &[u32]| node == source || parent[node as usize] != NO_ARC;
        let n = self.parent.len() as u32 / 2;
        let cut: Vec<VertexId> = (0..n)
            .filter(|&v| v != s && v != t)
            .filter(|&v| reached(2 * v, &self.parent) && !reached(2 * v + 1, &self.parent))
            .collect();
        debug_assert_eq!(cut.len() as u32, flow);
        Some(cut)
    }

    /// Breadth-first search for an augmenting path; records tree arcs in `parent`.
    fn search(&mut self, source: u32, sink: u32) -> bool {
        self.parent.fill(NO_ARC);
        self.queue.clear();
        self.queue.push_back(source);
        while let Some(x) = self.queue.pop_front() {
            for arc in self.start[x as usize]..self.start[x as usize + 1] {
                if self.residual[arc] == 0 {
                    continue;
                }
                let y = self.head[arc];
                if y == source || self.parent[y as usize] != NO_ARC {
                    continue;
                }
                self.parent[y as usize] = arc as u32;
                if y == sink {
                    return true;
                }
                self.queue.push_back(y);
            }
        }
        false
    }
}
