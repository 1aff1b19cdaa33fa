//! Independent reference implementations used as test oracles. Each one is
//! written from the definitions, deliberately naive, and shares no code with
//! the library beyond the graph container.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semirandom::AcceptedGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adjacency matrix of `g`.
pub fn matrix(g: &AcceptedGraph) -> Vec<Vec<bool>> {
    let n = g.n() as usize;
    let mut m = vec![vec![false; n]; n];
    for e in g.edges() {
        let (a, b) = e.endpoints();
        m[a as usize][b as usize] = true;
        m[b as usize][a as usize] = true;
    }
    m
}

/// G(n, p) sample.
pub fn random_graph(n: u32, p: f64, rng: &mut impl Rng) -> AcceptedGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    AcceptedGraph::from_edges(n, edges).unwrap()
}

/// Random graph of maximum degree at most `max_deg`: random pairs are added
/// while both endpoints have room.
pub fn random_bounded_graph(
    n: u32,
    max_deg: usize,
    attempts: usize,
    rng: &mut impl Rng,
) -> AcceptedGraph {
    let mut m = vec![vec![false; n as usize]; n as usize];
    let mut deg = vec![0usize; n as usize];
    let mut edges = Vec::new();
    for _ in 0..attempts {
        let a = rng.gen_range(0..n) as usize;
        let b = rng.gen_range(0..n) as usize;
        if a == b || m[a][b] || deg[a] >= max_deg || deg[b] >= max_deg {
            continue;
        }
        m[a][b] = true;
        m[b][a] = true;
        deg[a] += 1;
        deg[b] += 1;
        edges.push((a as u32, b as u32));
    }
    AcceptedGraph::from_edges(n, edges).unwrap()
}

/// Whether the vertices of `keep` (a bitmask) induce a connected graph.
pub fn mask_connected(m: &[Vec<bool>], keep: u64) -> bool {
    if keep == 0 {
        return true;
    }
    let start = keep.trailing_zeros() as usize;
    let mut seen = 1u64 << start;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for w in 0..m.len() {
            if keep >> w & 1 == 1 && seen >> w & 1 == 0 && m[v][w] {
                seen |= 1 << w;
                stack.push(w);
            }
        }
    }
    seen == keep
}

/// Vertex connectivity by exhaustive search over removal sets in
/// increasing size; `K_n` has connectivity `n − 1`, `K_1` has 0.
pub fn kappa(g: &AcceptedGraph) -> u32 {
    let m = matrix(g);
    let n = m.len();
    let all: u64 = (1u64 << n) - 1;
    if n <= 1 {
        return 0;
    }
    let complete = (0..n).all(|a| (0..n).all(|b| a == b || m[a][b]));
    if complete {
        return n as u32 - 1;
    }
    for k in 0..n - 1 {
        for removed in 0..=all {
            if removed.count_ones() as usize != k {
                continue;
            }
            if !mask_connected(&m, all & !removed) {
                return k as u32;
            }
        }
    }
    unreachable!("a non-complete graph has a separating set of size at most n − 2")
}

/// `N(U)` as the union of neighborhoods minus `U`.
pub fn neighborhood(m: &[Vec<bool>], set: u64) -> u64 {
    let mut out = 0u64;
    for v in 0..m.len() {
        if set >> v & 1 == 1 {
            for w in 0..m.len() {
                if m[v][w] {
                    out |= 1 << w;
                }
            }
        }
    }
    out & !set
}

/// Union of all vertex sets `U` (connected or not) with `1 ≤ |U| ≤ 6` and
/// `|N(U)| ≤ d − 1`.
pub fn fragile_powerset(g: &AcceptedGraph, d: u32) -> BTreeSet<u32> {
    let m = matrix(g);
    let n = m.len();
    let mut out = 0u64;
    for set in 1u64..(1 << n) {
        if set.count_ones() <= 6 && neighborhood(&m, set).count_ones() < d {
            out |= set;
        }
    }
    (0..n as u32).filter(|&v| out >> v & 1 == 1).collect()
}

/// Connected vertex sets of size at most `max` containing `v`, by powerset.
pub fn connected_sets_powerset(g: &AcceptedGraph, v: u32, max: usize) -> BTreeSet<Vec<u32>> {
    let m = matrix(g);
    let n = m.len();
    let mut out = BTreeSet::new();
    for set in 1u64..(1 << n) {
        if set >> v & 1 == 0 || set.count_ones() as usize > max || !mask_connected(&m, set) {
            continue;
        }
        out.insert((0..n as u32).filter(|&w| set >> w & 1 == 1).collect());
    }
    out
}

/// One pass of the exploration process with explicit sets `A`, `P`, `N`:
/// start from `A = {deg ≤ d − 2}`, repeatedly take the smallest vertex of
/// `A` with at most `d − 2` neighbors in `N`, move it to `P` and its
/// `N`-neighbors to `A`. Returns `(H, leaves of H)` restricted to `alive`.
pub fn explore(
    adj: &[BTreeSet<u32>],
    alive: &BTreeSet<u32>,
    d: u32,
) -> (BTreeSet<u32>, BTreeSet<u32>) {
    let deg = |v: u32| adj[v as usize].intersection(alive).count();
    let mut a: BTreeSet<u32> = alive
        .iter()
        .copied()
        .filter(|&v| deg(v) + 2 <= d as usize)
        .collect();
    let mut p: BTreeSet<u32> = BTreeSet::new();
    let mut nn: BTreeSet<u32> = alive.difference(&a).copied().collect();
    loop {
        let pick = a
            .iter()
            .copied()
            .find(|&v| adj[v as usize].intersection(&nn).count() + 2 <= d as usize);
        let Some(v) = pick else { break };
        a.remove(&v);
        p.insert(v);
        let fresh: Vec<u32> = adj[v as usize].intersection(&nn).copied().collect();
        for w in fresh {
            nn.remove(&w);
            a.insert(w);
        }
    }
    let h: BTreeSet<u32> = a.union(&p).copied().collect();
    let leaves = h
        .iter()
        .copied()
        .filter(|&v| adj[v as usize].intersection(&h).count() == 1)
        .collect();
    (h, leaves)
}

/// The full peel: explore, keep `alive \ (H \ retained)` where retained
/// leaves have at least `d` neighbors among the alive vertices, and repeat
/// on the survivors until every survivor has at least `d − 1` surviving
/// neighbors or none are left.
pub fn peel_fixpoint(g: &AcceptedGraph, d: u32) -> BTreeSet<u32> {
    let adj: Vec<BTreeSet<u32>> = (0..g.n())
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive: BTreeSet<u32> = (0..g.n()).collect();
    loop {
        let (h, leaves) = explore(&adj, &alive, d);
        let deg = |v: u32| adj[v as usize].intersection(&alive).count();
        let keep: BTreeSet<u32> = alive
            .iter()
            .copied()
            .filter(|&v| !h.contains(&v) || (leaves.contains(&v) && deg(v) >= d as usize))
            .collect();
        let low = keep
            .iter()
            .any(|&v| adj[v as usize].intersection(&keep).count() + 1 < d as usize);
        if keep.is_empty() || !low {
            return keep;
        }
        alive = keep;
    }
}

/// Longest simple directed cycle with at least 3 vertices (0 if none), by
/// exhaustive DFS.
pub fn longest_cycle(len: usize, has_arc: impl Fn(usize, usize) -> bool) -> usize {
    fn dfs(
        start: usize,
        v: usize,
        depth: usize,
        used: &mut Vec<bool>,
        len: usize,
        has_arc: &dyn Fn(usize, usize) -> bool,
        best: &mut usize,
    ) {
        for w in 0..len {
            if w == start && depth >= 3 && has_arc(v, w) {
                *best = (*best).max(depth);
            }
            // cycles are rooted at their smallest vertex
            if w > start && !used[w] && has_arc(v, w) {
                used[w] = true;
                dfs(start, w, depth + 1, used, len, has_arc, best);
                used[w] = false;
            }
        }
    }
    let mut best = 0;
    for s in 0..len {
        let mut used = vec![false; len];
        used[s] = true;
        dfs(s, s, 1, &mut used, len, &has_arc, &mut best);
    }
    best
}

/// Cycle validator: distinct vertices, every consecutive pair (including
/// the closing one) adjacent per `adjacent`, at least `min_len` vertices.
pub fn valid_cycle(cycle: &[u32], min_len: usize, adjacent: impl Fn(u32, u32) -> bool) -> bool {
    let distinct: BTreeSet<u32> = cycle.iter().copied().collect();
    cycle.len() >= min_len
        && distinct.len() == cycle.len()
        && (0..cycle.len()).all(|k| adjacent(cycle[k], cycle[(k + 1) % cycle.len()]))
}

/// `P(v)` by walking both ways from position `pos` until a degree-3
/// position is met; returns `(start, len)` with `start` the degree-3
/// position before `pos`.
pub fn p_path_scan(deg3: &[bool], pos: usize) -> (u32, u32) {
    let len = deg3.len();
    let mut back = 1;
    while !deg3[(pos + len - back) % len] {
        back += 1;
    }
    let mut fwd = 1;
    while !deg3[(pos + fwd) % len] {
        fwd += 1;
    }
    let start = (pos + len - back) % len;
    (start as u32, (back + fwd + 1).min(len) as u32)
}

/// Exact expected rounds for a greedy matching on a uniform
/// without-replacement stream to reach `k` edges: the `i`-th matching edge
/// needs an edge inside the `n − 2(i − 1)` unmatched vertices.
pub fn matching_waiting_time(n: u64, k: u64) -> f64 {
    let nf = n as f64;
    (1..=k)
        .map(|i| {
            let free = (n - 2 * i + 2) as f64;
            nf * (nf - 1.0) / (free * (free - 1.0))
        })
        .sum()
}
