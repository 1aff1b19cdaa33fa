//! The merge digraph over typical paths, a long-cycle heuristic for it, and
//! the translation of a digraph cycle into a cycle of the accepted graph.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use super::paths::{EndpointWindows, PathSystem};
use crate::error::{Error, Result};
use crate::graph::AcceptedGraph;
use crate::stream::VertexId;

const NONE: u32 = u32::MAX;

/// Simple digraph on `0..len` without loops or parallel arcs.
#[derive(Debug, Clone, Default)]
pub struct Digraph {
    out: Vec<Vec<u32>>,
    arcs: FxHashSet<u64>,
}

impl Digraph {
    pub fn new(len: u32) -> Self {
        Digraph {
            out: vec![Vec::new(); len as usize],
            arcs: FxHashSet::default(),
        }
    }

    pub fn from_arcs(len: u32, arcs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut g = Digraph::new(len);
        for (i, j) in arcs {
            g.add_arc(i, j);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    fn key(i: u32, j: u32) -> u64 {
        (i as u64) << 32 | j as u64
    }

    /// Adds `i → j`; returns false for loops and arcs already present.
    pub fn add_arc(&mut self, i: u32, j: u32) -> bool {
        if i == j || !self.arcs.insert(Self::key(i, j)) {
            return false;
        }
        self.out[i as usize].push(j);
        true
    }

    pub fn has_arc(&self, i: u32, j: u32) -> bool {
        self.arcs.contains(&Self::key(i, j))
    }

    pub fn out(&self, i: u32) -> &[u32] {
        &self.out[i as usize]
    }
}

/// Digraph on typical paths: `i → j` records an accepted edge from the head
/// window of path `i` to the tail window of path `j`.
#[derive(Debug, Clone, Default)]
pub struct MergeDigraph {
    pub digraph: Digraph,
    /// `(i, j) ↦ (u ∈ S'_i, v ∈ S''_j)`.
    realizing: FxHashMap<(u32, u32), (VertexId, VertexId)>,
}

impl MergeDigraph {
    pub fn new(m: u32) -> Self {
        MergeDigraph {
            digraph: Digraph::new(m),
            realizing: FxHashMap::default(),
        }
    }

    pub fn add(&mut self, i: u32, j: u32, u: VertexId, v: VertexId) -> bool {
        if !self.digraph.add_arc(i, j) {
            return false;
        }
        self.realizing.insert((i, j), (u, v));
        true
    }

    pub fn realizing(&self, i: u32, j: u32) -> Option<(VertexId, VertexId)> {
        self.realizing.get(&(i, j)).copied()
    }

    /// Every arc's realizing edge is present in `graph` and runs between the right windows.
    pub fn verify(&self, graph: &AcceptedGraph, windows: &EndpointWindows) -> bool {
        self.realizing.iter().all(|(&(i, j), &(u, v))| {
            graph.has_edge(u, v) && windows.head_of(u) == Some(i) && windows.tail_of(v) == Some(j)
        })
    }
}

/// Whether `cycle` is a directed cycle of `g` with distinct vertices.
pub fn is_valid_digraph_cycle(g: &Digraph, cycle: &[u32]) -> bool {
    if cycle.len() < 2 {
        return false;
    }
    let distinct: FxHashSet<u32> = cycle.iter().copied().collect();
    distinct.len() == cycle.len()
        && cycle.iter().all(|&v| (v as usize) < g.len())
        && (0..cycle.len()).all(|k| g.has_arc(cycle[k], cycle[(k + 1) % cycle.len()]))
}

/// A long directed cycle of `g` (at least 3 vertices), or `None`.
///
/// Starts from a maximum cycle cover (a maximum matching between out- and
/// in-copies of the vertices), merges pairs of cycles `a → b`, `c → d` into
/// one via arcs `a → d`, `c → b` until no such pair exists, splices in
/// uncovered vertices `x` with arcs `a → x → b` around a cycle arc `a → b`,
/// and keeps the longest cycle. If that falls short of `target`, a greedy
/// path growth and then a budgeted exhaustive search are also tried.
pub fn long_cycle_in_digraph(g: &Digraph, target: usize) -> Option<Vec<u32>> {
    let mut best = cover_and_patch(g);
    let len = |c: &Option<Vec<u32>>| c.as_ref().map_or(0, |c| c.len());
    if len(&best) < target {
        let greedy = greedy_cycle(g);
        if len(&greedy) > len(&best) {
            best = greedy;
        }
    }
    if len(&best) < target {
        let found = bounded_search(g, len(&best).max(2), target, SEARCH_BUDGET);
        if len(&found) > len(&best) {
            best = found;
        }
    }
    best.filter(|c| c.len() >= 3)
}

/// Arc visits allowed to [`bounded_search`] per call.
const SEARCH_BUDGET: u64 = 1 << 20;

/// Depth-first search over simple paths rooted at each cycle's smallest
/// vertex, keeping the longest cycle longer than `floor`; stops at `target`
/// or after `budget` arc visits. Exact on small digraphs.
fn bounded_search(g: &Digraph, floor: usize, target: usize, budget: u64) -> Option<Vec<u32>> {
    let m = g.len();
    let mut best: Option<Vec<u32>> = None;
    let mut best_len = floor;
    let mut used = vec![false; m];
    let mut steps = 0u64;
    let mut path: Vec<u32> = Vec::new();
    // (vertex, next out-arc index)
    let mut stack: Vec<(u32, usize)> = Vec::new();
    for s in 0..m as u32 {
        if m - (s as usize) <= best_len {
            break;
        }
        used[s as usize] = true;
        path.push(s);
        stack.push((s, 0));
        while let Some(&mut (v, ref mut k)) = stack.last_mut() {
            let out = g.out(v);
            if *k == out.len() || steps >= budget {
                stack.pop();
                used[v as usize] = false;
                path.pop();
                continue;
            }
            let w = out[*k];
            *k += 1;
            steps += 1;
            if w == s && path.len() > best_len {
                best_len = path.len();
                best = Some(path.clone());
                if best_len >= target {
                    return best;
                }
            }
            if w > s && !used[w as usize] {
                used[w as usize] = true;
                path.push(w);
                stack.push((w, 0));
            }
        }
        if steps >= budget {
            break;
        }
    }
    best
}

fn cover_and_patch(g: &Digraph) -> Option<Vec<u32>> {
    let m = g.len();
    let succ_init = max_matching(g);
    let mut succ = succ_init;
    let mut pred = vec![NONE; m];
    for (i, &j) in succ.iter().enumerate() {
        if j != NONE {
            pred[j as usize] = i as u32;
        }
    }
    // vertices on matching paths are free; the rest lie on cycles
    let mut cycle_id = vec![NONE; m];
    let mut on_path = vec![false; m];
    for v in 0..m {
        if pred[v] == NONE {
            let mut x = v as u32;
            while x != NONE {
                on_path[x as usize] = true;
                x = succ[x as usize];
            }
        }
    }
    let mut members: Vec<Vec<u32>> = Vec::new();
    for v in 0..m {
        if on_path[v] || cycle_id[v] != NONE {
            continue;
        }
        let id = members.len() as u32;
        let mut list = Vec::new();
        let mut x = v as u32;
        while cycle_id[x as usize] == NONE {
            cycle_id[x as usize] = id;
            list.push(x);
            x = succ[x as usize];
        }
        members.push(list);
    }
    for v in 0..m {
        if on_path[v] {
            succ[v] = NONE;
            pred[v] = NONE;
        }
    }

    loop {
        let mut changed = false;
        for a in 0..m as u32 {
            let ca = cycle_id[a as usize];
            if ca == NONE {
                continue;
            }
            for &d in g.out(a) {
                let cd = cycle_id[d as usize];
                if cd == NONE || cd == cycle_id[a as usize] {
                    continue;
                }
                let b = succ[a as usize];
                let c = pred[d as usize];
                if !g.has_arc(c, b) {
                    continue;
                }
                succ[a as usize] = d;
                pred[d as usize] = a;
                succ[c as usize] = b;
                pred[b as usize] = c;
                let (keep, gone) = {
                    let ca = cycle_id[a as usize];
                    if members[ca as usize].len() >= members[cd as usize].len() {
                        (ca, cd)
                    } else {
                        (cd, ca)
                    }
                };
                let moved = std::mem::take(&mut members[gone as usize]);
                for &x in &moved {
                    cycle_id[x as usize] = keep;
                }
                members[keep as usize].extend(moved);
                changed = true;
            }
        }
        for x in 0..m as u32 {
            if cycle_id[x as usize] != NONE {
                continue;
            }
            for &b in g.out(x) {
                let cb = cycle_id[b as usize];
                if cb == NONE {
                    continue;
                }
                let a = pred[b as usize];
                if g.has_arc(a, x) {
                    succ[a as usize] = x;
                    pred[x as usize] = a;
                    succ[x as usize] = b;
                    pred[b as usize] = x;
                    cycle_id[x as usize] = cb;
                    members[cb as usize].push(x);
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let largest = members.iter().max_by_key(|l| l.len())?;
    let start = *largest.iter().min()?;
    let mut cycle = vec![start];
    let mut x = succ[start as usize];
    while x != start {
        cycle.push(x);
        x = succ[x as usize];
    }
    Some(cycle)
}

/// Maximum matching between out-copies and in-copies (Hopcroft–Karp);
/// returns the matched successor of each vertex.
fn max_matching(g: &Digraph) -> Vec<u32> {
    const INF: u32 = u32::MAX;
    let m = g.len();
    let mut match_l = vec![NONE; m];
    let mut match_r = vec![NONE; m];
    let mut dist = vec![INF; m];
    let mut queue = VecDeque::new();
    loop {
        queue.clear();
        for u in 0..m {
            if match_l[u] == NONE {
                dist[u] = 0;
                queue.push_back(u as u32);
            } else {
                dist[u] = INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in g.out(u) {
                let w = match_r[v as usize];
                if w == NONE {
                    found = true;
                } else if dist[w as usize] == INF {
                    dist[w as usize] = dist[u as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; m];
        for u in 0..m as u32 {
            if match_l[u as usize] == NONE {
                augment(g, u, &mut match_l, &mut match_r, &mut dist, &mut cursor);
            }
        }
    }
    match_l
}

fn augment(
    g: &Digraph,
    u: u32,
    match_l: &mut [u32],
    match_r: &mut [u32],
    dist: &mut [u32],
    cursor: &mut [usize],
) -> bool {
    while cursor[u as usize] < g.out(u).len() {
        let v = g.out(u)[cursor[u as usize]];
        cursor[u as usize] += 1;
        let w = match_r[v as usize];
        let ok = w == NONE
            || (dist[w as usize] == dist[u as usize].wrapping_add(1)
                && augment(g, w, match_l, match_r, dist, cursor));
        if ok {
            match_l[u as usize] = v;
            match_r[v as usize] = u;
            return true;
        }
    }
    dist[u as usize] = u32::MAX;
    false
}

/// Greedy path growth preferring successors with few unvisited
/// out-neighbors, closed into the longest cycle the path supports.
fn greedy_cycle(g: &Digraph) -> Option<Vec<u32>> {
    const STARTS: usize = 8;
    let m = g.len();
    let mut best: Option<Vec<u32>> = None;
    let mut pos = vec![NONE; m];
    let mut starts: Vec<u32> = (0..m as u32).collect();
    starts.sort_by_key(|&v| std::cmp::Reverse(g.out(v).len()));
    for &s in starts.iter().take(STARTS) {
        let mut path = vec![s];
        pos[s as usize] = 0;
        loop {
            let last = *path.last().expect("nonempty");
            let next = g
                .out(last)
                .iter()
                .copied()
                .filter(|&w| pos[w as usize] == NONE)
                .min_by_key(|&w| {
                    let free = g
                        .out(w)
                        .iter()
                        .filter(|&&x| pos[x as usize] == NONE)
                        .count();
                    (free, w)
                });
            match next {
                Some(w) => {
                    pos[w as usize] = path.len() as u32;
                    path.push(w);
                }
                None => break,
            }
        }
        for (e, &x) in path.iter().enumerate() {
            for &y in g.out(x) {
                let p = pos[y as usize];
                if p != NONE && (p as usize) + 1 < e {
                    let len = e - p as usize + 1;
                    if best.as_ref().is_none_or(|b| len > b.len()) {
                        best = Some(path[p as usize..=e].to_vec());
                    }
                }
            }
        }
        for &x in &path {
            pos[x as usize] = NONE;
        }
    }
    best
}

/// Turns a digraph cycle `i_0 → … → i_{s−1} → i_0` into a cycle of the
/// accepted graph: the realizing edge `u_k v_{k+1}` of each arc, and within
/// path `i_k` the subpath from `v_k` (tail window) back to `u_k` (head window).
pub fn assemble_graph_cycle(
    cycle: &[u32],
    merge: &MergeDigraph,
    windows: &EndpointWindows,
    ps: &PathSystem,
    graph: &AcceptedGraph,
) -> Result<Vec<VertexId>> {
    let s = cycle.len();
    let arcs: Vec<(VertexId, VertexId)> = (0..s)
        .map(|k| {
            merge
                .realizing(cycle[k], cycle[(k + 1) % s])
                .ok_or_else(|| {
                    Error::Internal(format!("no arc {} -> {}", cycle[k], cycle[(k + 1) % s]))
                })
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for k in 0..s {
        let path = ps.path(windows.path_index(cycle[k]));
        let (u, _) = arcs[k];
        let (_, v) = arcs[(k + s - 1) % s];
        let pu = ps.position(u).expect("window vertex lies on its path") as usize;
        let pv = ps.position(v).expect("window vertex lies on its path") as usize;
        if pu > pv {
            return Err(Error::Internal(format!(
                "windows overlap on path {}",
                cycle[k]
            )));
        }
        out.extend(path[pu..=pv].iter().rev());
    }
    if !is_graph_cycle(graph, &out) {
        return Err(Error::Internal("assembled cycle fails validation".into()));
    }
    Ok(out)
}

/// Whether `cycle` is a simple cycle (at least 3 distinct vertices,
/// consecutive and closing pairs adjacent) of `graph`.
pub fn is_graph_cycle(graph: &AcceptedGraph, cycle: &[VertexId]) -> bool {
    if cycle.len() < 3 || cycle.iter().any(|&v| v >= graph.n()) {
        return false;
    }
    let distinct: FxHashSet<VertexId> = cycle.iter().copied().collect();
    distinct.len() == cycle.len()
        && (0..cycle.len()).all(|k| graph.has_edge(cycle[k], cycle[(k + 1) % cycle.len()]))
}
