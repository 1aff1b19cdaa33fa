//! Builder's accepted graph and the structural queries the strategies ask of it.

use std::io::{self, Write};

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::stream::{Edge, VertexId};

/// Dense membership set over `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    member: Vec<bool>,
    len: usize,
}

impl VertexSet {
    pub fn new(n: u32) -> Self {
        VertexSet {
            member: vec![false; n as usize],
            len: 0,
        }
    }

    pub fn full(n: u32) -> Self {
        VertexSet {
            member: vec![true; n as usize],
            len: n as usize,
        }
    }

    pub fn from_vertices(n: u32, vertices: impl IntoIterator<Item = VertexId>) -> Self {
        let mut set = VertexSet::new(n);
        for v in vertices {
            set.insert(v);
        }
        set
    }

    /// Size of the ground set.
    pub fn universe(&self) -> u32 {
        self.member.len() as u32
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.member.get(v as usize).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: VertexId) -> bool {
        let slot = &mut self.member[v as usize];
        if *slot {
            return false;
        }
        *slot = true;
        self.len += 1;
        true
    }

    pub fn remove(&mut self, v: VertexId) -> bool {
        let slot = &mut self.member[v as usize];
        if !*slot {
            return false;
        }
        *slot = false;
        self.len -= 1;
        true
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(v, _)| v as VertexId)
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    pub fn complement(&self) -> VertexSet {
        VertexSet {
            member: self.member.iter().map(|m| !m).collect(),
            len: self.member.len() - self.len,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AcceptedGraph {
    n: u32,
    adjacency: Vec<Vec<VertexId>>,
    edge_keys: FxHashSet<u64>,
}

impl AcceptedGraph {
    pub fn new(n: u32) -> Self {
        AcceptedGraph {
            n,
            adjacency: vec![Vec::new(); n as usize],
            edge_keys: FxHashSet::default(),
        }
    }

    pub fn from_edges(
        n: u32,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let mut g = AcceptedGraph::new(n);
        for (a, b) in edges {
            g.add_edge(Edge::new(a, b)?)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_keys.len()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v as usize].len()
    }

    /// Neighbors in insertion order.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v as usize]
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        match Edge::new(a, b) {
            Ok(e) => self.edge_keys.contains(&e.key(self.n)),
            Err(_) => false,
        }
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edge_keys.contains(&e.key(self.n))
    }

    pub fn add_edge(&mut self, e: Edge) -> Result<()> {
        let (u, v) = e.endpoints();
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: x,
                    n: self.n,
                });
            }
        }
        if !self.edge_keys.insert(e.key(self.n)) {
            return Err(Error::DuplicateEdge(e));
        }
        self.adjacency[u as usize].push(v);
        self.adjacency[v as usize].push(u);
        Ok(())
    }

    /// All edges, sorted lexicographically.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .edge_keys
            .iter()
            .map(|&k| Edge::from_key(k, self.n))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn min_degree(&self) -> Option<(VertexId, usize)> {
        (0..self.n)
            .map(|v| (v, self.degree(v)))
            .min_by_key(|&(_, d)| d)
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Subgraph on the same vertex ids keeping only edges inside `keep`.
    pub fn induced(&self, keep: &VertexSet) -> AcceptedGraph {
        let mut g = AcceptedGraph::new(self.n);
        for e in self.edges() {
            if keep.contains(e.u()) && keep.contains(e.v()) {
                g.add_edge(e).expect("edges of a simple graph stay simple");
            }
        }
        g
    }

    /// Subgraph induced on `keep`, relabelled to `0..keep.len()`. The returned
    /// vector maps new ids back to the original ones.
    pub fn compact(&self, keep: &VertexSet) -> (AcceptedGraph, Vec<VertexId>) {
        let old_ids = keep.to_vec();
        let mut new_id = vec![u32::MAX; self.n as usize];
        for (i, &v) in old_ids.iter().enumerate() {
            new_id[v as usize] = i as u32;
        }
        let mut g = AcceptedGraph::new(old_ids.len() as u32);
        for e in self.edges() {
            let (a, b) = (new_id[e.u() as usize], new_id[e.v() as usize]);
            if a != u32::MAX && b != u32::MAX {
                g.add_edge(Edge::new(a, b).expect("distinct"))
                    .expect("edges of a simple graph stay simple");
            }
        }
        (g, old_ids)
    }

    /// External neighborhood `N(U) = (⋃_{v∈U} N(v)) \ U`, sorted.
    pub fn neighborhood(&self, set: &[VertexId]) -> Vec<VertexId> {
        let inside: FxHashSet<VertexId> = set.iter().copied().collect();
        let mut out: Vec<VertexId> = set
            .iter()
            .flat_map(|&v| self.neighbors(v).iter().copied())
            .filter(|w| !inside.contains(w))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Every connected vertex set of size at most `max_size` that contains `v`,
    /// each exactly once, as sorted vectors.
    pub fn enumerate_connected_sets(&self, v: VertexId, max_size: usize) -> Vec<Vec<VertexId>> {
        let mut out = Vec::new();
        self.for_each_connected_set(v, max_size, false, |set| {
            let mut s = set.to_vec();
            s.sort_unstable();
            out.push(s);
        });
        out
    }

    /// Visits connected vertex sets containing `root` with at most `max_size`
    /// vertices. With `root_is_min`, only sets whose smallest vertex is `root`
    /// are visited, so rooting at every vertex visits every set once.
    ///
    /// The search branches on the frontier in order: branch `i` adds frontier
    /// vertex `i` and bans frontier vertices `0..i`, which partitions the
    /// supersets and rules out duplicates.
    pub fn for_each_connected_set<F: FnMut(&[VertexId])>(
        &self,
        root: VertexId,
        max_size: usize,
        root_is_min: bool,
        mut visit: F,
    ) {
        if max_size == 0 {
            return;
        }
        let floor = root_is_min.then_some(root);
        let allowed = |w: VertexId| floor.is_none_or(|r| w > r);
        let mut set = vec![root];
        let mut frontier: Vec<VertexId> = Vec::new();
        for &w in self.neighbors(root) {
            if w != root && allowed(w) && !frontier.contains(&w) {
                frontier.push(w);
            }
        }
        let mut banned = Vec::new();
        self.extend_connected(
            &mut set,
            &frontier,
            &mut banned,
            max_size,
            &allowed,
            &mut visit,
        );
    }

    fn extend_connected<F: FnMut(&[VertexId])>(
        &self,
        set: &mut Vec<VertexId>,
        frontier: &[VertexId],
        banned: &mut Vec<VertexId>,
        max_size: usize,
        allowed: &dyn Fn(VertexId) -> bool,
        visit: &mut F,
    ) {
        visit(set);
        if set.len() == max_size {
            return;
        }
        let banned_len = banned.len();
        for (i, &c) in frontier.iter().enumerate() {
            let mut next: Vec<VertexId> = frontier[i + 1..].to_vec();
            for &w in self.neighbors(c) {
                if allowed(w)
                    && !set.contains(&w)
                    && !frontier.contains(&w)
                    && !banned.contains(&w)
                    && !next.contains(&w)
                {
                    next.push(w);
                }
            }
            set.push(c);
            self.extend_connected(set, &next, banned, max_size, allowed, visit);
            set.pop();
            banned.push(c);
        }
        banned.truncate(banned_len);
    }

    /// Number of connected components of the graph with `removed` deleted.
    pub fn components_without(&self, removed: &VertexSet) -> usize {
        let mut seen = removed.clone();
        let mut stack = Vec::new();
        let mut components = 0;
        for s in 0..self.n {
            if seen.contains(s) {
                continue;
            }
            components += 1;
            seen.insert(s);
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &y in self.neighbors(x) {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.components_without(&VertexSet::new(self.n)) <= 1
    }

    /// Writes one `u v` line per edge, 0-based, `u < v`, sorted lexicographically.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for e in self.edges() {
            writeln!(out, "{} {}", e.u(), e.v())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> AcceptedGraph {
        AcceptedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn add_edge_updates_degrees() {
        let mut g = AcceptedGraph::new(3);
        g.add_edge(Edge::new(0, 1).unwrap()).unwrap();
        assert_eq!((g.degree(0), g.degree(1), g.degree(2)), (1, 1, 0));
        assert!(matches!(
            g.add_edge(Edge::new(1, 0).unwrap()),
            Err(Error::DuplicateEdge(_))
        ));
        assert!(matches!(
            g.add_edge(Edge::new(0, 3).unwrap()),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn complete_graph_on_four() {
        let g =
            AcceptedGraph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!((0..4).all(|v| g.degree(v) == 3));
        let degree_sum: usize = (0..4).map(|v| g.degree(v)).sum();
        assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn neighborhood_excludes_the_set() {
        let g = path3();
        assert_eq!(g.neighborhood(&[1]), vec![0, 2]);
        assert!(g.neighborhood(&[0, 1, 2]).is_empty());
        assert_eq!(g.neighborhood(&[0, 1]), vec![2]);
    }

    #[test]
    fn connected_sets_of_isolated_vertex() {
        let g = AcceptedGraph::new(4);
        assert_eq!(g.enumerate_connected_sets(2, 6), vec![vec![2]]);
    }

    #[test]
    fn connected_sets_of_triangle() {
        let g = AcceptedGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut sets = g.enumerate_connected_sets(0, 2);
        sets.sort();
        assert_eq!(sets, vec![vec![0], vec![0, 1], vec![0, 2]]);
        let mut all = g.enumerate_connected_sets(0, 3);
        all.sort();
        assert_eq!(all, vec![vec![0], vec![0, 1], vec![0, 1, 2], vec![0, 2]]);
    }

    #[test]
    fn compact_relabels_in_order() {
        let g = AcceptedGraph::from_edges(5, [(0, 4), (1, 4), (2, 3)]).unwrap();
        let keep = VertexSet::from_vertices(5, [1, 4, 2]);
        let (h, ids) = g.compact(&keep);
        assert_eq!(ids, vec![1, 2, 4]);
        assert_eq!(h.edges(), vec![Edge::new(0, 2).unwrap()]);
    }

    #[test]
    fn components_after_removal() {
        let g = path3();
        assert_eq!(g.components_without(&VertexSet::new(3)), 1);
        assert_eq!(g.components_without(&VertexSet::from_vertices(3, [1])), 2);
        assert!(!AcceptedGraph::new(2).is_connected());
    }

    #[test]
    fn edge_list_is_sorted() {
        let g = AcceptedGraph::from_edges(4, [(2, 3), (1, 0), (0, 3)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n0 3\n2 3\n");
    }

    #[test]
    fn vertex_set_basics() {
        let mut s = VertexSet::new(5);
        assert!(s.insert(3));
        assert!(!s.insert(3));
        assert!(s.insert(1));
        assert_eq!(s.to_vec(), vec![1, 3]);
        assert_eq!(s.complement().to_vec(), vec![0, 2, 4]);
        assert!(s.remove(3));
        assert_eq!(s.len(), 1);
        assert!(!s.contains(99));
    }
}
