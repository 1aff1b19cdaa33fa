//! Vertex-disjoint path growth and the head/tail windows used for merging.

use crate::strategy::Decision;
use crate::stream::{Edge, VertexId};

const NONE: u32 = u32::MAX;

/// `N` vertex-disjoint paths, path `i` started at vertex `i`. A path grows
/// only at its tail (the last added vertex).
#[derive(Debug, Clone)]
pub struct PathSystem {
    paths: Vec<Vec<VertexId>>,
    owner: Vec<u32>,
    position: Vec<u32>,
    covered: usize,
}

impl PathSystem {
    pub fn new(n: u32, num_paths: u32) -> Self {
        let num_paths = num_paths.min(n);
        let mut owner = vec![NONE; n as usize];
        let mut position = vec![NONE; n as usize];
        for i in 0..num_paths {
            owner[i as usize] = i;
            position[i as usize] = 0;
        }
        PathSystem {
            paths: (0..num_paths).map(|i| vec![i]).collect(),
            owner,
            position,
            covered: num_paths as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn path(&self, i: u32) -> &[VertexId] {
        &self.paths[i as usize]
    }

    pub fn paths(&self) -> &[Vec<VertexId>] {
        &self.paths
    }

    /// Number of vertices on some path.
    pub fn covered(&self) -> usize {
        self.covered
    }

    pub fn owner(&self, v: VertexId) -> Option<u32> {
        let o = self.owner[v as usize];
        (o != NONE).then_some(o)
    }

    /// Index of `v` within its path.
    pub fn position(&self, v: VertexId) -> Option<u32> {
        let p = self.position[v as usize];
        (p != NONE).then_some(p)
    }

    fn tail_path(&self, v: VertexId) -> Option<u32> {
        let o = self.owner(v)?;
        (*self.paths[o as usize].last().expect("paths are nonempty") == v).then_some(o)
    }

    /// The path whose tail `e` extends, and the new vertex.
    fn extension(&self, e: Edge) -> Option<(u32, VertexId)> {
        let (a, b) = e.endpoints();
        match (self.tail_path(a), self.tail_path(b)) {
            (Some(p), None) if self.owner(b).is_none() => Some((p, b)),
            (None, Some(p)) if self.owner(a).is_none() => Some((p, a)),
            _ => None,
        }
    }

    /// Accept iff one endpoint is the tail of a path and the other lies on no path.
    pub fn decide(&self, e: Edge) -> Decision {
        if self.extension(e).is_some() {
            Decision::Accept
        } else {
            Decision::Reject
        }
    }

    pub fn record(&mut self, e: Edge) {
        let (p, v) = self.extension(e).expect("recorded edge extends a path");
        let path = &mut self.paths[p as usize];
        self.owner[v as usize] = p;
        self.position[v as usize] = path.len() as u32;
        path.push(v);
        self.covered += 1;
    }
}

/// Indices of paths whose vertex count lies in `[min_len, max_len]`.
pub fn select_typical_paths(ps: &PathSystem, min_len: u32, max_len: u32) -> Vec<u32> {
    (0..ps.len() as u32)
        .filter(|&i| (min_len as usize..=max_len as usize).contains(&ps.path(i).len()))
        .collect()
}

/// Head windows `S'_m` (first vertices) and tail windows `S''_m` (last
/// vertices) of the typical paths, indexed by typical rank `m`.
#[derive(Debug, Clone)]
pub struct EndpointWindows {
    typical: Vec<u32>,
    sizes: Vec<u32>,
    /// Per vertex: `NONE`, or `2m` for `S'_m`, `2m + 1` for `S''_m`.
    slot: Vec<u32>,
}

impl EndpointWindows {
    /// Windows of `window` vertices, shrunk to half the path length if needed
    /// so the two windows of a path stay disjoint.
    pub fn new(ps: &PathSystem, typical: &[u32], window: u32) -> Self {
        let n = ps.owner.len();
        let mut slot = vec![NONE; n];
        let mut sizes = Vec::with_capacity(typical.len());
        for (m, &i) in typical.iter().enumerate() {
            let path = ps.path(i);
            let w = window.min(path.len() as u32 / 2) as usize;
            for &v in &path[..w] {
                slot[v as usize] = 2 * m as u32;
            }
            for &v in &path[path.len() - w..] {
                slot[v as usize] = 2 * m as u32 + 1;
            }
            sizes.push(w as u32);
        }
        EndpointWindows {
            typical: typical.to_vec(),
            sizes,
            slot,
        }
    }

    /// Number of typical paths `M`.
    pub fn len(&self) -> usize {
        self.typical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.typical.is_empty()
    }

    /// Path index of typical rank `m`.
    pub fn path_index(&self, m: u32) -> u32 {
        self.typical[m as usize]
    }

    pub fn window_size(&self, m: u32) -> u32 {
        self.sizes[m as usize]
    }

    pub fn head_of(&self, v: VertexId) -> Option<u32> {
        let s = self.slot[v as usize];
        (s != NONE && s.is_multiple_of(2)).then_some(s / 2)
    }

    pub fn tail_of(&self, v: VertexId) -> Option<u32> {
        let s = self.slot[v as usize];
        (s != NONE && s % 2 == 1).then_some(s / 2)
    }

    /// For an edge from some `S'_i` to some `S''_j`: `(i, j, u ∈ S'_i, v ∈ S''_j)`.
    pub fn classify(&self, e: Edge) -> Option<(u32, u32, VertexId, VertexId)> {
        let (a, b) = e.endpoints();
        if let (Some(i), Some(j)) = (self.head_of(a), self.tail_of(b)) {
            return Some((i, j, a, b));
        }
        if let (Some(i), Some(j)) = (self.head_of(b), self.tail_of(a)) {
            return Some((i, j, b, a));
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: u32, b: u32) -> Edge {
        Edge::new(a, b).unwrap()
    }

    #[test]
    fn growth_follows_the_tail() {
        let mut ps = PathSystem::new(10, 1);
        // the first two proposals extend the path, the third misses the tail
        assert_eq!(ps.decide(e(0, 5)), Decision::Accept);
        ps.record(e(0, 5));
        assert_eq!(ps.decide(e(5, 7)), Decision::Accept);
        ps.record(e(5, 7));
        assert_eq!(ps.decide(e(5, 8)), Decision::Reject);
        assert_eq!(ps.path(0), &[0, 5, 7]);
        assert_eq!(ps.covered(), 3);
        assert_eq!(ps.position(7), Some(2));
    }

    #[test]
    fn tails_do_not_join() {
        let ps = PathSystem::new(10, 2);
        assert_eq!(ps.decide(e(0, 1)), Decision::Reject);
        assert_eq!(ps.decide(e(3, 4)), Decision::Reject);
    }

    #[test]
    fn typical_window_is_inclusive() {
        let mut ps = PathSystem::new(30, 3);
        let mut next = 3;
        for (p, extra) in [(0u32, 7u32), (1, 8), (2, 3)] {
            for _ in 0..extra {
                let tail = *ps.path(p).last().unwrap();
                ps.record(e(tail, next));
                next += 1;
            }
        }
        // lengths 8, 9, 4
        assert_eq!(select_typical_paths(&ps, 8, 9), vec![0, 1]);
        assert_eq!(select_typical_paths(&ps, 9, 24), vec![1]);
    }

    #[test]
    fn windows_classify_head_to_tail_edges() {
        let mut ps = PathSystem::new(20, 2);
        let mut next = 2;
        for p in 0..2 {
            for _ in 0..4 {
                let tail = *ps.path(p).last().unwrap();
                ps.record(e(tail, next));
                next += 1;
            }
        }
        // path 0: 0 2 3 4 5, path 1: 1 6 7 8 9
        let w = EndpointWindows::new(&ps, &[0, 1], 1);
        assert_eq!(w.classify(e(0, 9)), Some((0, 1, 0, 9)));
        assert_eq!(w.classify(e(5, 1)), Some((1, 0, 1, 5)));
        assert_eq!(w.classify(e(0, 1)), None);
        assert_eq!(w.classify(e(3, 7)), None);
    }
}
