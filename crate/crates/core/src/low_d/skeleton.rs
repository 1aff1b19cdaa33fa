//! The `d = 3` skeleton: three arcs of the long cycle, the off-cycle set
//! `V_4`, the tri-matchings, `Ĉ`, and the degree-2 runs `P(v)`.

use crate::error::{Error, Result};
use crate::graph::{AcceptedGraph, VertexSet};
use crate::needs::{Eligible, NeedsMap};
use crate::stream::VertexId;

/// Splits `len` cycle positions into three contiguous ranges whose sizes
/// differ by at most one.
pub fn split_arcs(len: usize) -> [std::ops::Range<usize>; 3] {
    let base = len / 3;
    let extra = len % 3;
    let s0 = base + (extra > 0) as usize;
    let s1 = base + (extra > 1) as usize;
    [0..s0, s0..s0 + s1, s0 + s1..len]
}

/// The first `count` vertices (by index) that are not on the cycle.
pub fn choose_v4(n: u32, on_cycle: &VertexSet, count: usize) -> Vec<VertexId> {
    (0..n)
        .filter(|&v| !on_cycle.contains(v))
        .take(count)
        .collect()
}

/// For every cycle position of degree 2 in `Ĉ`, the cyclic range
/// `(start, len)` of `P(v)`: the maximal run of degree-2 positions around it
/// plus the degree-3 position at each end. Degree-3 positions map to `None`.
/// Fails if no position has degree 3.
pub fn compute_p_paths(deg3: &[bool]) -> Result<Vec<Option<(u32, u32)>>> {
    let len = deg3.len();
    let Some(anchor) = deg3.iter().position(|&b| b) else {
        return Err(Error::InvalidPlan("no degree-3 vertex on the cycle".into()));
    };
    let mut out = vec![None; len];
    // walk once around the cycle starting just after a degree-3 position
    let mut k = 1;
    while k <= len {
        let p = (anchor + k) % len;
        if deg3[p] {
            k += 1;
            continue;
        }
        let start = (p + len - 1) % len;
        let mut run = 0;
        while !deg3[(p + run) % len] {
            run += 1;
        }
        let range = (start as u32, (run + 2).min(len) as u32);
        for r in 0..run {
            out[(p + r) % len] = Some(range);
        }
        k += run;
    }
    Ok(out)
}

/// State of the three tri-matching phases between the arcs and `V_4`.
#[derive(Debug, Clone)]
pub struct TriMatching {
    /// Arc (0, 1, 2) of each cycle vertex, or `u8::MAX`.
    arc: Vec<u8>,
    in_v4: VertexSet,
    /// Partner per phase: `partner[phase][v]`.
    partner: [Vec<u32>; 3],
}

const NONE: u32 = u32::MAX;

impl TriMatching {
    pub fn new(n: u32, cycle: &[VertexId], v4: &[VertexId]) -> Self {
        let mut arc = vec![u8::MAX; n as usize];
        for (k, range) in split_arcs(cycle.len()).into_iter().enumerate() {
            for &v in &cycle[range] {
                arc[v as usize] = k as u8;
            }
        }
        TriMatching {
            arc,
            in_v4: VertexSet::from_vertices(n, v4.iter().copied()),
            partner: std::array::from_fn(|_| vec![NONE; n as usize]),
        }
    }

    pub fn v4(&self) -> &VertexSet {
        &self.in_v4
    }

    pub fn arc_of(&self, v: VertexId) -> Option<usize> {
        let a = self.arc[v as usize];
        (a != u8::MAX).then_some(a as usize)
    }

    fn pair(&self, phase: usize, a: VertexId, b: VertexId) -> Option<(VertexId, VertexId)> {
        let ok = |c: VertexId, w: VertexId| {
            self.arc_of(c) == Some(phase)
                && self.in_v4.contains(w)
                && self.partner[phase][c as usize] == NONE
                && self.partner[phase][w as usize] == NONE
        };
        if ok(a, b) {
            Some((a, b))
        } else if ok(b, a) {
            Some((b, a))
        } else {
            None
        }
    }

    /// Accept iff the edge joins an unmatched vertex of arc `phase` to an
    /// unmatched vertex of `V_4`.
    pub fn accepts(&self, phase: usize, a: VertexId, b: VertexId) -> bool {
        self.pair(phase, a, b).is_some()
    }

    pub fn record(&mut self, phase: usize, a: VertexId, b: VertexId) {
        let (c, w) = self
            .pair(phase, a, b)
            .expect("recorded edge is a tri-matching edge");
        self.partner[phase][c as usize] = w;
        self.partner[phase][w as usize] = c;
    }

    pub fn matching_size(&self, phase: usize) -> usize {
        self.in_v4
            .iter()
            .filter(|&w| self.partner[phase][w as usize] != NONE)
            .count()
    }

    /// `S`: the vertices of `V_4` matched in all three phases.
    pub fn attached(&self) -> Vec<VertexId> {
        self.in_v4
            .iter()
            .filter(|&w| (0..3).all(|p| self.partner[p][w as usize] != NONE))
            .collect()
    }

    /// Whether cycle vertex `c` is matched to a member of `S`.
    pub fn has_attached_partner(&self, c: VertexId, attached: &VertexSet) -> bool {
        self.arc_of(c).is_some_and(|p| {
            let w = self.partner[p][c as usize];
            w != NONE && attached.contains(w)
        })
    }
}

/// `Ĉ` as used for completion: the cycle, the attached set `S`, and which
/// cycle positions have degree 3 in `Ĉ` (cycle edges plus tri-matching edges
/// to `S`).
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub cycle: Vec<VertexId>,
    pub attached: Vec<VertexId>,
    pub members: VertexSet,
    pub deg3: Vec<bool>,
}

impl Skeleton {
    pub fn new(n: u32, cycle: Vec<VertexId>, tri: &TriMatching) -> Self {
        let attached = tri.attached();
        let s = VertexSet::from_vertices(n, attached.iter().copied());
        let deg3 = cycle
            .iter()
            .map(|&c| tri.has_attached_partner(c, &s))
            .collect();
        let members = VertexSet::from_vertices(n, cycle.iter().chain(attached.iter()).copied());
        Skeleton {
            cycle,
            attached,
            members,
            deg3,
        }
    }

    pub fn degree2_count(&self) -> usize {
        self.deg3.iter().filter(|&&b| !b).count()
    }

    /// The subgraph `Ĉ` itself (for structural checks).
    pub fn graph(&self, n: u32, tri: &TriMatching) -> AcceptedGraph {
        let len = self.cycle.len();
        let mut edges: Vec<(VertexId, VertexId)> = (0..len)
            .map(|k| (self.cycle[k], self.cycle[(k + 1) % len]))
            .collect();
        let s = VertexSet::from_vertices(n, self.attached.iter().copied());
        for &c in &self.cycle {
            if tri.has_attached_partner(c, &s) {
                let p = tri.arc_of(c).expect("cycle vertex");
                edges.push((c, tri.partner[p][c as usize]));
            }
        }
        AcceptedGraph::from_edges(n, edges).expect("Ĉ is simple")
    }
}

/// Which need each vertex carries in the completion phase.
#[derive(Debug, Clone)]
pub struct CompletionNeeds {
    pub needs: NeedsMap,
    /// Degree-2 cycle vertices (type a).
    pub degree2: Vec<VertexId>,
    /// Vertices outside `V(Ĉ)` (type b).
    pub outside: Vec<VertexId>,
}

impl CompletionNeeds {
    pub fn degree2_satisfied(&self) -> bool {
        self.degree2.iter().all(|&v| self.needs.need(v) == 0)
    }

    pub fn outside_satisfied(&self) -> bool {
        self.outside.iter().all(|&v| self.needs.need(v) == 0)
    }
}

/// Completion requirements: each degree-2 cycle vertex needs one neighbor in
/// `V(Ĉ) \ P(v)` (none if it already has one); each vertex outside `V(Ĉ)`
/// needs three neighbors in `V(Ĉ)`, counting those it already has.
pub fn completion_needs(
    graph: &AcceptedGraph,
    sk: &Skeleton,
    p_paths: &[Option<(u32, u32)>],
) -> CompletionNeeds {
    let n = graph.n();
    let mut needs = NeedsMap::new(n);
    let pool = needs.add_pool(sk.members.clone());
    needs.set_cycle(&sk.cycle);
    let mut degree2 = Vec::new();
    for (pos, &v) in sk.cycle.iter().enumerate() {
        let Some((start, len)) = p_paths[pos] else {
            continue;
        };
        degree2.push(v);
        needs.set(v, 1, Eligible::PoolExceptArc { pool, start, len });
        if graph.neighbors(v).iter().any(|&u| needs.is_eligible(v, u)) {
            needs.set(v, 0, Eligible::Pool(pool));
        }
    }
    let mut outside = Vec::new();
    for v in 0..n {
        if sk.members.contains(v) {
            continue;
        }
        outside.push(v);
        let inside = graph
            .neighbors(v)
            .iter()
            .filter(|&&w| sk.members.contains(w))
            .count();
        needs.set(
            v,
            3usize.saturating_sub(inside) as u32,
            Eligible::Pool(pool),
        );
    }
    CompletionNeeds {
        needs,
        degree2,
        outside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arcs_are_balanced() {
        assert_eq!(split_arcs(10), [0..4, 4..7, 7..10]);
        assert_eq!(split_arcs(9), [0..3, 3..6, 6..9]);
        assert_eq!(split_arcs(3), [0..1, 1..2, 2..3]);
    }

    #[test]
    fn alternating_degrees_give_three_vertex_paths() {
        let deg3: Vec<bool> = (0..8).map(|i| i % 2 == 0).collect();
        let p = compute_p_paths(&deg3).unwrap();
        for i in 0..8 {
            if i % 2 == 0 {
                assert_eq!(p[i], None);
            } else {
                assert_eq!(p[i], Some(((i as u32 + 7) % 8, 3)));
            }
        }
    }

    #[test]
    fn a_run_shares_one_path() {
        // degree 3 at positions 0 and 5; runs 1..=4 and 6..=9 (wrapping to 0)
        let mut deg3 = vec![false; 10];
        deg3[0] = true;
        deg3[5] = true;
        let p = compute_p_paths(&deg3).unwrap();
        for i in 1..5 {
            assert_eq!(p[i], Some((0, 6)));
        }
        for i in 6..10 {
            assert_eq!(p[i], Some((5, 6)));
        }
    }

    #[test]
    fn no_degree3_vertex_is_an_error() {
        assert!(compute_p_paths(&[false; 5]).is_err());
    }

    #[test]
    fn single_degree3_vertex_spans_the_cycle() {
        let mut deg3 = vec![false; 5];
        deg3[2] = true;
        let p = compute_p_paths(&deg3).unwrap();
        assert_eq!(p[3], Some((2, 5)));
        assert_eq!(p[1], Some((2, 5)));
    }

    #[test]
    fn tri_matching_respects_arcs() {
        let cycle: Vec<u32> = (0..6).collect();
        let mut tri = TriMatching::new(10, &cycle, &[6, 7]);
        assert!(tri.accepts(0, 0, 6));
        assert!(!tri.accepts(0, 2, 6));
        tri.record(0, 6, 0);
        assert!(!tri.accepts(0, 1, 6));
        assert!(tri.accepts(0, 1, 7));
        tri.record(1, 2, 6);
        tri.record(2, 4, 6);
        assert_eq!(tri.attached(), vec![6]);
        let sk = Skeleton::new(10, cycle, &tri);
        assert_eq!(sk.deg3, vec![true, false, true, false, true, false]);
        let g = sk.graph(10, &tri);
        assert_eq!(g.degree(6), 3);
        assert_eq!(g.edge_count(), 9);
    }

    #[test]
    fn v4_takes_lowest_off_cycle_vertices() {
        let on = VertexSet::from_vertices(8, [0, 2, 3]);
        assert_eq!(choose_v4(8, &on, 3), vec![1, 4, 5]);
    }
}
