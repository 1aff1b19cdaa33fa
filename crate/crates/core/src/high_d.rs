//! Strategy for `d ≥ 4`: `d` greedy matchings, peeling of low-degree
//! vertices, fragile-set detection, and a final boost phase.

use std::collections::BTreeSet;

use crate::graph::{AcceptedGraph, VertexSet};
use crate::needs::{Eligible, NeedsMap};
use crate::plan::PhasePlan;
use crate::strategy::{Decision, FailedStage, PhaseClock, RoundView, Strategy, StrategyOutcome};
use crate::stream::{Edge, VertexId};

/// Largest set size searched by [`find_fragile`].
pub const FRAGILE_MAX_SIZE: usize = 6;

/// Greedy matching of one phase.
#[derive(Debug, Clone)]
pub struct MatchingState {
    matched: Vec<bool>,
    edges: Vec<Edge>,
}

impl MatchingState {
    pub fn new(n: u32) -> Self {
        MatchingState {
            matched: vec![false; n as usize],
            edges: Vec::new(),
        }
    }

    /// Accept iff both endpoints are still unmatched in this phase.
    pub fn decide(&self, e: Edge) -> Decision {
        if self.matched[e.u() as usize] || self.matched[e.v() as usize] {
            Decision::Reject
        } else {
            Decision::Accept
        }
    }

    pub fn record(&mut self, e: Edge) {
        self.matched[e.u() as usize] = true;
        self.matched[e.v() as usize] = true;
        self.edges.push(e);
    }

    pub fn is_matched(&self, v: VertexId) -> bool {
        self.matched[v as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn unmatched_count(&self) -> usize {
        self.matched.iter().filter(|&&m| !m).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelResult {
    /// `V(H)` (for the fixpoint: every vertex removed at some iteration plus
    /// the retained leaves).
    pub h_vertices: VertexSet,
    /// `L(H)`: vertices of degree 1 in `H` (last iteration).
    pub leaves: VertexSet,
    /// Leaves kept in `G'`: those of degree at least `d` in the peeled graph.
    pub retained_leaves: VertexSet,
    /// `V(G') = V \ (V(H) \ retained_leaves)`.
    pub g_prime: VertexSet,
    pub iterations: u32,
}

impl PeelResult {
    pub fn is_degenerate(&self) -> bool {
        self.g_prime.is_empty()
    }
}

/// One run of the exploration process `(A_s, P_s, N_s)`.
///
/// `A_0` holds the vertices of degree at most `d − 2`. Each step takes the
/// smallest vertex of `A` with at most `d − 2` neighbors still in `N`, moves
/// it to `P` and its `N`-neighbors to `A`. At termination `H = G[A ∪ P]`.
pub fn peel_once(g: &AcceptedGraph, d: u32) -> PeelResult {
    const IN_N: u8 = 0;
    const IN_A: u8 = 1;
    const IN_P: u8 = 2;
    let n = g.n();
    let low = d as usize - 2;
    let mut state = vec![IN_N; n as usize];
    let mut in_n = vec![0usize; n as usize];
    let mut ready = BTreeSet::new();
    for v in 0..n {
        if g.degree(v) <= low {
            state[v as usize] = IN_A;
        }
    }
    for v in 0..n {
        in_n[v as usize] = g
            .neighbors(v)
            .iter()
            .filter(|&&w| state[w as usize] == IN_N)
            .count();
        if state[v as usize] == IN_A && in_n[v as usize] <= low {
            ready.insert(v);
        }
    }
    while let Some(v) = ready.pop_first() {
        state[v as usize] = IN_P;
        for &w in g.neighbors(v) {
            if state[w as usize] != IN_N {
                continue;
            }
            state[w as usize] = IN_A;
            for &x in g.neighbors(w) {
                in_n[x as usize] -= 1;
                if state[x as usize] == IN_A && in_n[x as usize] <= low {
                    ready.insert(x);
                }
            }
            if in_n[w as usize] <= low {
                ready.insert(w);
            }
        }
    }
    let h = VertexSet::from_vertices(n, (0..n).filter(|&v| state[v as usize] != IN_N));
    let h_degree = |v: VertexId| g.neighbors(v).iter().filter(|&&w| h.contains(w)).count();
    let leaves = VertexSet::from_vertices(n, h.iter().filter(|&v| h_degree(v) == 1));
    let retained =
        VertexSet::from_vertices(n, leaves.iter().filter(|&v| g.degree(v) >= d as usize));
    let g_prime = VertexSet::from_vertices(
        n,
        (0..n).filter(|&v| !h.contains(v) || retained.contains(v)),
    );
    PeelResult {
        h_vertices: h,
        leaves,
        retained_leaves: retained,
        g_prime,
        iterations: 1,
    }
}

/// Peels until the graph induced on `G'` has minimum degree at least `d − 1`
/// (or `G'` is empty). Every iteration removes at least the vertices of
/// degree at most `d − 2`, so this terminates.
pub fn peel(g: &AcceptedGraph, d: u32) -> PeelResult {
    let n = g.n();
    let mut current = g.clone();
    let mut iterations = 0;
    loop {
        let r = peel_once(&current, d);
        iterations += 1;
        let keep = r.g_prime.clone();
        let low = keep.iter().any(|v| {
            current
                .neighbors(v)
                .iter()
                .filter(|&&w| keep.contains(w))
                .count()
                + 1
                < d as usize
        });
        if keep.is_empty() || !low {
            let removed = keep.complement();
            let h_vertices =
                VertexSet::from_vertices(n, removed.iter().chain(r.retained_leaves.iter()));
            return PeelResult {
                h_vertices,
                leaves: r.leaves,
                retained_leaves: r.retained_leaves,
                g_prime: keep,
                iterations,
            };
        }
        current = current.induced(&keep);
    }
}

/// Size of `N(U)` if it is at most `limit`, else `None`.
fn boundary_within(g: &AcceptedGraph, set: &[VertexId], limit: usize) -> Option<usize> {
    let mut boundary: Vec<VertexId> = Vec::with_capacity(limit + 1);
    for &v in set {
        for &w in g.neighbors(v) {
            if !set.contains(&w) && !boundary.contains(&w) {
                boundary.push(w);
                if boundary.len() > limit {
                    return None;
                }
            }
        }
    }
    Some(boundary.len())
}

/// Connected sets `U` with `|U| ≤ 6` and `|N(U)| ≤ d − 1`, as sorted vectors.
/// Every fragile vertex appears in at least one; only the first witness found
/// for each vertex is kept.
pub fn fragile_witnesses(g: &AcceptedGraph, d: u32) -> Vec<Vec<VertexId>> {
    let limit = d as usize - 1;
    let mut covered = VertexSet::new(g.n());
    let mut witnesses = Vec::new();
    for root in 0..g.n() {
        g.for_each_connected_set(root, FRAGILE_MAX_SIZE, true, |set| {
            if set.iter().all(|&v| covered.contains(v)) {
                return;
            }
            if boundary_within(g, set, limit).is_some() {
                for &v in set {
                    covered.insert(v);
                }
                let mut w = set.to_vec();
                w.sort_unstable();
                witnesses.push(w);
            }
        });
    }
    witnesses
}

/// Union of all connected sets `U` with `|U| ≤ 6` and `|N(U)| ≤ d − 1`.
pub fn find_fragile(g: &AcceptedGraph, d: u32) -> VertexSet {
    let mut out = VertexSet::new(g.n());
    for w in fragile_witnesses(g, d) {
        for v in w {
            out.insert(v);
        }
    }
    out
}

/// Boost requirements. Fragile vertices of `G'` need `d + 5` new neighbors in
/// `G'`; a vertex outside `G'` needs enough edges into `G'` to have `d`
/// neighbors there. With `G'` empty every vertex is treated as outside and
/// may connect anywhere.
pub fn plan_needs(g: &AcceptedGraph, g_prime: &VertexSet, fragile: &VertexSet, d: u32) -> NeedsMap {
    let n = g.n();
    let mut needs = NeedsMap::new(n);
    if g_prime.is_empty() {
        let pool = needs.add_pool(VertexSet::full(n));
        for v in 0..n {
            let need = (d as usize).saturating_sub(g.degree(v)) as u32;
            needs.set(v, need, Eligible::Pool(pool));
        }
        return needs;
    }
    let pool = needs.add_pool(g_prime.clone());
    for v in 0..n {
        if !g_prime.contains(v) {
            let inside = g
                .neighbors(v)
                .iter()
                .filter(|&&w| g_prime.contains(w))
                .count();
            let need = (d as usize).saturating_sub(inside) as u32;
            needs.set(v, need, Eligible::Pool(pool));
        } else if fragile.contains(v) {
            needs.set(v, d + 5, Eligible::Pool(pool));
        }
    }
    needs
}

/// The complete `d ≥ 4` stage machine.
#[derive(Debug, Clone)]
pub struct HighDStrategy {
    d: u32,
    n: u32,
    names: Vec<String>,
    clock: PhaseClock,
    matching: MatchingState,
    matching_sizes: Vec<usize>,
    peel: Option<PeelResult>,
    fragile: Option<VertexSet>,
    needs: Option<NeedsMap>,
    initial_need: u64,
    outside: usize,
}

impl HighDStrategy {
    pub fn new(plan: &PhasePlan) -> Self {
        let n = plan.params.n;
        HighDStrategy {
            d: plan.params.d,
            n,
            names: plan.phase_names(),
            clock: PhaseClock::new(plan.phases.iter().map(|p| p.length).collect()),
            matching: MatchingState::new(n),
            matching_sizes: Vec::new(),
            peel: None,
            fragile: None,
            needs: None,
            initial_need: 0,
            outside: 0,
        }
    }

    pub fn peel_result(&self) -> Option<&PeelResult> {
        self.peel.as_ref()
    }

    pub fn fragile(&self) -> Option<&VertexSet> {
        self.fragile.as_ref()
    }

    pub fn needs(&self) -> Option<&NeedsMap> {
        self.needs.as_ref()
    }

    pub fn matching_sizes(&self) -> &[usize] {
        &self.matching_sizes
    }

    fn end_phase(&mut self, start: u64, graph: &AcceptedGraph) {
        if self.clock.is_last() {
            return;
        }
        self.matching_sizes.push(self.matching.edges().len());
        self.matching = MatchingState::new(self.n);
        self.clock.advance(start);
        if self.clock.is_last() {
            self.setup_boost(graph);
        }
    }

    fn setup_boost(&mut self, graph: &AcceptedGraph) {
        let peel = peel(graph, self.d);
        let (compact, ids) = graph.compact(&peel.g_prime);
        let fragile = VertexSet::from_vertices(
            self.n,
            find_fragile(&compact, self.d)
                .iter()
                .map(|v| ids[v as usize]),
        );
        let needs = plan_needs(graph, &peel.g_prime, &fragile, self.d);
        self.initial_need = needs.total_need();
        self.outside = self.n as usize - peel.g_prime.len();
        self.peel = Some(peel);
        self.fragile = Some(fragile);
        self.needs = Some(needs);
    }
}

impl Strategy for HighDStrategy {
    fn phase_names(&self) -> Vec<String> {
        self.names.clone()
    }

    fn begin_round(&mut self, round: u64, graph: &AcceptedGraph) {
        while self.clock.expired(round) {
            self.end_phase(round, graph);
        }
    }

    fn current_phase(&self) -> usize {
        self.clock.index()
    }

    fn decide(&mut self, edge: Edge, view: &RoundView<'_>) -> Decision {
        if view.budget_left == 0 {
            return Decision::Reject;
        }
        match &self.needs {
            Some(needs) => needs.decide(edge, view.graph),
            None => self.matching.decide(edge),
        }
    }

    fn on_accepted(&mut self, edge: Edge, _: &AcceptedGraph) {
        match &mut self.needs {
            Some(needs) => needs.record(edge),
            None => self.matching.record(edge),
        }
    }

    fn finish(&mut self, graph: &AcceptedGraph) -> StrategyOutcome {
        // a stream that ran dry early still goes through the remaining stages
        while !self.clock.is_last() {
            self.end_phase(u64::MAX / 2, graph);
        }
        let peel = self.peel.as_ref().expect("boost set up");
        let needs = self.needs.as_ref().expect("boost set up");
        let mut out = StrategyOutcome::default();
        let diag = &mut out.diagnostics;
        for (i, &size) in self.matching_sizes.iter().enumerate() {
            diag.insert(format!("matching{}_size", i + 1), size as f64);
        }
        diag.insert("h_size".into(), peel.h_vertices.len() as f64);
        diag.insert("g_prime_size".into(), peel.g_prime.len() as f64);
        diag.insert("peel_iterations".into(), peel.iterations as f64);
        diag.insert(
            "fragile".into(),
            self.fragile.as_ref().map_or(0, |f| f.len()) as f64,
        );
        diag.insert("outside".into(), self.outside as f64);
        diag.insert("initial_need".into(), self.initial_need as f64);
        diag.insert("remaining_need".into(), needs.total_need() as f64);
        diag.insert("needs_satisfied".into(), needs.is_satisfied() as u8 as f64);
        out.failed_stage = if peel.is_degenerate() {
            Some(FailedStage::Peel)
        } else if !needs.is_satisfied() {
            Some(FailedStage::Boost)
        } else {
            None
        };
        out
    }
}
