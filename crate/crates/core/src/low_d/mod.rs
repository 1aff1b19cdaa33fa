//! Strategy for `d ∈ {2, 3}`: grow vertex-disjoint paths, merge the typical
//! ones into a long cycle through a digraph on their end windows, then attach
//! the remaining vertices (`d = 2`) or build `Ĉ` with three tri-matchings and
//! complete it (`d = 3`).

pub mod cycle;
pub mod paths;
pub mod skeleton;

use crate::graph::{AcceptedGraph, VertexSet};
use crate::needs::{Eligible, NeedsMap};
use crate::plan::{PathGeometry, PhasePlan};
use crate::strategy::{Decision, FailedStage, PhaseClock, RoundView, Strategy, StrategyOutcome};
use crate::stream::{Edge, VertexId};

pub use cycle::{
    assemble_graph_cycle, is_graph_cycle, is_valid_digraph_cycle, long_cycle_in_digraph, Digraph,
    MergeDigraph,
};
pub use paths::{select_typical_paths, EndpointWindows, PathSystem};
pub use skeleton::{
    choose_v4, completion_needs, compute_p_paths, split_arcs, CompletionNeeds, Skeleton,
    TriMatching,
};

const PATH: usize = 0;
const MERGE: usize = 1;

/// `d = 2` attachment: every vertex off the cycle needs two neighbors on it.
pub fn attach_needs_d2(graph: &AcceptedGraph, cycle: &[VertexId]) -> NeedsMap {
    let n = graph.n();
    let on_cycle = VertexSet::from_vertices(n, cycle.iter().copied());
    let mut needs = NeedsMap::new(n);
    let pool = needs.add_pool(on_cycle.clone());
    for v in 0..n {
        if !on_cycle.contains(v) {
            let inside = graph
                .neighbors(v)
                .iter()
                .filter(|&&w| on_cycle.contains(w))
                .count();
            needs.set(
                v,
                2usize.saturating_sub(inside) as u32,
                Eligible::Pool(pool),
            );
        }
    }
    needs
}

/// The complete `d ∈ {2, 3}` stage machine.
#[derive(Debug, Clone)]
pub struct LowDStrategy {
    d: u32,
    n: u32,
    names: Vec<String>,
    clock: PhaseClock,
    geometry: PathGeometry,
    paths: PathSystem,
    typical: Vec<u32>,
    windows: Option<EndpointWindows>,
    merge: Option<MergeDigraph>,
    self_loop_proposals: u64,
    digraph_cycle: Option<Vec<u32>>,
    graph_cycle: Option<Vec<VertexId>>,
    tri: Option<TriMatching>,
    skeleton: Option<Skeleton>,
    completion: Option<CompletionNeeds>,
    attach: Option<NeedsMap>,
    /// Degree needs used when no cycle was built.
    fallback: Option<NeedsMap>,
    initial_need: u64,
    failed: Option<FailedStage>,
}

impl LowDStrategy {
    pub fn new(plan: &PhasePlan) -> Self {
        let n = plan.params.n;
        let geometry = plan
            .geometry
            .expect("low-degree plans carry a path geometry");
        LowDStrategy {
            d: plan.params.d,
            n,
            names: plan.phase_names(),
            clock: PhaseClock::new(plan.phases.iter().map(|p| p.length).collect()),
            geometry,
            paths: PathSystem::new(n, geometry.num_paths),
            typical: Vec::new(),
            windows: None,
            merge: None,
            self_loop_proposals: 0,
            digraph_cycle: None,
            graph_cycle: None,
            tri: None,
            skeleton: None,
            completion: None,
            attach: None,
            fallback: None,
            initial_need: 0,
            failed: None,
        }
    }

    pub fn path_system(&self) -> &PathSystem {
        &self.paths
    }

    pub fn typical(&self) -> &[u32] {
        &self.typical
    }

    /// Vertices on typical paths.
    pub fn typical_coverage(&self) -> usize {
        self.typical.iter().map(|&i| self.paths.path(i).len()).sum()
    }

    pub fn windows(&self) -> Option<&EndpointWindows> {
        self.windows.as_ref()
    }

    pub fn merge_digraph(&self) -> Option<&MergeDigraph> {
        self.merge.as_ref()
    }

    pub fn digraph_cycle(&self) -> Option<&[u32]> {
        self.digraph_cycle.as_deref()
    }

    pub fn graph_cycle(&self) -> Option<&[VertexId]> {
        self.graph_cycle.as_deref()
    }

    pub fn tri_matching(&self) -> Option<&TriMatching> {
        self.tri.as_ref()
    }

    pub fn skeleton(&self) -> Option<&Skeleton> {
        self.skeleton.as_ref()
    }

    pub fn completion(&self) -> Option<&CompletionNeeds> {
        self.completion.as_ref()
    }

    pub fn attach_needs(&self) -> Option<&NeedsMap> {
        self.attach.as_ref()
    }

    fn final_needs(&self) -> Option<&NeedsMap> {
        self.attach
            .as_ref()
            .or(self.completion.as_ref().map(|c| &c.needs))
            .or(self.fallback.as_ref())
    }

    fn end_phase(&mut self, start: u64, graph: &AcceptedGraph) {
        if self.clock.is_last() {
            return;
        }
        match self.clock.index() {
            PATH => self.setup_merge(),
            MERGE => self.close_merge(graph),
            4 => self.setup_completion(graph),
            _ => {}
        }
        self.clock.advance(start);
        if self.clock.is_last() && self.final_needs().is_none() {
            self.setup_fallback(graph);
        }
    }

    /// Without a cycle every vertex simply needs `d` neighbors.
    fn setup_fallback(&mut self, graph: &AcceptedGraph) {
        let mut needs = NeedsMap::new(self.n);
        let pool = needs.add_pool(VertexSet::full(self.n));
        for v in 0..self.n {
            let need = (self.d as usize).saturating_sub(graph.degree(v)) as u32;
            needs.set(v, need, Eligible::Pool(pool));
        }
        self.initial_need = needs.total_need();
        self.fallback = Some(needs);
    }

    fn setup_merge(&mut self) {
        let g = &self.geometry;
        self.typical = select_typical_paths(&self.paths, g.typical_min, g.typical_max);
        if self.typical.len() < 3 {
            self.failed.get_or_insert(FailedStage::Path);
            return;
        }
        let windows = EndpointWindows::new(&self.paths, &self.typical, g.window);
        self.merge = Some(MergeDigraph::new(windows.len() as u32));
        self.windows = Some(windows);
    }

    fn close_merge(&mut self, graph: &AcceptedGraph) {
        let cycle = match (&self.merge, &self.windows) {
            (Some(merge), Some(windows)) => {
                let m = windows.len() as f64;
                let target = ((1.0 - 1.0 / self.geometry.omega_eff) * m).ceil() as usize;
                long_cycle_in_digraph(&merge.digraph, target).map(|c| {
                    let vertices = assemble_graph_cycle(&c, merge, windows, &self.paths, graph)
                        .expect("cycles assembled from accepted edges are valid");
                    (c, vertices)
                })
            }
            _ => None,
        };
        let Some((digraph_cycle, graph_cycle)) = cycle else {
            self.failed.get_or_insert(FailedStage::Merge);
            return;
        };
        if self.d == 2 {
            let needs = attach_needs_d2(graph, &graph_cycle);
            self.initial_need = needs.total_need();
            self.attach = Some(needs);
        } else {
            let on_cycle = VertexSet::from_vertices(self.n, graph_cycle.iter().copied());
            let largest = split_arcs(graph_cycle.len())[0].len();
            let v4 = choose_v4(self.n, &on_cycle, largest);
            self.tri = Some(TriMatching::new(self.n, &graph_cycle, &v4));
        }
        self.digraph_cycle = Some(digraph_cycle);
        self.graph_cycle = Some(graph_cycle);
    }

    fn setup_completion(&mut self, graph: &AcceptedGraph) {
        let (Some(tri), Some(cycle)) = (&self.tri, &self.graph_cycle) else {
            return;
        };
        let sk = Skeleton::new(self.n, cycle.clone(), tri);
        let p_paths = if sk.attached.is_empty() {
            self.failed.get_or_insert(FailedStage::Tri);
            vec![None; sk.cycle.len()]
        } else {
            compute_p_paths(&sk.deg3).expect("attached vertices give degree-3 cycle vertices")
        };
        let completion = completion_needs(graph, &sk, &p_paths);
        self.initial_need = completion.needs.total_need();
        self.completion = Some(completion);
        self.skeleton = Some(sk);
    }

    /// Whether every attachment need (`d = 2`) is met on top of a cycle.
    pub fn attach_satisfied(&self) -> bool {
        self.attach.as_ref().is_some_and(|n| n.is_satisfied())
    }

    /// Whether the completion hypotheses hold (`d = 3`): `Ĉ` extends the cycle
    /// and every degree-2 cycle vertex reaches `V(Ĉ) \ P(v)`.
    pub fn skeleton_hypotheses_hold(&self) -> bool {
        match (&self.skeleton, &self.completion) {
            (Some(sk), Some(c)) => !sk.attached.is_empty() && c.degree2_satisfied(),
            _ => false,
        }
    }
}

impl Strategy for LowDStrategy {
    fn phase_names(&self) -> Vec<String> {
        self.names.clone()
    }

    fn begin_round(&mut self, round: u64, graph: &AcceptedGraph) {
        if self.clock.index() == PATH
            && self.paths.covered() >= self.geometry.coverage_target as usize
        {
            self.end_phase(round, graph);
        }
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
        let phase = self.clock.index();
        if phase == PATH {
            return self.paths.decide(edge);
        }
        if phase == MERGE {
            let (Some(windows), Some(merge)) = (&self.windows, &self.merge) else {
                return Decision::Reject;
            };
            return match windows.classify(edge) {
                Some((i, j, _, _)) if i == j => {
                    self.self_loop_proposals += 1;
                    Decision::Reject
                }
                Some((i, j, _, _)) if !merge.digraph.has_arc(i, j) => Decision::Accept,
                _ => Decision::Reject,
            };
        }
        if !self.clock.is_last() {
            let (a, b) = edge.endpoints();
            return match &self.tri {
                Some(tri) if tri.accepts(phase - 2, a, b) => Decision::Accept,
                _ => Decision::Reject,
            };
        }
        match self.final_needs() {
            Some(needs) => needs.decide(edge, view.graph),
            None => Decision::Reject,
        }
    }

    fn on_accepted(&mut self, edge: Edge, _: &AcceptedGraph) {
        let phase = self.clock.index();
        if phase == PATH {
            self.paths.record(edge);
        } else if phase == MERGE {
            let windows = self.windows.as_ref().expect("merge accepts need windows");
            let (i, j, u, v) = windows.classify(edge).expect("accepted merge edge");
            self.merge.as_mut().expect("merge digraph").add(i, j, u, v);
        } else if !self.clock.is_last() {
            let (a, b) = edge.endpoints();
            self.tri
                .as_mut()
                .expect("tri-matching")
                .record(phase - 2, a, b);
        } else if let Some(needs) = self.attach.as_mut() {
            needs.record(edge);
        } else if let Some(c) = self.completion.as_mut() {
            c.needs.record(edge);
        } else if let Some(f) = self.fallback.as_mut() {
            f.record(edge);
        }
    }

    fn finish(&mut self, graph: &AcceptedGraph) -> StrategyOutcome {
        while !self.clock.is_last() {
            self.end_phase(u64::MAX / 2, graph);
        }
        let mut out = StrategyOutcome::default();
        let diag = &mut out.diagnostics;
        diag.insert("paths".into(), self.paths.len() as f64);
        diag.insert("covered".into(), self.paths.covered() as f64);
        diag.insert("typical".into(), self.typical.len() as f64);
        diag.insert("typical_coverage".into(), self.typical_coverage() as f64);
        if let Some(merge) = &self.merge {
            diag.insert("digraph_arcs".into(), merge.digraph.arc_count() as f64);
        }
        diag.insert(
            "self_loop_proposals".into(),
            self.self_loop_proposals as f64,
        );
        if let Some(c) = &self.digraph_cycle {
            diag.insert("cycle_paths".into(), c.len() as f64);
            diag.insert(
                "cycle_fraction".into(),
                c.len() as f64 / self.typical.len() as f64,
            );
        }
        if let Some(c) = &self.graph_cycle {
            diag.insert("cycle_vertices".into(), c.len() as f64);
        }
        if let Some(tri) = &self.tri {
            diag.insert("v4".into(), tri.v4().len() as f64);
            for p in 0..3 {
                diag.insert(format!("tri{}_size", p + 1), tri.matching_size(p) as f64);
            }
        }
        if let Some(sk) = &self.skeleton {
            diag.insert("attached".into(), sk.attached.len() as f64);
            diag.insert("degree2".into(), sk.degree2_count() as f64);
            diag.insert(
                "degree2_fraction".into(),
                sk.degree2_count() as f64 / sk.cycle.len() as f64,
            );
        }
        let needs = self.final_needs();
        let satisfied = needs.is_some_and(|n| n.is_satisfied());
        diag.insert("initial_need".into(), self.initial_need as f64);
        diag.insert(
            "remaining_need".into(),
            needs.map_or(0, |n| n.total_need()) as f64,
        );
        diag.insert("needs_satisfied".into(), satisfied as u8 as f64);
        out.failed_stage = self.failed.or(match (satisfied, self.d) {
            (true, _) => None,
            (false, 2) => Some(FailedStage::Attach),
            (false, _) => Some(FailedStage::Completion),
        });
        out
    }
}
