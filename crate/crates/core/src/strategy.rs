//! The round loop: proposals in, decisions out, budgets enforced.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AcceptedGraph;
use crate::stream::{Edge, ProposalStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

/// Round ceiling `t`, acceptance ceiling `b`, and what has been spent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetLedger {
    pub t: u64,
    pub b: u64,
    pub rounds_used: u64,
    pub edges_accepted: u64,
    /// Rounds at which the strategy said Accept with the edge budget spent.
    pub overrides: Vec<u64>,
}

impl BudgetLedger {
    pub fn new(t: u64, b: u64) -> Self {
        BudgetLedger {
            t,
            b,
            rounds_used: 0,
            edges_accepted: 0,
            overrides: Vec::new(),
        }
    }

    pub fn edges_left(&self) -> u64 {
        self.b - self.edges_accepted
    }
}

/// Stage at which a trial is flagged as failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailedStage {
    Peel,
    Boost,
    Path,
    Merge,
    Tri,
    Attach,
    Completion,
    Connectivity,
}

impl FailedStage {
    pub const ALL: [FailedStage; 8] = [
        FailedStage::Peel,
        FailedStage::Boost,
        FailedStage::Path,
        FailedStage::Merge,
        FailedStage::Tri,
        FailedStage::Attach,
        FailedStage::Completion,
        FailedStage::Connectivity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FailedStage::Peel => "peel",
            FailedStage::Boost => "boost",
            FailedStage::Path => "path",
            FailedStage::Merge => "merge",
            FailedStage::Tri => "tri",
            FailedStage::Attach => "attach",
            FailedStage::Completion => "completion",
            FailedStage::Connectivity => "connectivity",
        }
    }
}

impl fmt::Display for FailedStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FailedStage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FailedStage::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Schema(format!("unknown stage `{s}`")))
    }
}

/// What a strategy reports after the last round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StrategyOutcome {
    pub failed_stage: Option<FailedStage>,
    /// Named measurements (sizes, counts, flags as 0/1).
    pub diagnostics: BTreeMap<String, f64>,
}

/// What a strategy may look at when deciding: the current round, its own
/// accepted graph, and the remaining edge budget. It never sees the stream.
pub struct RoundView<'a> {
    pub round: u64,
    pub graph: &'a AcceptedGraph,
    pub budget_left: u64,
}

/// An online Builder strategy.
pub trait Strategy {
    fn phase_names(&self) -> Vec<String>;

    /// Called before each round; phase transitions happen here.
    fn begin_round(&mut self, round: u64, graph: &AcceptedGraph);

    /// Index into `phase_names` of the phase the last `begin_round` is in.
    fn current_phase(&self) -> usize;

    fn decide(&mut self, edge: Edge, view: &RoundView<'_>) -> Decision;

    /// Called after an accepted edge has been added to the graph.
    fn on_accepted(&mut self, edge: Edge, graph: &AcceptedGraph);

    /// Called once after the last round.
    fn finish(&mut self, graph: &AcceptedGraph) -> StrategyOutcome;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTally {
    pub name: String,
    pub rounds: u64,
    pub accepts: u64,
}

/// Result of [`run_builder`].
#[derive(Debug, Clone)]
pub struct BuilderRun {
    pub graph: AcceptedGraph,
    pub phases: Vec<PhaseTally>,
    pub outcome: StrategyOutcome,
}

/// Feeds proposals to `strategy` until `t` rounds or stream exhaustion.
///
/// A proposal of an edge already in the graph (possible only for auxiliary
/// streams) uses up its round without consulting the strategy. An Accept
/// with the edge budget spent is turned into a rejection and logged in
/// `ledger.overrides`.
pub fn run_builder(
    stream: &mut ProposalStream,
    strategy: &mut dyn Strategy,
    ledger: &mut BudgetLedger,
) -> BuilderRun {
    let (graph, phases) = drive(stream, strategy, ledger, usize::MAX);
    let outcome = strategy.finish(&graph);
    BuilderRun {
        graph,
        phases,
        outcome,
    }
}

/// Like [`run_builder`], but stops as soon as `strategy` enters phase
/// `stop_phase` (that round is drawn but not played) and never calls
/// `finish`; the returned outcome is empty. Lets single stages be studied
/// without simulating the rest of the plan.
pub fn run_builder_until(
    stream: &mut ProposalStream,
    strategy: &mut dyn Strategy,
    ledger: &mut BudgetLedger,
    stop_phase: usize,
) -> BuilderRun {
    let (graph, phases) = drive(stream, strategy, ledger, stop_phase);
    BuilderRun {
        graph,
        phases,
        outcome: StrategyOutcome::default(),
    }
}

fn drive(
    stream: &mut ProposalStream,
    strategy: &mut dyn Strategy,
    ledger: &mut BudgetLedger,
    stop_phase: usize,
) -> (AcceptedGraph, Vec<PhaseTally>) {
    let mut graph = AcceptedGraph::new(stream.n());
    let mut phases: Vec<PhaseTally> = strategy
        .phase_names()
        .into_iter()
        .map(|name| PhaseTally {
            name,
            rounds: 0,
            accepts: 0,
        })
        .collect();
    while ledger.rounds_used < ledger.t {
        let Ok(proposal) = stream.next_proposal() else {
            break;
        };
        ledger.rounds_used += 1;
        let round = ledger.rounds_used;
        strategy.begin_round(round, &graph);
        if strategy.current_phase() >= stop_phase {
            break;
        }
        let tally = &mut phases[strategy.current_phase()];
        tally.rounds += 1;
        let edge = proposal.edge;
        if graph.contains(edge) {
            continue;
        }
        let view = RoundView {
            round,
            graph: &graph,
            budget_left: ledger.edges_left(),
        };
        if strategy.decide(edge, &view) == Decision::Reject {
            continue;
        }
        if ledger.edges_accepted == ledger.b {
            ledger.overrides.push(round);
            continue;
        }
        graph.add_edge(edge).expect("edge was checked to be new");
        ledger.edges_accepted += 1;
        tally.accepts += 1;
        strategy.on_accepted(edge, &graph);
    }
    (graph, phases)
}

/// Accepts every proposal; an upper bound on what any strategy can build.
#[derive(Debug, Default, Clone)]
pub struct AcceptAll;

impl Strategy for AcceptAll {
    fn phase_names(&self) -> Vec<String> {
        vec!["all".into()]
    }
    fn begin_round(&mut self, _: u64, _: &AcceptedGraph) {}
    fn current_phase(&self) -> usize {
        0
    }
    fn decide(&mut self, _: Edge, _: &RoundView<'_>) -> Decision {
        Decision::Accept
    }
    fn on_accepted(&mut self, _: Edge, _: &AcceptedGraph) {}
    fn finish(&mut self, _: &AcceptedGraph) -> StrategyOutcome {
        StrategyOutcome::default()
    }
}

#[derive(Debug, Default, Clone)]
pub struct RejectAll;

impl Strategy for RejectAll {
    fn phase_names(&self) -> Vec<String> {
        vec!["all".into()]
    }
    fn begin_round(&mut self, _: u64, _: &AcceptedGraph) {}
    fn current_phase(&self) -> usize {
        0
    }
    fn decide(&mut self, _: Edge, _: &RoundView<'_>) -> Decision {
        Decision::Reject
    }
    fn on_accepted(&mut self, _: Edge, _: &AcceptedGraph) {}
    fn finish(&mut self, _: &AcceptedGraph) -> StrategyOutcome {
        StrategyOutcome::default()
    }
}

/// Phase bookkeeping shared by the stage machines: which phase is active and
/// the round at which it ends.
#[derive(Debug, Clone)]
pub(crate) struct PhaseClock {
    lengths: Vec<u64>,
    index: usize,
    end: u64,
}

impl PhaseClock {
    pub(crate) fn new(lengths: Vec<u64>) -> Self {
        let end = lengths[0];
        PhaseClock {
            lengths,
            index: 0,
            end,
        }
    }

    pub(crate) fn index(&self) -> usize {
        self.index
    }

    pub(crate) fn is_last(&self) -> bool {
        self.index + 1 == self.lengths.len()
    }

    /// Whether `round` lies past the end of the current (non-final) phase.
    pub(crate) fn expired(&self, round: u64) -> bool {
        !self.is_last() && round > self.end
    }

    /// Moves to the next phase, which starts at round `start`. The final
    /// phase never ends.
    pub(crate) fn advance(&mut self, start: u64) {
        self.index += 1;
        self.end = if self.is_last() {
            u64::MAX
        } else {
            start - 1 + self.lengths[self.index]
        };
    }
}
