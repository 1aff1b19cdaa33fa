//! Simulation engine for Builder strategies in the semi-random graph process.
//!
//! The edges of `K_n` arrive one at a time in uniform random order and an
//! online strategy accepts or rejects each one, subject to a ceiling `t` on
//! rounds and `b` on accepted edges. The strategies here aim for a spanning
//! `d`-connected graph; the harness runs seeded sweeps and checks the result.

pub mod connectivity;
pub mod error;
pub mod graph;
pub mod harness;
pub mod high_d;
pub mod low_d;
pub mod needs;
pub mod plan;
pub mod strategy;
pub mod stream;
pub mod trial;

pub use connectivity::{
    brute_force_connectivity, is_cutset, is_d_connected, sampled_connectivity_check, CheckMode,
    ConnectivityVerdict, Witness,
};
pub use error::{Error, Result};
pub use graph::{AcceptedGraph, VertexSet};
pub use harness::{run_experiment, run_sweep, ExperimentConfig, OutputFormat, SummaryStats};
pub use plan::{
    edge_budget, make_phase_plan, make_phase_plan_with_budgets, round_budget, PhasePlan,
    PlanParams, Schedule,
};
pub use strategy::{
    run_builder, run_builder_until, AcceptAll, BudgetLedger, Decision, FailedStage, PhaseTally,
    RejectAll, Strategy,
};
pub use stream::{
    pair_count, repeated_edge_count, Edge, Proposal, ProposalStream, StreamMode, VertexId,
};
pub use trial::{
    run_trial, run_trial_full, run_trial_with_plan, ConnMode, RunMode, TrialConfig, TrialReport,
};
