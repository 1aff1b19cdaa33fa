//! One seeded trial: plan, stream, strategy, budgets, connectivity verdict.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::connectivity::{is_d_connected, sampled_connectivity_check, CheckMode, Witness};
use crate::error::{Error, Result};
use crate::graph::AcceptedGraph;
use crate::high_d::HighDStrategy;
use crate::low_d::LowDStrategy;
use crate::plan::{make_phase_plan, PhasePlan, PlanParams, Schedule, DEFAULT_STAGE1_CAP};
use crate::strategy::{run_builder, BudgetLedger, FailedStage, PhaseTally, Strategy};
use crate::stream::{ProposalStream, StreamMode};

/// Which proposal stream a trial consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    #[default]
    Real,
    Aux,
}

impl RunMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunMode::Real => "real",
            RunMode::Aux => "aux",
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(RunMode::Real),
            "aux" => Ok(RunMode::Aux),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

/// Connectivity check selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ConnMode {
    Exact,
    Sampled,
    /// Exact below the vertex threshold, sampled from it on.
    #[default]
    Auto,
}

impl FromStr for ConnMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ConnMode::Exact),
            "sampled" => Ok(ConnMode::Sampled),
            "auto" => Ok(ConnMode::Auto),
            other => Err(Error::InvalidConfig(format!(
                "unknown connectivity mode `{other}`"
            ))),
        }
    }
}

pub const DEFAULT_EXACT_THRESHOLD: u32 = 20_000;
pub const DEFAULT_OMEGA: f64 = 4.0;
pub const DEFAULT_EPS: f64 = 0.3;

/// Everything that determines a trial apart from its seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: u32,
    pub d: u32,
    pub omega: f64,
    pub eps: f64,
    pub mode: RunMode,
    pub stage1_cap: f64,
    pub schedule: Schedule,
    pub conn: ConnMode,
    pub exact_threshold: u32,
    /// When false, `wallclock_ms` is reported as 0 so rows are byte-reproducible.
    pub wallclock: bool,
}

impl TrialConfig {
    pub fn new(n: u32, d: u32) -> Self {
        TrialConfig {
            n,
            d,
            omega: DEFAULT_OMEGA,
            eps: DEFAULT_EPS,
            mode: RunMode::Real,
            stage1_cap: DEFAULT_STAGE1_CAP,
            schedule: Schedule::DeskScale,
            conn: ConnMode::Auto,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            wallclock: true,
        }
    }

    pub fn plan_params(&self) -> PlanParams {
        PlanParams::new(self.n, self.d, self.omega, self.eps)
            .with_schedule(self.schedule)
            .with_stage1_cap(self.stage1_cap)
    }

    pub fn plan(&self) -> Result<PhasePlan> {
        make_phase_plan(self.plan_params())
    }

    pub fn check_mode(&self) -> CheckMode {
        match self.conn {
            ConnMode::Exact => CheckMode::Exact,
            ConnMode::Sampled => CheckMode::Sampled,
            ConnMode::Auto if self.n < self.exact_threshold => CheckMode::Exact,
            ConnMode::Auto => CheckMode::Sampled,
        }
    }
}

/// Per-trial record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub seed: u64,
    pub n: u32,
    pub d: u32,
    pub mode: RunMode,
    pub omega: f64,
    pub eps: f64,
    pub t_budget: u64,
    pub b_budget: u64,
    pub rounds_used: u64,
    pub edges_accepted: u64,
    pub stages: Vec<PhaseTally>,
    pub failed_stage: Option<FailedStage>,
    pub k_tested: u32,
    pub connected: bool,
    pub check_mode: CheckMode,
    pub witness: Option<Witness>,
    pub wallclock_ms: u64,
    /// Accepts turned into rejections because the edge budget was spent.
    pub budget_overrides: u64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl TrialReport {
    pub fn witness_size(&self) -> usize {
        self.witness.as_ref().map_or(0, |w| w.size())
    }

    /// `name=rounds:accepts` entries joined by `;`.
    pub fn stage_column(&self) -> String {
        self.stages
            .iter()
            .map(|p| format!("{}={}:{}", p.name, p.rounds, p.accepts))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn to_row(&self) -> TrialRow {
        TrialRow {
            seed: self.seed,
            n: self.n,
            d: self.d,
            mode: self.mode.as_str().into(),
            omega: self.omega,
            eps: self.eps,
            t_budget: self.t_budget,
            b_budget: self.b_budget,
            rounds_used: self.rounds_used,
            edges_accepted: self.edges_accepted,
            stage: self.stage_column(),
            failed_stage: self
                .failed_stage
                .map_or(String::new(), |s| s.as_str().into()),
            k_tested: self.k_tested,
            connected: self.connected,
            check_mode: self.check_mode.as_str().into(),
            witness_size: self.witness_size() as u64,
            wallclock_ms: self.wallclock_ms,
        }
    }
}

/// The persisted columns, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub seed: u64,
    pub n: u32,
    pub d: u32,
    pub mode: String,
    pub omega: f64,
    pub eps: f64,
    pub t_budget: u64,
    pub b_budget: u64,
    pub rounds_used: u64,
    pub edges_accepted: u64,
    pub stage: String,
    pub failed_stage: String,
    pub k_tested: u32,
    pub connected: bool,
    pub check_mode: String,
    pub witness_size: u64,
    pub wallclock_ms: u64,
}

pub const CSV_HEADER: &str = "seed,n,d,mode,omega,eps,t_budget,b_budget,rounds_used,edges_accepted,stage,failed_stage,k_tested,connected,check_mode,witness_size,wallclock_ms";

/// The strategy instance after a run, for inspecting intermediate structures.
#[derive(Debug, Clone)]
pub enum StrategyState {
    High(Box<HighDStrategy>),
    Low(Box<LowDStrategy>),
}

#[derive(Debug, Clone)]
pub struct TrialRun {
    pub report: TrialReport,
    pub graph: AcceptedGraph,
    pub strategy: StrategyState,
    pub plan: PhasePlan,
}

/// Stream mode for a plan: the real stream, or auxiliary phases of the
/// plan's matching length covering all `t` rounds.
pub fn stream_mode(plan: &PhasePlan, mode: RunMode) -> StreamMode {
    match mode {
        RunMode::Real => StreamMode::Real,
        RunMode::Aux => {
            let phase_length = plan.auxiliary_phase_length();
            StreamMode::Auxiliary {
                num_phases: plan.t.div_ceil(phase_length) as u32,
                phase_length,
            }
        }
    }
}

pub fn run_trial(cfg: &TrialConfig, seed: u64) -> Result<TrialReport> {
    run_trial_full(cfg, seed).map(|r| r.report)
}

/// Runs one trial and keeps the final graph and strategy state.
pub fn run_trial_full(cfg: &TrialConfig, seed: u64) -> Result<TrialRun> {
    run_trial_with_plan(cfg, cfg.plan()?, seed)
}

/// Runs one trial under an explicit plan (e.g. one built with
/// [`make_phase_plan_with_budgets`](crate::plan::make_phase_plan_with_budgets)).
/// `n` and `d` come from the plan.
pub fn run_trial_with_plan(cfg: &TrialConfig, plan: PhasePlan, seed: u64) -> Result<TrialRun> {
    let started = Instant::now();
    let cfg = &TrialConfig {
        n: plan.params.n,
        d: plan.params.d,
        omega: plan.params.omega,
        eps: plan.params.eps,
        ..*cfg
    };
    let mut stream = ProposalStream::new(cfg.n, seed, stream_mode(&plan, cfg.mode))?;
    let mut ledger = BudgetLedger::new(plan.t, plan.b);
    let (run, strategy) = if cfg.d >= 4 {
        let mut s = HighDStrategy::new(&plan);
        let run = run_builder(&mut stream, &mut s, &mut ledger);
        (run, StrategyState::High(Box::new(s)))
    } else {
        let mut s = LowDStrategy::new(&plan);
        let run = run_builder(&mut stream, &mut s, &mut ledger);
        (run, StrategyState::Low(Box::new(s)))
    };
    let check_mode = cfg.check_mode();
    let verdict = match check_mode {
        CheckMode::Exact => is_d_connected(&run.graph, cfg.d),
        CheckMode::Sampled => sampled_connectivity_check(&run.graph, cfg.d, 10 * cfg.d, seed),
    };
    let failed_stage = run
        .outcome
        .failed_stage
        .or((!verdict.holds).then_some(FailedStage::Connectivity));
    let report = TrialReport {
        seed,
        n: cfg.n,
        d: cfg.d,
        mode: cfg.mode,
        omega: cfg.omega,
        eps: cfg.eps,
        t_budget: plan.t,
        b_budget: plan.b,
        rounds_used: ledger.rounds_used,
        edges_accepted: ledger.edges_accepted,
        stages: run.phases,
        failed_stage,
        k_tested: cfg.d,
        connected: verdict.holds,
        check_mode,
        witness: verdict.witness,
        wallclock_ms: if cfg.wallclock {
            started.elapsed().as_millis() as u64
        } else {
            0
        },
        budget_overrides: ledger.overrides.len() as u64,
        diagnostics: run.outcome.diagnostics,
    };
    Ok(TrialRun {
        report,
        graph: run.graph,
        strategy,
        plan,
    })
}

/// Runs `strategy` on a fresh stream without any connectivity check; used for
/// strategies outside the standard plans (e.g. accept-everything baselines).
pub fn run_with_strategy(
    n: u32,
    seed: u64,
    mode: StreamMode,
    t: u64,
    b: u64,
    strategy: &mut dyn Strategy,
) -> Result<(AcceptedGraph, BudgetLedger)> {
    let mut stream = ProposalStream::new(n, seed, mode)?;
    let mut ledger = BudgetLedger::new(t, b);
    let run = run_builder(&mut stream, strategy, &mut ledger);
    Ok((run.graph, ledger))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_respect_budgets_for_every_degree() {
        for d in 2..=5 {
            let mut cfg = TrialConfig::new(200, d);
            cfg.wallclock = false;
            let r = run_trial(&cfg, 3).unwrap();
            assert!(r.rounds_used <= r.t_budget);
            assert!(r.edges_accepted <= r.b_budget);
            assert_eq!(r.budget_overrides, 0);
            let rounds: u64 = r.stages.iter().map(|p| p.rounds).sum();
            let accepts: u64 = r.stages.iter().map(|p| p.accepts).sum();
            assert_eq!(rounds, r.rounds_used);
            assert_eq!(accepts, r.edges_accepted);
            if !r.connected {
                assert!(r.failed_stage.is_some());
            }
        }
    }

    #[test]
    fn trials_are_deterministic() {
        let mut cfg = TrialConfig::new(300, 3);
        cfg.wallclock = false;
        assert_eq!(run_trial(&cfg, 11).unwrap(), run_trial(&cfg, 11).unwrap());
    }

    #[test]
    fn auxiliary_mode_runs() {
        let mut cfg = TrialConfig::new(200, 4);
        cfg.mode = RunMode::Aux;
        let r = run_trial(&cfg, 5).unwrap();
        assert_eq!(r.rounds_used, r.t_budget);
        assert!(r.edges_accepted <= r.b_budget);
    }

    #[test]
    fn stage_column_format() {
        let mut cfg = TrialConfig::new(200, 2);
        cfg.wallclock = false;
        let r = run_trial(&cfg, 1).unwrap();
        let col = r.stage_column();
        let names: Vec<&str> = col
            .split(';')
            .map(|s| s.split('=').next().unwrap())
            .collect();
        assert_eq!(names, ["path", "merge", "attach"]);
    }

    #[test]
    fn auto_check_mode_threshold() {
        let mut cfg = TrialConfig::new(100, 2);
        assert_eq!(cfg.check_mode(), CheckMode::Exact);
        cfg.exact_threshold = 100;
        assert_eq!(cfg.check_mode(), CheckMode::Sampled);
    }
}
