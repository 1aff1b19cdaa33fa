//! Round and edge budgets and the phase schedule of each strategy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Round ceiling `⌈(1+ε) n ln n / 2⌉`.
pub fn round_budget(n: u32, eps: f64) -> u64 {
    ceil_tolerant((1.0 + eps) * n_ln_n(n) / 2.0)
}

/// Acceptance ceiling `⌈(1+ε) d n / 2⌉`.
pub fn edge_budget(n: u32, d: u32, eps: f64) -> u64 {
    ceil_tolerant((1.0 + eps) * d as f64 * n as f64 / 2.0)
}

/// `n ln n` with the natural logarithm.
pub fn n_ln_n(n: u32) -> f64 {
    n as f64 * (n as f64).ln()
}

/// Ceiling that ignores floating-point noise just above an integer, so that
/// e.g. `1.3 * 2000 = 2600.0000000000005` rounds to 2600.
pub(crate) fn ceil_tolerant(x: f64) -> u64 {
    let snapped = x - x.abs() * 1e-12;
    snapped.ceil().max(0.0) as u64
}

/// How phase lengths are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// The asymptotic lengths (`⌈n ln n/ω⌉` matching phases, `t_1 = ⌈ω⁵n⌉`,
    /// `t_2 − t_1 = ⌈ω³n⌉`). Rejected when they do not fit into `t`.
    Literal,
    /// Lengths capped so that every phase fits into `t` while the final phase
    /// keeps at least `⌈n ln n/2⌉` rounds; path geometry rescaled to match.
    #[default]
    DeskScale,
}

impl Schedule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Schedule::Literal => "literal",
            Schedule::DeskScale => "desk-scale",
        }
    }
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Schedule::Literal),
            "desk-scale" | "desk" => Ok(Schedule::DeskScale),
            other => Err(Error::InvalidConfig(format!("unknown schedule `{other}`"))),
        }
    }
}

/// Everything a plan is derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanParams {
    pub n: u32,
    pub d: u32,
    pub omega: f64,
    pub eps: f64,
    /// Stage-1 cap factor `c₁`: the path phase never exceeds `⌈c₁ n ln n⌉` rounds.
    pub stage1_cap: f64,
    pub schedule: Schedule,
}

impl PlanParams {
    pub fn new(n: u32, d: u32, omega: f64, eps: f64) -> Self {
        PlanParams {
            n,
            d,
            omega,
            eps,
            stage1_cap: DEFAULT_STAGE1_CAP,
            schedule: Schedule::DeskScale,
        }
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_stage1_cap(mut self, c1: f64) -> Self {
        self.stage1_cap = c1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::TooFewVertices(self.n as u64));
        }
        if self.d < 2 {
            return Err(Error::InvalidConfig(format!(
                "d must be at least 2, got {}",
                self.d
            )));
        }
        if !(self.omega > 1.0 && self.omega.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "omega must exceed 1, got {}",
                self.omega
            )));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eps must lie in (0, 1], got {}",
                self.eps
            )));
        }
        if !(self.stage1_cap > 0.0 && self.stage1_cap.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "stage-1 cap must be positive, got {}",
                self.stage1_cap
            )));
        }
        Ok(())
    }
}

pub const DEFAULT_STAGE1_CAP: f64 = 1.0;

/// Path-growth geometry for `d ∈ {2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathGeometry {
    /// Number of paths, started from vertices `0..num_paths`.
    pub num_paths: u32,
    /// Inclusive vertex-count window of typical paths.
    pub typical_min: u32,
    pub typical_max: u32,
    /// Size of the head and tail windows `S'_i`, `S''_i`.
    pub window: u32,
    /// The path phase stops early once this many vertices are covered.
    pub coverage_target: u32,
    /// The `ω` the geometry corresponds to (equal to `ω` for the literal schedule).
    pub omega_eff: f64,
}

impl PathGeometry {
    fn from_omega(n: u32, num_paths: u32, omega: f64, coverage_target: u32) -> Self {
        let cube = omega.powi(3);
        PathGeometry {
            num_paths,
            typical_min: ceil_tolerant(cube).max(2) as u32,
            typical_max: ((3.0 * cube + 1e-9).floor() as u32).max(2),
            window: ((omega * omega + 1e-9).floor() as u32).max(1),
            coverage_target: coverage_target.min(n),
            omega_eff: omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub name: String,
    /// Nominal length in rounds; the final phase takes whatever remains of `t`.
    pub length: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePlan {
    pub params: PlanParams,
    pub t: u64,
    pub b: u64,
    pub phases: Vec<Phase>,
    /// Length of each greedy-matching phase (`d ≥ 4`: the `d` matchings;
    /// `d = 3`: the three tri-matchings).
    pub matching_length: u64,
    pub geometry: Option<PathGeometry>,
}

impl PhasePlan {
    /// `(phase name, end round)` pairs; strictly increasing, the last equals `t`.
    pub fn boundaries(&self) -> Vec<(String, u64)> {
        let mut end = 0;
        self.phases
            .iter()
            .map(|p| {
                end += p.length;
                (p.name.clone(), end)
            })
            .collect()
    }

    pub fn phase_names(&self) -> Vec<String> {
        self.phases.iter().map(|p| p.name.clone()).collect()
    }

    /// Length of the auxiliary stream phases for this plan.
    pub fn auxiliary_phase_length(&self) -> u64 {
        let n = self.params.n;
        let l = if self.params.d >= 4 {
            self.matching_length
        } else {
            ceil_tolerant(n_ln_n(n) / self.params.omega)
        };
        l.clamp(1, crate::stream::pair_count(n))
    }
}

/// The plan under the budgets `t`, `b`.
pub fn make_phase_plan(params: PlanParams) -> Result<PhasePlan> {
    params.validate()?;
    let t = round_budget(params.n, params.eps);
    let b = edge_budget(params.n, params.d, params.eps);
    make_phase_plan_with_budgets(params, t, b)
}

/// The plan for explicit ceilings; lets single stages run at their literal
/// lengths on instances where the overall budget could not hold them.
pub fn make_phase_plan_with_budgets(params: PlanParams, t: u64, b: u64) -> Result<PhasePlan> {
    params.validate()?;
    let PlanParams { n, d, omega, .. } = params;
    let nln = n_ln_n(n);
    let matching_full = ceil_tolerant(nln / omega).max(1);
    let path_full = ceil_tolerant(omega.powi(5) * n as f64);
    let merge_full = ceil_tolerant(omega.powi(3) * n as f64);
    let coverage_target = if d == 2 {
        ceil_tolerant((1.0 - 1.0 / omega) * n as f64) as u32
    } else {
        ceil_tolerant(0.75 * n as f64 - 1.0) as u32
    };
    let literal_paths = ceil_tolerant(n as f64 / (2.0 * omega.powi(3))).clamp(1, n as u64) as u32;

    let mut phases = Vec::new();
    let mut push = |name: String, length: u64| phases.push(Phase { name, length });
    let (matching_length, geometry) = match params.schedule {
        Schedule::Literal => {
            if d >= 4 {
                for i in 1..=d {
                    push(format!("matching{i}"), matching_full);
                }
                (matching_full, None)
            } else {
                push("path".into(), path_full);
                push("merge".into(), merge_full);
                if d == 3 {
                    for i in 1..=3 {
                        push(format!("tri{i}"), matching_full);
                    }
                }
                let geo = PathGeometry::from_omega(n, literal_paths, omega, coverage_target);
                (matching_full, Some(geo))
            }
        }
        Schedule::DeskScale => {
            let reserve = ceil_tolerant(nln / 2.0);
            let slack = t.saturating_sub(reserve);
            if d >= 4 {
                let l = matching_full.min(slack / d as u64);
                for i in 1..=d {
                    push(format!("matching{i}"), l);
                }
                (l, None)
            } else {
                let cap = ceil_tolerant(params.stage1_cap * nln);
                let share = if d == 2 { slack / 2 } else { slack / 3 };
                let path = path_full.min(cap).min(share);
                let rest = slack - path;
                let merge = if d == 2 {
                    merge_full.min(rest)
                } else {
                    merge_full.min(rest / 2)
                };
                push("path".into(), path);
                push("merge".into(), merge);
                let mut tri = 0;
                if d == 3 {
                    tri = matching_full.min((rest - merge) / 3);
                    for i in 1..=3 {
                        push(format!("tri{i}"), tri);
                    }
                }
                let geo = desk_geometry(n, omega, path, coverage_target);
                (if d == 3 { tri } else { matching_full }, Some(geo))
            }
        }
    };
    let used: u64 = phases.iter().map(|p| p.length).sum();
    if let Some(p) = phases.iter().find(|p| p.length == 0) {
        return Err(Error::InvalidPlan(format!(
            "phase {} gets no rounds within t = {t} (n = {n}, omega = {omega})",
            p.name
        )));
    }
    if used >= t {
        return Err(Error::InvalidPlan(format!(
            "phases before the final one need {used} rounds but t = {t}; omega = {omega} is too large for n = {n}"
        )));
    }
    let final_name = match d {
        2 => "attach",
        3 => "completion",
        _ => "boost",
    };
    phases.push(Phase {
        name: final_name.into(),
        length: t - used,
    });
    Ok(PhasePlan {
        params,
        t,
        b,
        phases,
        matching_length,
        geometry,
    })
}

/// Path geometry when the path phase has only `cap` rounds: enough paths
/// that the coverage target is reachable in expectation, and typical lengths
/// and windows rescaled through the implied `ω_eff = (n / 2N)^{1/3}`.
fn desk_geometry(n: u32, omega: f64, cap: u64, coverage_target: u32) -> PathGeometry {
    let nf = n as f64;
    let fraction = (coverage_target as f64 / nf).min(1.0 - 1.0 / nf);
    // covered(s) ≈ n (1 − exp(−2Ns/n²)) for N paths after s rounds
    let wanted = (nf * nf * (1.0 / (1.0 - fraction)).ln() / (2.0 * cap.max(1) as f64)).ceil();
    let floor = (nf / (2.0 * omega.powi(3))).ceil();
    let ceiling = (nf / 4.0).floor().max(1.0);
    let num_paths = wanted.max(floor).min(ceiling).max(1.0) as u32;
    let omega_eff = (nf / (2.0 * num_paths as f64)).cbrt().max(1.0);
    PathGeometry::from_omega(n, num_paths, omega_eff, coverage_target)
}
