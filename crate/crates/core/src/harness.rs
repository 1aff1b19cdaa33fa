//! Experiment sweeps: configuration, parallel execution in seed order,
//! CSV / JSON Lines output, per-cell summaries, and row replay.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::plan::{n_ln_n, Schedule, DEFAULT_STAGE1_CAP};
use crate::strategy::FailedStage;
use crate::trial::{
    run_trial, ConnMode, RunMode, TrialConfig, TrialReport, TrialRow, CSV_HEADER, DEFAULT_EPS,
    DEFAULT_EXACT_THRESHOLD, DEFAULT_OMEGA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: Vec<u32>,
    pub d: Vec<u32>,
    pub trials: u32,
    pub seed: u64,
    pub omega: f64,
    pub eps: f64,
    pub mode: RunMode,
    pub stage1_cap: f64,
    pub schedule: Schedule,
    pub conn: ConnMode,
    pub exact_threshold: u32,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub workers: usize,
    pub wallclock: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: vec![1000],
            d: vec![2],
            trials: 50,
            seed: 0,
            omega: DEFAULT_OMEGA,
            eps: DEFAULT_EPS,
            mode: RunMode::Real,
            stage1_cap: DEFAULT_STAGE1_CAP,
            schedule: Schedule::DeskScale,
            conn: ConnMode::Auto,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
            out: None,
            format: OutputFormat::Csv,
            workers: 1,
            wallclock: true,
        }
    }
}

impl ExperimentConfig {
    /// Trial configuration of cell `(n, d)`.
    pub fn cell(&self, n: u32, d: u32) -> TrialConfig {
        TrialConfig {
            n,
            d,
            omega: self.omega,
            eps: self.eps,
            mode: self.mode,
            stage1_cap: self.stage1_cap,
            schedule: self.schedule,
            conn: self.conn,
            exact_threshold: self.exact_threshold,
            wallclock: self.wallclock,
        }
    }

    /// Cells in output order: `n` outer, `d` inner.
    pub fn cells(&self) -> Vec<(u32, u32)> {
        self.n
            .iter()
            .flat_map(|&n| self.d.iter().map(move |&d| (n, d)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.d.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one n and one d are required".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        for (n, d) in self.cells() {
            self.cell(n, d).plan()?;
        }
        Ok(())
    }

    /// Applies one `key = value` setting. List keys (`n`, `d`) accept
    /// comma-separated values and accumulate.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidConfig(format!("invalid {key} `{value}`: {what}"));
        fn num<T: FromStr>(value: &str) -> std::result::Result<T, ()> {
            value.trim().parse().map_err(|_| ())
        }
        match key {
            "n" | "d" => {
                let list: Vec<u32> = value
                    .split(',')
                    .map(|v| num(v).map_err(|_| bad("expected integers")))
                    .collect::<Result<_>>()?;
                let target = if key == "n" { &mut self.n } else { &mut self.d };
                target.extend(list);
            }
            "trials" => self.trials = num(value).map_err(|_| bad("expected an integer"))?,
            "seed" => self.seed = num(value).map_err(|_| bad("expected an integer"))?,
            "omega" => self.omega = num(value).map_err(|_| bad("expected a number"))?,
            "eps" => self.eps = num(value).map_err(|_| bad("expected a number"))?,
            "mode" => self.mode = value.parse()?,
            "stage1-cap" => self.stage1_cap = num(value).map_err(|_| bad("expected a number"))?,
            "schedule" => self.schedule = value.parse()?,
            "conn" => self.conn = value.parse()?,
            "exact-threshold" => {
                self.exact_threshold = num(value).map_err(|_| bad("expected an integer"))?
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "workers" => self.workers = num(value).map_err(|_| bad("expected an integer"))?,
            "no-wallclock" => {
                let flag: bool = num(value).map_err(|_| bad("expected true or false"))?;
                self.wallclock = !flag;
            }
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses a flat `key = value` file; `#` starts a comment, and repeated
    /// `n` / `d` keys build lists.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig {
            n: Vec::new(),
            d: Vec::new(),
            ..Default::default()
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        let defaults = ExperimentConfig::default();
        if cfg.n.is_empty() {
            cfg.n = defaults.n;
        }
        if cfg.d.is_empty() {
            cfg.d = defaults.d;
        }
        Ok(cfg)
    }

    pub fn from_config_file(path: &Path) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }
}

/// Aggregates of one `(n, d)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: u32,
    pub d: u32,
    pub trials: u32,
    pub successes: u32,
    pub success_rate: f64,
    pub mean_rounds: f64,
    pub max_rounds: u64,
    pub mean_edges: f64,
    pub max_edges: u64,
    /// Mean accepted edges over `dn/2`.
    pub edge_ratio: f64,
    /// Mean rounds over `n ln n / 2`.
    pub round_ratio: f64,
    pub budget_overrides: u64,
    pub failures: BTreeMap<String, u32>,
}

impl SummaryStats {
    pub fn from_reports(n: u32, d: u32, reports: &[TrialReport]) -> Self {
        let trials = reports.len() as u32;
        let successes = reports.iter().filter(|r| r.connected).count() as u32;
        let mean = |f: &dyn Fn(&TrialReport) -> u64| {
            if reports.is_empty() {
                0.0
            } else {
                reports.iter().map(f).sum::<u64>() as f64 / reports.len() as f64
            }
        };
        let mean_rounds = mean(&|r| r.rounds_used);
        let mean_edges = mean(&|r| r.edges_accepted);
        let mut failures: BTreeMap<String, u32> = FailedStage::ALL
            .iter()
            .map(|s| (s.as_str().to_string(), 0))
            .collect();
        for r in reports {
            if let Some(s) = r.failed_stage {
                *failures.entry(s.as_str().to_string()).or_default() += 1;
            }
        }
        SummaryStats {
            n,
            d,
            trials,
            successes,
            success_rate: if trials == 0 {
                0.0
            } else {
                successes as f64 / trials as f64
            },
            mean_rounds,
            max_rounds: reports.iter().map(|r| r.rounds_used).max().unwrap_or(0),
            mean_edges,
            max_edges: reports.iter().map(|r| r.edges_accepted).max().unwrap_or(0),
            edge_ratio: mean_edges / (d as f64 * n as f64 / 2.0),
            round_ratio: mean_rounds / (n_ln_n(n) / 2.0),
            budget_overrides: reports.iter().map(|r| r.budget_overrides).sum(),
            failures,
        }
    }
}

impl std::fmt::Display for SummaryStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let failures: Vec<String> = self
            .failures
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(s, c)| format!("{s}:{c}"))
            .collect();
        write!(
            f,
            "n={} d={} trials={} success={:.3} rounds mean={:.1} max={} ({:.3} of n ln n/2) \
             edges mean={:.1} max={} ({:.3} of dn/2) overrides={} failures=[{}]",
            self.n,
            self.d,
            self.trials,
            self.success_rate,
            self.mean_rounds,
            self.max_rounds,
            self.round_ratio,
            self.mean_edges,
            self.max_edges,
            self.edge_ratio,
            self.budget_overrides,
            failures.join(" ")
        )
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub reports: Vec<TrialReport>,
    pub summaries: Vec<SummaryStats>,
}

/// Runs every cell; trial `i` of a cell uses seed `seed + i`. Reports come
/// back in (cell, trial) order whatever the worker count.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let mut reports = Vec::new();
    let mut summaries = Vec::new();
    for (n, d) in cfg.cells() {
        let tc = cfg.cell(n, d);
        let cell: Vec<TrialReport> = pool.install(|| {
            (0..cfg.trials as u64)
                .into_par_iter()
                .map(|i| run_trial(&tc, cfg.seed.wrapping_add(i)))
                .collect::<Result<_>>()
        })?;
        summaries.push(SummaryStats::from_reports(n, d, &cell));
        reports.extend(cell);
    }
    Ok(ExperimentResult { reports, summaries })
}

/// [`run_sweep`] plus writing the rows to `cfg.out` (or stdout).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    // open the output first so an unwritable path fails before any work
    let sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let result = run_sweep(cfg)?;
    write_reports(sink, &result.reports, cfg.format)?;
    Ok(result)
}

/// Writes a header plus one row per report (CSV), or one JSON object per line.
pub fn write_reports<W: Write>(
    mut out: W,
    reports: &[TrialReport],
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut out);
            w.write_record(CSV_HEADER.split(','))?;
            for r in reports {
                w.serialize(r.to_row())?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            for r in reports {
                serde_json::to_writer(&mut out, &r.to_row())?;
                out.write_all(b"\n")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Parses one CSV data row (with or without the header line).
pub fn parse_row(text: &str) -> Result<TrialRow> {
    let body = text.trim();
    let body = body
        .strip_prefix(CSV_HEADER)
        .map(str::trim_start)
        .unwrap_or(body);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(body.as_bytes());
    let mut records = reader.records();
    let record = records
        .next()
        .ok_or_else(|| Error::Schema("empty row".into()))?
        .map_err(|e| Error::Schema(e.to_string()))?;
    let columns = CSV_HEADER.split(',').count();
    if record.len() != columns {
        return Err(Error::Schema(format!(
            "expected {columns} columns, found {}",
            record.len()
        )));
    }
    if records.next().is_some() {
        return Err(Error::Schema("expected exactly one row".into()));
    }
    let header = csv::StringRecord::from(CSV_HEADER.split(',').collect::<Vec<_>>());
    record
        .deserialize(Some(&header))
        .map_err(|e| Error::Schema(e.to_string()))
}

/// Re-runs the trial a row describes. Parameters that are not columns
/// (`stage1_cap`, `schedule`, `exact_threshold`, wallclock recording) come
/// from `base`.
pub fn replay_trial(row: &TrialRow, base: &ExperimentConfig) -> Result<TrialReport> {
    let mut tc = base.cell(row.n, row.d);
    tc.omega = row.omega;
    tc.eps = row.eps;
    tc.mode = row
        .mode
        .parse()
        .map_err(|_| Error::Schema(format!("unknown mode `{}`", row.mode)))?;
    tc.conn = match row.check_mode.as_str() {
        "exact" => ConnMode::Exact,
        "sampled" => ConnMode::Sampled,
        other => return Err(Error::Schema(format!("unknown check_mode `{other}`"))),
    };
    let plan = tc.plan()?;
    if plan.t != row.t_budget || plan.b != row.b_budget {
        return Err(Error::Schema(format!(
            "budgets (t, b) = ({}, {}) in the row, but the configuration gives ({}, {})",
            row.t_budget, row.b_budget, plan.t, plan.b
        )));
    }
    run_trial(&tc, row.seed)
}

/// Whether two rows agree on every column except `wallclock_ms`.
pub fn rows_match(a: &TrialRow, b: &TrialRow) -> bool {
    let strip = |r: &TrialRow| TrialRow {
        wallclock_ms: 0,
        ..r.clone()
    };
    strip(a) == strip(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n: vec![200],
            d: vec![2, 4],
            trials: 3,
            seed: 42,
            wallclock: false,
            ..Default::default()
        }
    }

    #[test]
    fn zero_trials_give_empty_cells() {
        let cfg = ExperimentConfig {
            trials: 0,
            ..small()
        };
        let r = run_sweep(&cfg).unwrap();
        assert!(r.reports.is_empty());
        assert!(r.summaries.iter().all(|s| s.trials == 0));
        let mut buf = Vec::new();
        write_reports(&mut buf, &r.reports, OutputFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), CSV_HEADER);
    }

    #[test]
    fn seeds_follow_trial_index() {
        let r = run_sweep(&small()).unwrap();
        let seeds: Vec<u64> = r.reports.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, [42, 43, 44, 42, 43, 44]);
        assert_eq!(r.reports[3].d, 4);
    }

    #[test]
    fn rows_replay_identically() {
        let cfg = small();
        let r = run_sweep(&cfg).unwrap();
        let mut buf = Vec::new();
        write_reports(&mut buf, &r.reports, OutputFormat::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines().skip(1) {
            let row = parse_row(line).unwrap();
            let again = replay_trial(&row, &cfg).unwrap();
            assert!(rows_match(&row, &again.to_row()));
        }
    }

    #[test]
    fn altered_omega_is_a_config_error() {
        let cfg = small();
        let r = run_sweep(&cfg).unwrap();
        let mut row = r.reports[0].to_row();
        row.omega = 0.5;
        assert!(matches!(
            replay_trial(&row, &cfg),
            Err(Error::InvalidConfig(_))
        ));
        let mut row = r.reports[0].to_row();
        row.eps = 0.9;
        assert!(matches!(replay_trial(&row, &cfg), Err(Error::Schema(_))));
    }

    #[test]
    fn malformed_rows_are_schema_errors() {
        assert!(matches!(parse_row("1,2,3"), Err(Error::Schema(_))));
        assert!(matches!(parse_row(""), Err(Error::Schema(_))));
    }

    #[test]
    fn config_file_lists_and_comments() {
        let cfg = ExperimentConfig::from_config_str(
            "# sweep\nn = 200\nn = 500, 1000\nd = 3\ntrials = 7 # per cell\nmode = aux\nno-wallclock = true\n",
        )
        .unwrap();
        assert_eq!(cfg.n, [200, 500, 1000]);
        assert_eq!(cfg.d, [3]);
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.mode, RunMode::Aux);
        assert!(!cfg.wallclock);
        assert!(ExperimentConfig::from_config_str("bogus = 1").is_err());
        assert!(ExperimentConfig::from_config_str("n 5").is_err());
    }

    #[test]
    fn json_lines_mirror_csv_fields() {
        let r = run_sweep(&ExperimentConfig {
            trials: 1,
            ..small()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_reports(&mut buf, &r.reports, OutputFormat::Json).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        let keys: Vec<&str> = first
            .as_object()
            .unwrap()
            .keys()
            .map(|k| k.as_str())
            .collect();
        let mut want: Vec<&str> = CSV_HEADER.split(',').collect();
        want.sort_unstable();
        let mut got = keys.clone();
        got.sort_unstable();
        assert_eq!(got, want);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = ExperimentConfig {
            d: vec![1],
            ..small()
        };
        assert!(run_sweep(&cfg).is_err());
        let cfg = ExperimentConfig {
            workers: 0,
            ..small()
        };
        assert!(run_sweep(&cfg).is_err());
    }
}
