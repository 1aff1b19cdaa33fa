use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semirandom::harness::{parse_row, replay_trial, rows_match};
use semirandom::{run_experiment, ExperimentConfig, Result, TrialConfig};

/// Seeded experiments with Builder strategies in the semi-random graph process.
#[derive(Parser, Debug)]
#[command(name = "semirandom", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Re-run the trial described by one CSV row and compare.
    Replay {
        /// The data row (optionally preceded by the header line).
        #[arg(long)]
        row: String,
    },
    /// Print the phase plan of each (n, d) cell.
    Plan,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Flat `key = value` file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Vertex count(s); repeat or comma-separate for a list.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Vec<u32>,
    /// Target connectivity; repeat or comma-separate for a list.
    #[arg(long, global = true, value_delimiter = ',')]
    d: Vec<u32>,
    #[arg(long, global = true)]
    trials: Option<u32>,
    /// Base seed; trial i of each cell uses seed + i.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    omega: Option<f64>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Proposal stream: real | aux.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Path-phase cap factor c1 (at most c1 * n ln n rounds).
    #[arg(long = "stage1-cap", global = true)]
    stage1_cap: Option<f64>,
    /// Phase schedule: desk-scale | literal.
    #[arg(long, global = true)]
    schedule: Option<String>,
    /// Connectivity check: exact | sampled | auto.
    #[arg(long, global = true)]
    conn: Option<String>,
    /// Vertex count from which `auto` switches to sampled checks.
    #[arg(long = "exact-threshold", global = true)]
    exact_threshold: Option<u32>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Report wallclock_ms as 0 so output is byte-reproducible.
    #[arg(long = "no-wallclock", global = true)]
    no_wallclock: bool,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_config_file(path)?,
            None => ExperimentConfig::default(),
        };
        if !self.n.is_empty() {
            cfg.n = self.n.clone();
        }
        if !self.d.is_empty() {
            cfg.d = self.d.clone();
        }
        let mut set = |key: &str, value: Option<String>| match value {
            Some(v) => cfg.set(key, &v),
            None => Ok(()),
        };
        set("trials", self.trials.map(|v| v.to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("omega", self.omega.map(|v| v.to_string()))?;
        set("eps", self.eps.map(|v| v.to_string()))?;
        set("mode", self.mode.clone())?;
        set("stage1-cap", self.stage1_cap.map(|v| v.to_string()))?;
        set("schedule", self.schedule.clone())?;
        set("conn", self.conn.clone())?;
        set(
            "exact-threshold",
            self.exact_threshold.map(|v| v.to_string()),
        )?;
        set("out", self.out.as_ref().map(|p| p.display().to_string()))?;
        set("format", self.format.clone())?;
        set("workers", self.workers.map(|v| v.to_string()))?;
        if self.no_wallclock {
            cfg.wallclock = false;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = cli.run.config()?;
    match cli.command {
        None => {
            let result = run_experiment(&cfg)?;
            for s in &result.summaries {
                eprintln!("{s}");
            }
            Ok(true)
        }
        Some(Command::Replay { row }) => {
            let original = parse_row(&row)?;
            let report = replay_trial(&original, &cfg)?;
            let again = report.to_row();
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(std::io::stdout());
            w.serialize(&again)?;
            w.flush()?;
            let same = rows_match(&original, &again);
            eprintln!(
                "{}",
                if same {
                    "replay matches"
                } else {
                    "replay differs"
                }
            );
            Ok(same)
        }
        Some(Command::Plan) => {
            for (n, d) in cfg.cells() {
                let tc: TrialConfig = cfg.cell(n, d);
                let plan = tc.plan()?;
                let phases: Vec<String> = plan
                    .boundaries()
                    .into_iter()
                    .map(|(name, end)| format!("{name}<={end}"))
                    .collect();
                println!("n={n} d={d} t={} b={} {}", plan.t, plan.b, phases.join(" "));
                if let Some(g) = plan.geometry {
                    println!(
                        "  paths={} typical=[{}, {}] window={} coverage_target={}",
                        g.num_paths, g.typical_min, g.typical_max, g.window, g.coverage_target
                    );
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
