use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use udn_backhaul::config::parse_config;
use udn_backhaul::experiment::{simulate_trial, ExperimentConfig};
use udn_backhaul::figures::{figure_rows, FigureId};
use udn_backhaul::output::{self, Format};
use udn_backhaul::run_sweep;
use udn_backhaul::validate::{run_validation, ValidationOptions};

#[derive(Parser, Debug)]
#[command(
    name = "udn-backhaul",
    version,
    about = "Multi-hop backhaul capacity and energy-efficiency simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file, `-` for stdout
    #[arg(long, default_value = "-")]
    out: PathBuf,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Base seed for all trials
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per (r, n) grid point
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single trial and print its metrics
    Trial {
        #[command(flatten)]
        common: Common,
        /// Small-cell radius in meters (defaults to the first configured value)
        #[arg(long)]
        r: Option<f64>,
        /// Number of small-cell BSs (defaults to the first configured value)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        index: u64,
        /// Also write the slot-by-slot schedule as JSON lines to this file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the full (r, n) sweep
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Emit the dataset behind one figure
    Figure {
        /// fig3a | fig3b | fig4a | fig4b
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check routing and scheduling invariants against exhaustive oracles
    Validate {
        #[command(flatten)]
        common: Common,
        /// Number of random instances
        #[arg(long, default_value_t = 200)]
        instances: u64,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig, String> {
    let text = match &common.config {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => String::new(),
    };
    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(trials) = common.trials {
        overrides.push(format!("trials={trials}"));
    }
    parse_config(&text, &overrides).map_err(|e| e.to_string())
}

fn write(common: &Common, text: &str) -> Result<(), String> {
    output::write_output(text, &common.out).map_err(|e| format!("{}: {e}", common.out.display()))
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Trial {
            common,
            r,
            n,
            index,
            trace,
        } => {
            let cfg = load(&common)?;
            let r = r.unwrap_or(cfg.r_values[0]);
            let n = n.unwrap_or(cfg.n_values[0]);
            if n == 0 || !(r > 0.0) {
                return Err("--r must be > 0 and --n must be >= 1".into());
            }
            let run = simulate_trial(&cfg, r, n, index).map_err(|e| e.to_string())?;
            if let (Some(path), Some(t)) = (&trace, &run.trace) {
                let file =
                    std::fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
                t.write_jsonl(std::io::BufWriter::new(file))
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let text = match common.format {
                Format::Csv => output::trial_csv(r, index, &run.outcome),
                Format::Json => output::trial_json(r, index, run.seed, &run.outcome),
            };
            write(&common, &text)?;
            Ok(true)
        }
        Command::Sweep { common } => {
            let cfg = load(&common)?;
            let records = run_sweep(&cfg).map_err(|e| e.to_string())?;
            output::emit_results(&records, &cfg, common.format, &common.out)
                .map_err(|e| format!("{}: {e}", common.out.display()))?;
            Ok(true)
        }
        Command::Figure { id, common } => {
            let id: FigureId = id
                .parse()
                .map_err(|e: udn_backhaul::SimError| e.to_string())?;
            let cfg = load(&common)?;
            let records = run_sweep(&cfg).map_err(|e| e.to_string())?;
            let rows = figure_rows(id, &records);
            let text = match common.format {
                Format::Csv => output::figure_csv(&rows),
                Format::Json => output::figure_json(id, &rows, &cfg),
            };
            write(&common, &text)?;
            Ok(true)
        }
        Command::Validate { common, instances } => {
            let cfg = load(&common)?;
            let opts = ValidationOptions {
                seeds: instances,
                base_seed: cfg.base_seed,
                ..ValidationOptions::default()
            };
            let report = run_validation(&opts);
            let text = format!("{report}\n");
            write(&common, &text)?;
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
