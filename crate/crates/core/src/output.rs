//! CSV and JSON writers for sweep, figure and trial results.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! a file back yields the exact values that were computed. Undefined means
//! (every trial at that grid point degenerate) are empty CSV fields and
//! `null` in JSON.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::experiment::{ExperimentConfig, Stat, SweepRecord, TrialOutcome};
use crate::figures::{FigureId, FigureRow};

pub const SWEEP_CSV_HEADER: &str = "r_m,n,trials,y_mean,y_ci,k_mean,k_ci,connected_frac,capacity_bps,capacity_ci,th_avg_bps,ee_paper_units,ee_bits_per_joule";
pub const FIGURE_CSV_HEADER: &str = "series_r_m,x,y,y_ci";
pub const TRIAL_CSV_HEADER: &str = "r_m,n,trial,status,connected,slots,k_n,y_n,capacity_bps,th_avg_bps,p_tx_w,p_op_w,e_bs_j,ee_paper_units,ee_bits_per_joule";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// One sweep record in output form; field names match the CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r_m: f64,
    pub n: usize,
    pub trials: usize,
    pub y_mean: Option<f64>,
    pub y_ci: Option<f64>,
    pub k_mean: Option<f64>,
    pub k_ci: Option<f64>,
    pub connected_frac: f64,
    pub capacity_bps: Option<f64>,
    pub capacity_ci: Option<f64>,
    pub th_avg_bps: Option<f64>,
    pub ee_paper_units: Option<f64>,
    pub ee_bits_per_joule: Option<f64>,
}

impl From<&SweepRecord> for SweepRow {
    fn from(rec: &SweepRecord) -> Self {
        let mean = |s: Option<Stat>| s.map(|s| s.mean);
        let ci = |s: Option<Stat>| s.map(|s| s.ci);
        SweepRow {
            r_m: rec.r,
            n: rec.n,
            trials: rec.trials,
            y_mean: mean(rec.y_n),
            y_ci: ci(rec.y_n),
            k_mean: mean(rec.k_n),
            k_ci: ci(rec.k_n),
            connected_frac: rec.connected_fraction.mean,
            capacity_bps: mean(rec.capacity),
            capacity_ci: ci(rec.capacity),
            th_avg_bps: mean(rec.th_avg),
            ee_paper_units: mean(rec.energy_efficiency),
            ee_bits_per_joule: mean(rec.ee_bits_per_joule),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub seed: u64,
    pub config: ExperimentConfig,
    pub records: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureDocument {
    pub figure: FigureId,
    pub x_label: String,
    pub y_label: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub rows: Vec<FigureRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in records.iter().map(SweepRow::from) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.r_m,
            row.n,
            row.trials,
            opt(row.y_mean),
            opt(row.y_ci),
            opt(row.k_mean),
            opt(row.k_ci),
            row.connected_frac,
            opt(row.capacity_bps),
            opt(row.capacity_ci),
            opt(row.th_avg_bps),
            opt(row.ee_paper_units),
            opt(row.ee_bits_per_joule),
        );
    }
    out
}

pub fn sweep_json(records: &[SweepRecord], config: &ExperimentConfig) -> String {
    let doc = SweepDocument {
        seed: config.base_seed,
        config: config.clone(),
        records: records.iter().map(SweepRow::from).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("sweep document serializes");
    s.push('\n');
    s
}

pub fn figure_csv(rows: &[FigureRow]) -> String {
    let mut out = String::from(FIGURE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.series_r, r.x, r.y, r.y_ci);
    }
    out
}

pub fn figure_json(id: FigureId, rows: &[FigureRow], config: &ExperimentConfig) -> String {
    let (x, y) = id.axis_labels();
    let doc = FigureDocument {
        figure: id,
        x_label: x.to_string(),
        y_label: y.to_string(),
        seed: config.base_seed,
        config: config.clone(),
        rows: rows.to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("figure document serializes");
    s.push('\n');
    s
}

pub fn trial_csv(r: f64, trial: u64, outcome: &TrialOutcome) -> String {
    let mut out = String::from(TRIAL_CSV_HEADER);
    out.push('\n');
    let _ = match outcome {
        TrialOutcome::Completed(m) => writeln!(
            out,
            "{r},{},{trial},completed,{},{},{},{},{},{},{},{},{},{},{}",
            m.n,
            m.connected_count,
            m.slots,
            m.k_n,
            m.y_n,
            m.capacity,
            m.th_avg,
            m.p_tx,
            m.p_op,
            m.e_bs,
            m.energy_efficiency,
            m.ee_bits_per_joule
        ),
        TrialOutcome::Degenerate { n } => writeln!(out, "{r},{n},{trial},degenerate,0,0,,,,,,,,,"),
    };
    out
}

pub fn trial_json(r: f64, trial: u64, seed: u64, outcome: &TrialOutcome) -> String {
    let value = serde_json::json!({
        "r_m": r,
        "trial": trial,
        "seed": seed,
        "outcome": outcome,
    });
    let mut s = serde_json::to_string_pretty(&value).expect("trial serializes");
    s.push('\n');
    s
}

/// Writes `contents` to `path`, or to stdout when `path` is `-`.
pub fn write_output(contents: &str, path: &Path) -> io::Result<()> {
    if path.as_os_str() == "-" {
        use io::Write;
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        lock.write_all(contents.as_bytes())?;
        lock.flush()
    } else {
        fs::write(path, contents)
    }
}

/// Serializes sweep records in `format` and writes them to `path`.
pub fn emit_results(
    records: &[SweepRecord],
    config: &ExperimentConfig,
    format: Format,
    path: &Path,
) -> io::Result<()> {
    if records.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "no records to emit",
        ));
    }
    let text = match format {
        Format::Csv => sweep_csv(records),
        Format::Json => sweep_json(records, config),
    };
    write_output(&text, path)
}
