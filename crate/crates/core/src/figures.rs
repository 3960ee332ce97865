//! Re-plots sweep records onto the axes of the capacity and efficiency figures.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::experiment::{run_sweep, ExperimentConfig, Stat, SweepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    /// capacity vs number of BSs
    Fig3a,
    /// capacity vs mean concurrent transmissions
    Fig3b,
    /// energy efficiency vs number of BSs
    Fig4a,
    /// energy efficiency vs mean per-BS throughput
    Fig4b,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4a,
        FigureId::Fig4b,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
        }
    }

    pub fn axis_labels(&self) -> (&'static str, &'static str) {
        match self {
            FigureId::Fig3a => ("n", "capacity_bps"),
            FigureId::Fig3b => ("y_mean", "capacity_bps"),
            FigureId::Fig4a => ("n", "ee_paper_units"),
            FigureId::Fig4b => ("th_avg_bps", "ee_paper_units"),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| SimError::UnknownFigure(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    /// Series label: small-cell radius in meters.
    pub series_r: f64,
    pub x: f64,
    pub y: f64,
    pub y_ci: f64,
}

/// Projects sweep records onto the figure's axes, sorted by `(series, x)`.
/// Grid points where every trial was degenerate have no defined mean and are skipped.
pub fn figure_rows(id: FigureId, records: &[SweepRecord]) -> Vec<FigureRow> {
    let mut rows: Vec<FigureRow> = records
        .iter()
        .filter_map(|rec| {
            let (x, y): (f64, Stat) = match id {
                FigureId::Fig3a => (rec.n as f64, rec.capacity?),
                FigureId::Fig3b => (rec.y_n?.mean, rec.capacity?),
                FigureId::Fig4a => (rec.n as f64, rec.energy_efficiency?),
                FigureId::Fig4b => (rec.th_avg?.mean, rec.energy_efficiency?),
            };
            Some(FigureRow {
                series_r: rec.r,
                x,
                y: y.mean,
                y_ci: y.ci,
            })
        })
        .collect();
    rows.sort_by(|a, b| a.series_r.total_cmp(&b.series_r).then(a.x.total_cmp(&b.x)));
    rows
}

pub fn reproduce_figure(id: FigureId, config: &ExperimentConfig) -> Result<Vec<FigureRow>> {
    Ok(figure_rows(id, &run_sweep(config)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_ids_only() {
        for id in FigureId::ALL {
            assert_eq!(id.as_str().parse::<FigureId>().unwrap(), id);
        }
        assert_eq!(
            "fig5".parse::<FigureId>(),
            Err(SimError::UnknownFigure("fig5".into()))
        );
    }

    #[test]
    fn fig3a_has_one_row_per_grid_point() {
        let cfg = ExperimentConfig {
            n_values: vec![60, 80, 100],
            trials_per_point: 20,
            ..ExperimentConfig::default()
        };
        let records = run_sweep(&cfg).unwrap();
        assert!(records.iter().all(|r| r.capacity.is_some()));
        let rows = figure_rows(FigureId::Fig3a, &records);
        assert_eq!(rows.len(), 9);
        for id in FigureId::ALL {
            let rows = figure_rows(id, &records);
            for w in rows.windows(2) {
                assert!((w[0].series_r, w[0].x) <= (w[1].series_r, w[1].x));
            }
        }
    }
}
