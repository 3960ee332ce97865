//! Monte Carlo trials and (r, n) parameter sweeps.
//!
//! # Seed derivation
//!
//! Each trial owns a ChaCha8 stream seeded with
//!
//! ```text
//! s = splitmix64(splitmix64(splitmix64(splitmix64(base_seed) ^ r.to_bits()) ^ n) ^ trial_index)
//! ```
//!
//! where `splitmix64` is the standard SplitMix64 finalizer (see [`splitmix64`])
//! and `r.to_bits()` is the IEEE-754 bit pattern of the small-cell radius in
//! meters. A trial is therefore reproducible on its own, independent of the
//! sweep grid and of the order in which trials run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::{
    place_gateways, sample_bs_positions, GatewayConfig, MacrocellRegion, PlacementMode,
    PlacementPolicy, Point2D,
};
use crate::metrics::{EnergyParams, TrialMetrics};
use crate::routing::{build_routes, NetworkTopology, RouteTable};
use crate::scheduler::{run_schedule, ScheduleTrace};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(base_seed: u64, r: f64, n: usize, trial_index: u64) -> u64 {
    let s = splitmix64(base_seed);
    let s = splitmix64(s ^ r.to_bits());
    let s = splitmix64(s ^ n as u64);
    splitmix64(s ^ trial_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementKind {
    Uniform,
    Hardcore,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementConfig {
    pub kind: PlacementKind,
    /// Hardcore separation in meters; `None` means `2r`.
    pub min_separation: Option<f64>,
    pub max_rejections: usize,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self {
            kind: PlacementKind::Uniform,
            min_separation: None,
            max_rejections: PlacementPolicy::DEFAULT_MAX_REJECTIONS,
        }
    }
}

impl PlacementConfig {
    pub fn policy_for(&self, r: f64) -> PlacementPolicy {
        let mode = match self.kind {
            PlacementKind::Uniform => PlacementMode::Uniform,
            PlacementKind::Hardcore => PlacementMode::Hardcore {
                min_separation: self.min_separation.unwrap_or(2.0 * r),
            },
        };
        PlacementPolicy {
            mode,
            max_rejections: self.max_rejections,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub region: MacrocellRegion,
    pub gateways: GatewayConfig,
    pub placement: PlacementConfig,
    pub r_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub delta: f64,
    pub link_rate: f64,
    pub energy: EnergyParams,
    pub trials_per_point: usize,
    pub base_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            region: MacrocellRegion {
                circumradius: 1000.0,
                center: Point2D::ORIGIN,
            },
            gateways: GatewayConfig::TopVertices,
            placement: PlacementConfig::default(),
            r_values: vec![100.0, 150.0, 200.0],
            n_values: (1..=20).map(|i| 5 * i).collect(),
            delta: 0.5,
            link_rate: 1e9,
            energy: EnergyParams::default(),
            trials_per_point: 200,
            base_seed: 0x005E_ED0F_BAC4_4A01,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        MacrocellRegion::new(self.region.circumradius, self.region.center)?;
        place_gateways(&self.gateways, &self.region)?;
        if self.r_values.is_empty() {
            return Err(SimError::invalid("r_values", "must not be empty"));
        }
        if self.r_values.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(SimError::invalid(
                "r_values",
                "every radius must be positive",
            ));
        }
        if self.n_values.is_empty() {
            return Err(SimError::invalid("n_values", "must not be empty"));
        }
        if self.n_values.contains(&0) {
            return Err(SimError::invalid("n_values", "every count must be >= 1"));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(SimError::invalid("delta", "must be >= 0"));
        }
        if !(self.link_rate > 0.0 && self.link_rate.is_finite()) {
            return Err(SimError::invalid("link_rate", "must be > 0"));
        }
        if self.trials_per_point == 0 {
            return Err(SimError::invalid("trials", "must be >= 1"));
        }
        if let Some(d) = self.placement.min_separation {
            if !(d >= 0.0) {
                return Err(SimError::invalid("d_min", "must be >= 0"));
            }
        }
        self.energy.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrialOutcome {
    Completed(TrialMetrics),
    /// No BS could reach a gateway; excluded from means.
    Degenerate {
        n: usize,
    },
}

impl TrialOutcome {
    pub fn metrics(&self) -> Option<&TrialMetrics> {
        match self {
            TrialOutcome::Completed(m) => Some(m),
            TrialOutcome::Degenerate { .. } => None,
        }
    }
}

/// Everything one trial produced, for inspection and cross-checks.
#[derive(Debug, Clone)]
pub struct TrialRun {
    pub seed: u64,
    pub topology: NetworkTopology,
    pub routes: RouteTable,
    pub trace: Option<ScheduleTrace>,
    pub outcome: TrialOutcome,
}

/// Sample, route, schedule and evaluate one trial, keeping the intermediates.
pub fn simulate_trial(
    config: &ExperimentConfig,
    r: f64,
    n: usize,
    trial_index: u64,
) -> Result<TrialRun> {
    let seed = trial_seed(config.base_seed, r, n, trial_index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bs = sample_bs_positions(n, &config.region, &config.placement.policy_for(r), &mut rng)?;
    let gateways = place_gateways(&config.gateways, &config.region)?;
    let topology = NetworkTopology::new(bs, gateways, r, config.delta, config.link_rate)?;
    let routes = build_routes(&topology);
    let (trace, outcome) = match run_schedule(&routes, &topology) {
        Ok(trace) => {
            let metrics = TrialMetrics::compute(
                n,
                routes.connected_count,
                trace.slot_count(),
                trace.mean_concurrency(),
                routes.mean_hops,
                config.link_rate,
                &config.energy,
            )?;
            (Some(trace), TrialOutcome::Completed(metrics))
        }
        Err(SimError::NoConnectedBs) => (None, TrialOutcome::Degenerate { n }),
        Err(e) => return Err(e),
    };
    Ok(TrialRun {
        seed,
        topology,
        routes,
        trace,
        outcome,
    })
}

pub fn run_trial(
    config: &ExperimentConfig,
    r: f64,
    n: usize,
    trial_index: u64,
) -> Result<TrialOutcome> {
    simulate_trial(config, r, n, trial_index).map(|run| run.outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Normal-approximation 95% half-width; 0 with fewer than two samples.
    pub ci: f64,
}

impl Stat {
    /// `None` for an empty sample. Sums run in slice order.
    pub fn from_samples(xs: &[f64]) -> Option<Stat> {
        if xs.is_empty() {
            return None;
        }
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let ci = if xs.len() < 2 {
            0.0
        } else {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
            Z_95 * (var / m).sqrt()
        };
        Some(Stat { mean, ci })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub r: f64,
    pub n: usize,
    pub trials: usize,
    pub degenerate: usize,
    pub y_n: Option<Stat>,
    pub k_n: Option<Stat>,
    /// Over all trials; degenerate trials count as zero.
    pub connected_fraction: Stat,
    pub capacity: Option<Stat>,
    pub th_avg: Option<Stat>,
    pub energy_efficiency: Option<Stat>,
    pub ee_bits_per_joule: Option<Stat>,
}

impl SweepRecord {
    pub fn included(&self) -> usize {
        self.trials - self.degenerate
    }
}

/// Aggregates `(trial_index, outcome)` pairs. Inputs are sorted by trial index
/// first, so the result does not depend on the order trials finished in.
pub fn aggregate(r: f64, n: usize, outcomes: &[(u64, TrialOutcome)]) -> SweepRecord {
    let mut sorted: Vec<&(u64, TrialOutcome)> = outcomes.iter().collect();
    sorted.sort_by_key(|(i, _)| *i);
    let completed: Vec<&TrialMetrics> = sorted.iter().filter_map(|(_, o)| o.metrics()).collect();
    let pick = |f: fn(&TrialMetrics) -> f64| {
        let xs: Vec<f64> = completed.iter().map(|m| f(m)).collect();
        Stat::from_samples(&xs)
    };
    let fractions: Vec<f64> = sorted
        .iter()
        .map(|(_, o)| {
            o.metrics()
                .map_or(0.0, |m| m.connected_count as f64 / n as f64)
        })
        .collect();
    SweepRecord {
        r,
        n,
        trials: outcomes.len(),
        degenerate: outcomes.len() - completed.len(),
        y_n: pick(|m| m.y_n),
        k_n: pick(|m| m.k_n),
        connected_fraction: Stat::from_samples(&fractions).unwrap_or(Stat { mean: 0.0, ci: 0.0 }),
        capacity: pick(|m| m.capacity),
        th_avg: pick(|m| m.th_avg),
        energy_efficiency: pick(|m| m.energy_efficiency),
        ee_bits_per_joule: pick(|m| m.ee_bits_per_joule),
    }
}

/// Runs `trials_per_point` trials at every `(r, n)` and aggregates them.
/// Records come back ordered by `r` then `n`, as listed in the config.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let t = config.trials_per_point as u64;
    let jobs: Vec<(f64, usize, u64)> = config
        .r_values
        .iter()
        .flat_map(|&r| {
            config
                .n_values
                .iter()
                .flat_map(move |&n| (0..t).map(move |i| (r, n, i)))
        })
        .collect();

    let run = |&(r, n, i): &(f64, usize, u64)| run_trial(config, r, n, i).map(|o| (i, o));
    #[cfg(feature = "parallel")]
    let outcomes: Vec<(u64, TrialOutcome)> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<(u64, TrialOutcome)> = jobs.iter().map(run).collect::<Result<_>>()?;

    Ok(jobs
        .chunks(config.trials_per_point)
        .zip(outcomes.chunks(config.trials_per_point))
        .map(|(job, out)| aggregate(job[0].0, job[0].1, out))
        .collect())
}
