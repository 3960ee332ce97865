//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions are the
//! plain-Rust versions, so the demo logic can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use udn_backhaul::experiment::{simulate_trial, ExperimentConfig, TrialOutcome};
use udn_backhaul::figures::{figure_rows, FigureId, FigureRow};
use udn_backhaul::geometry::Point2D;
use udn_backhaul::metrics::TrialMetrics;
use udn_backhaul::routing::NextHop;
use udn_backhaul::run_sweep;
use udn_backhaul::scheduler::Receiver;
use udn_backhaul::validate::{run_validation, ValidationOptions};

/// Upper bound on BSs per trial, keeps the page responsive.
pub const MAX_DEMO_BS: usize = 2_000;
/// Upper bound on trials per grid point in the in-browser sweep.
pub const MAX_DEMO_TRIALS: usize = 50;

#[derive(Serialize)]
struct BsView {
    x: f64,
    y: f64,
    gateway: usize,
    /// Index of the relay, `-1` for a direct link to the gateway, `null` when disconnected.
    next: Option<i64>,
    hops: Option<u32>,
}

#[derive(Serialize)]
struct LinkView {
    from: Point2D,
    to: Point2D,
    owner: usize,
}

#[derive(Serialize)]
struct TrialView {
    seed: u64,
    hexagon: Vec<Point2D>,
    gateways: Vec<Point2D>,
    bs: Vec<BsView>,
    slots: Vec<Vec<LinkView>>,
    metrics: Option<TrialMetrics>,
}

#[derive(Serialize)]
struct FigureView {
    figure: &'static str,
    x_label: &'static str,
    y_label: &'static str,
    rows: Vec<FigureRow>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// One trial in the default 1 km macrocell: positions, routes and the slot-by-slot schedule.
pub fn trial_json(r: f64, n: usize, delta: f64, trial: u64) -> Result<String, String> {
    if n == 0 || n > MAX_DEMO_BS {
        return Err(format!("n must be between 1 and {MAX_DEMO_BS}"));
    }
    let config = ExperimentConfig {
        delta,
        ..ExperimentConfig::default()
    };
    config.validate().map_err(|e| e.to_string())?;
    let run = simulate_trial(&config, r, n, trial).map_err(|e| e.to_string())?;
    let topo = &run.topology;
    let bs = run
        .routes
        .entries
        .iter()
        .zip(&topo.bs_positions)
        .map(|(e, p)| BsView {
            x: p.x,
            y: p.y,
            gateway: e.gateway,
            next: match e.next_hop {
                NextHop::Bs(j) => Some(j as i64),
                NextHop::DirectToGateway => Some(-1),
                NextHop::Disconnected => None,
            },
            hops: e.hop_count,
        })
        .collect();
    let slots = run
        .trace
        .as_ref()
        .map(|t| {
            t.slots
                .iter()
                .map(|slot| {
                    slot.iter()
                        .map(|l| LinkView {
                            from: topo.bs_positions[l.tx],
                            to: match l.rx {
                                Receiver::Bs(j) => topo.bs_positions[j],
                                Receiver::Gateway(g) => topo.gateway_positions[g],
                            },
                            owner: l.owner_flow,
                        })
                        .collect()
                })
                .collect()
        })
        .unwrap_or_default();
    let metrics = match run.outcome {
        TrialOutcome::Completed(m) => Some(m),
        TrialOutcome::Degenerate { .. } => None,
    };
    to_json(&TrialView {
        seed: run.seed,
        hexagon: config.region.vertices().to_vec(),
        gateways: topo.gateway_positions.clone(),
        bs,
        slots,
        metrics,
    })
}

/// A reduced sweep over `n = step, 2·step, ..., n_max` for r = 100/150/200 m,
/// projected onto one figure's axes.
pub fn figure_json(
    figure: &str,
    n_max: usize,
    step: usize,
    trials: usize,
    seed: u64,
) -> Result<String, String> {
    let id: FigureId = figure
        .parse()
        .map_err(|e: udn_backhaul::SimError| e.to_string())?;
    if step == 0 || n_max < step || n_max > MAX_DEMO_BS {
        return Err(format!("need 1 <= step <= n_max <= {MAX_DEMO_BS}"));
    }
    if trials == 0 || trials > MAX_DEMO_TRIALS {
        return Err(format!("trials must be between 1 and {MAX_DEMO_TRIALS}"));
    }
    let config = ExperimentConfig {
        n_values: (step..=n_max).step_by(step).collect(),
        trials_per_point: trials,
        base_seed: seed,
        ..ExperimentConfig::default()
    };
    let records = run_sweep(&config).map_err(|e| e.to_string())?;
    let (x_label, y_label) = id.axis_labels();
    to_json(&FigureView {
        figure: id.as_str(),
        x_label,
        y_label,
        rows: figure_rows(id, &records),
    })
}

/// Routing and scheduling invariant checks on small random instances.
pub fn validate_json(instances: u64) -> Result<String, String> {
    if instances == 0 || instances > 1_000 {
        return Err("instances must be between 1 and 1000".into());
    }
    let report = run_validation(&ValidationOptions {
        seeds: instances,
        ..ValidationOptions::default()
    });
    #[derive(Serialize)]
    struct View {
        passed: bool,
        text: String,
    }
    to_json(&View {
        passed: report.passed(),
        text: report.to_string(),
    })
}

fn js(result: Result<String, String>) -> Result<String, JsError> {
    result.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn trial(r: f64, n: usize, delta: f64, trial: u32) -> Result<String, JsError> {
    js(trial_json(r, n, delta, u64::from(trial)))
}

#[wasm_bindgen]
pub fn figure(
    id: &str,
    n_max: usize,
    step: usize,
    trials: usize,
    seed: u32,
) -> Result<String, JsError> {
    js(figure_json(id, n_max, step, trials, u64::from(seed)))
}

#[wasm_bindgen]
pub fn validate(instances: u32) -> Result<String, JsError> {
    js(validate_json(u64::from(instances)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn trial_view_is_consistent() {
        let v: Value = serde_json::from_str(&trial_json(200.0, 600, 0.5, 0).unwrap()).unwrap();
        assert_eq!(v["hexagon"].as_array().unwrap().len(), 6);
        assert_eq!(v["gateways"].as_array().unwrap().len(), 3);
        let bs = v["bs"].as_array().unwrap();
        assert_eq!(bs.len(), 600);
        let total_hops: u64 = bs.iter().filter_map(|b| b["hops"].as_u64()).sum();
        let activations: usize = v["slots"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_array().unwrap().len())
            .sum();
        assert_eq!(total_hops as usize, activations);
        let slots = v["slots"].as_array().unwrap().len() as u64;
        assert_eq!(v["metrics"]["slots"].as_u64(), Some(slots));
    }

    #[test]
    fn isolated_trial_has_no_metrics() {
        let v: Value = serde_json::from_str(&trial_json(100.0, 1, 0.5, 0).unwrap()).unwrap();
        if v["bs"][0]["hops"].is_null() {
            assert!(v["metrics"].is_null());
            assert!(v["slots"].as_array().unwrap().is_empty());
        }
    }

    #[test]
    fn trial_rejects_bad_input() {
        assert!(trial_json(200.0, 0, 0.5, 0).is_err());
        assert!(trial_json(-1.0, 10, 0.5, 0).is_err());
        assert!(trial_json(200.0, 10, -0.5, 0).is_err());
    }

    #[test]
    fn figure_rows_come_back_sorted() {
        let v: Value =
            serde_json::from_str(&figure_json("fig3a", 200, 100, 3, 9).unwrap()).unwrap();
        assert_eq!(v["figure"], "fig3a");
        let rows = v["rows"].as_array().unwrap();
        assert!(!rows.is_empty());
        let keys: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r["series_r"].as_f64().unwrap(), r["x"].as_f64().unwrap()))
            .collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        assert!(figure_json("fig9", 200, 100, 3, 9).is_err());
        assert!(figure_json("fig3a", 200, 0, 3, 9).is_err());
    }

    #[test]
    fn validation_passes() {
        let v: Value = serde_json::from_str(&validate_json(30).unwrap()).unwrap();
        assert_eq!(v["passed"], true);
    }
}
