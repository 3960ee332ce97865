//! Monte Carlo simulator for multi-hop millimeter-wave backhaul in
//! ultra-dense small-cell networks.
//!
//! A trial scatters `n` small-cell BSs over a hexagonal macrocell, routes
//! each BS's backhaul traffic hop by hop toward its nearest gateway,
//! schedules the resulting transmissions under a transmitter exclusion
//! distance, and reports backhaul capacity `Y·W/k` and energy efficiency.
//! Sweeps over `(r, n)` aggregate trials into mean and 95% confidence values.

pub mod config;
pub mod error;
pub mod experiment;
pub mod figures;
pub mod geometry;
pub mod metrics;
pub mod output;
pub mod routing;
pub mod scheduler;
pub mod validate;

pub use error::{Result, SimError};
pub use experiment::{
    run_sweep, run_trial, simulate_trial, ExperimentConfig, SweepRecord, TrialOutcome,
};
pub use figures::{reproduce_figure, FigureId, FigureRow};
pub use geometry::{MacrocellRegion, Point2D};
pub use metrics::{EnergyParams, TrialMetrics};
pub use routing::{build_routes, NetworkTopology, RouteTable};
pub use scheduler::{run_schedule, ScheduleTrace};
