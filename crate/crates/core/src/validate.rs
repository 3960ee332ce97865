//! Invariant checks for routes and schedules, plus the small-instance
//! oracle comparison behind the `validate` subcommand.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::experiment::splitmix64;
use crate::geometry::{
    place_gateways, sample_bs_positions, GatewayConfig, MacrocellRegion, PlacementPolicy, Point2D,
};
use crate::metrics::backhaul_capacity;
use crate::routing::{build_routes, NetworkTopology, NextHop, RouteTable};
use crate::scheduler::oracle::optimal_slots_for_flows;
use crate::scheduler::{
    flows, links_conflict, run_schedule_with, schedule_flows, BackhaulLink, Flow, ScheduleTrace,
};

/// Slack for floating-point distance comparisons, meters.
const DIST_EPS: f64 = 1e-9;

/// Checks the routing invariants of every connected BS. Returns one message per violation.
pub fn check_routes(topology: &NetworkTopology, routes: &RouteTable) -> Vec<String> {
    let mut violations = Vec::new();
    let r = topology.small_cell_radius;
    let pos = &topology.bs_positions;
    let gw = |i: usize| &topology.gateway_positions[routes.entries[i].gateway];

    let connected = routes.entries.iter().filter(|e| e.is_connected()).count();
    if connected != routes.connected_count {
        violations.push(format!(
            "connected_count {} != {connected}",
            routes.connected_count
        ));
    }

    for (bs, entry) in routes.entries.iter().enumerate() {
        let Some(hops) = entry.hop_count else {
            if entry.next_hop == NextHop::DirectToGateway {
                violations.push(format!("bs {bs}: direct link but no hop count"));
            }
            continue;
        };
        let Some(path) = routes.path(bs) else {
            violations.push(format!("bs {bs}: connected but no path"));
            continue;
        };
        if path.len() != hops as usize {
            violations.push(format!(
                "bs {bs}: hop_count {hops} but path has {} hops",
                path.len()
            ));
        }
        let mut seen = path.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != path.len() {
            violations.push(format!("bs {bs}: route revisits a BS"));
        }
        for w in path.windows(2) {
            let (cur, next) = (w[0], w[1]);
            let len = pos[cur].distance(&pos[next]);
            if len > r + DIST_EPS {
                violations.push(format!("bs {bs}: hop {cur}->{next} has length {len} > r"));
            }
            let (before, after) = (pos[cur].distance(gw(cur)), pos[next].distance(gw(cur)));
            if !(after < before) {
                violations.push(format!(
                    "bs {bs}: hop {cur}->{next} does not approach the gateway"
                ));
            }
            if !(pos[next].distance(gw(next)) < before) {
                violations.push(format!(
                    "bs {bs}: relay {next} not closer to its own gateway"
                ));
            }
        }
        let last = *path.last().expect("non-empty");
        let final_len = pos[last].distance(gw(last));
        if final_len > r + DIST_EPS {
            violations.push(format!("bs {bs}: final hop length {final_len} > r"));
        }
        let lower = (pos[bs].distance(gw(bs)) / r - DIST_EPS).ceil().max(1.0);
        if f64::from(hops) < lower {
            violations.push(format!("bs {bs}: {hops} hops below distance bound {lower}"));
        }
    }
    violations
}

/// Checks slot feasibility, precedence, conservation and the capacity identity.
pub fn check_schedule(
    topology: &NetworkTopology,
    routes: &RouteTable,
    trace: &ScheduleTrace,
) -> Vec<String> {
    let mut violations = Vec::new();
    let flows = flows(routes);

    for (s, slot) in trace.slots.iter().enumerate() {
        for (i, a) in slot.iter().enumerate() {
            for b in &slot[i + 1..] {
                if links_conflict(a, b, topology) {
                    violations.push(format!(
                        "slot {s}: links {}->{:?} and {}->{:?} conflict",
                        a.tx, a.rx, b.tx, b.rx
                    ));
                }
            }
        }
    }

    // (owner, hop index) -> slot
    let mut when: HashMap<(usize, usize), usize> = HashMap::new();
    let expected: HashMap<usize, &Flow> = flows.iter().map(|f| (f.owner, f)).collect();
    let mut activations = 0u64;
    for (s, slot) in trace.slots.iter().enumerate() {
        for link in slot {
            activations += 1;
            let Some(flow) = expected.get(&link.owner_flow) else {
                violations.push(format!(
                    "slot {s}: link for unknown flow {}",
                    link.owner_flow
                ));
                continue;
            };
            let h = flow.links.len();
            let idx = h.checked_sub(link.remaining_hops_of_flow as usize);
            match idx.filter(|&i| i < h) {
                Some(i) if flow.links[i] == *link => {
                    if when.insert((link.owner_flow, i), s).is_some() {
                        violations
                            .push(format!("flow {} hop {i} scheduled twice", link.owner_flow));
                    }
                }
                _ => violations.push(format!(
                    "slot {s}: link {link:?} is not on its flow's route"
                )),
            }
        }
    }
    for flow in &flows {
        let mut prev: Option<usize> = None;
        for i in 0..flow.links.len() {
            match when.get(&(flow.owner, i)) {
                None => violations.push(format!("flow {} hop {i} never scheduled", flow.owner)),
                Some(&s) => {
                    if prev.is_some_and(|p| s <= p) {
                        violations.push(format!(
                            "flow {} hop {i} in slot {s} not after previous hop",
                            flow.owner
                        ));
                    }
                    prev = Some(s);
                }
            }
        }
    }

    let total_hops = routes.total_hops();
    if trace.total_activations != total_hops || activations != total_hops {
        violations.push(format!(
            "activations {} (counted {activations}) != total hops {total_hops}",
            trace.total_activations
        ));
    }
    if trace.slot_count() > 0 {
        let y = trace.mean_concurrency();
        if !(y >= 1.0 && y <= routes.connected_count as f64) {
            violations.push(format!("Y = {y} outside [1, {}]", routes.connected_count));
        }
        let w = topology.link_rate;
        if let Ok(cap) = backhaul_capacity(y, w, routes.mean_hops) {
            let direct = routes.connected_count as f64 * w / trace.slot_count() as f64;
            if (cap - direct).abs() > 1e-9 * direct {
                violations.push(format!("capacity {cap} != connected·W/slots {direct}"));
            }
        }
    }
    violations
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationOptions {
    pub seeds: u64,
    pub max_bs: usize,
    /// Instances with at most this many activations go to the exhaustive oracle.
    pub oracle_limit: usize,
    pub radii: Vec<u64>,
    pub base_seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            seeds: 200,
            max_bs: 10,
            oracle_limit: 12,
            radii: vec![100, 150, 200],
            base_seed: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub instances: u64,
    pub oracle_instances: u64,
    pub chains_checked: u64,
    /// Informational: greedy used more slots than the optimum.
    pub greedy_above_optimal: u64,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances checked:          {}", self.instances)?;
        writeln!(f, "oracle comparisons:         {}", self.oracle_instances)?;
        writeln!(f, "single-flow chains checked: {}", self.chains_checked)?;
        writeln!(
            f,
            "greedy slots > optimal:     {}",
            self.greedy_above_optimal
        )?;
        if self.passed() {
            write!(f, "all checks passed")
        } else {
            writeln!(f, "{} violation(s):", self.violations.len())?;
            for v in self.violations.iter().take(20) {
                writeln!(f, "  {v}")?;
            }
            write!(f, "FAILED")
        }
    }
}

/// A random small instance: up to `max_bs` BSs in a hexagon of radius 4r
/// with gateways at the top vertices, dense enough that most BSs connect.
pub fn small_instance(seed: u64, r: f64, max_bs: usize) -> NetworkTopology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = MacrocellRegion::new(4.0 * r, Point2D::ORIGIN).expect("positive radius");
    let n = rng.gen_range(1..=max_bs);
    let bs = sample_bs_positions(n, &region, &PlacementPolicy::uniform(), &mut rng)
        .expect("uniform never fails");
    let gws = place_gateways(&GatewayConfig::TopVertices, &region).expect("top vertices");
    NetworkTopology::new(bs, gws, r, 0.5, 1e9).expect("valid topology")
}

pub fn run_validation(opts: &ValidationOptions) -> ValidationReport {
    run_validation_with(opts, links_conflict)
}

/// Same as [`run_validation`], but schedules with `conflict` while still
/// checking against the true conflict relation. Used to confirm that a broken
/// conflict check is caught.
pub fn run_validation_with<F>(opts: &ValidationOptions, conflict: F) -> ValidationReport
where
    F: Fn(&BackhaulLink, &BackhaulLink, &NetworkTopology) -> bool,
{
    let mut report = ValidationReport::default();
    for i in 0..opts.seeds {
        let r = opts.radii[(i as usize) % opts.radii.len()] as f64;
        let seed = splitmix64(opts.base_seed ^ splitmix64(i));
        let topo = small_instance(seed, r, opts.max_bs);
        let routes = build_routes(&topo);
        report.instances += 1;
        let tag = |v: String| format!("seed {i}: {v}");
        report
            .violations
            .extend(check_routes(&topo, &routes).into_iter().map(tag));
        if routes.connected_count == 0 {
            continue;
        }
        let scheduled = |a: &BackhaulLink, b: &BackhaulLink| conflict(a, b, &topo);
        let trace = run_schedule_with(&routes, &topo, scheduled).expect("connected instance");
        report
            .violations
            .extend(check_schedule(&topo, &routes, &trace).into_iter().map(tag));

        let fl = flows(&routes);
        let truth = |a: &BackhaulLink, b: &BackhaulLink| links_conflict(a, b, &topo);
        if routes.total_hops() as usize <= opts.oracle_limit {
            let optimal = optimal_slots_for_flows(&fl, truth).expect("within oracle limit");
            report.oracle_instances += 1;
            if trace.slot_count() < optimal {
                report.violations.push(tag(format!(
                    "greedy used {} slots, below the optimum {optimal}",
                    trace.slot_count()
                )));
            } else if trace.slot_count() > optimal {
                report.greedy_above_optimal += 1;
            }
        }
        for flow in &fl {
            let single = std::slice::from_ref(flow);
            let greedy = schedule_flows(single, scheduled).slot_count();
            let optimal = optimal_slots_for_flows(single, truth).expect("single route is short");
            report.chains_checked += 1;
            if greedy != optimal || optimal != flow.links.len() {
                report.violations.push(tag(format!(
                    "chain from {}: greedy {greedy}, optimal {optimal}, hops {}",
                    flow.owner,
                    flow.links.len()
                )));
            }
        }
    }
    report
}
