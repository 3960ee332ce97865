//! Exhaustive minimum-slot search used to validate the greedy scheduler.

use std::collections::HashSet;

use super::{flows, links_conflict, BackhaulLink, Flow};
use crate::error::{Result, SimError};
use crate::routing::{NetworkTopology, RouteTable};

pub const MAX_ORACLE_ACTIVATIONS: usize = 20;

/// Minimum number of slots over all precedence-respecting, conflict-free schedules.
///
/// Breadth-first search over per-flow progress vectors. From each state only
/// maximal conflict-free sets of head links are expanded: a state with more
/// progress dominates one with less, since any schedule of the lagging state
/// restricted to the links still pending remains feasible.
pub fn optimal_schedule_oracle(routes: &RouteTable, topology: &NetworkTopology) -> Result<usize> {
    optimal_schedule_oracle_with(routes, |a, b| links_conflict(a, b, topology))
}

pub fn optimal_schedule_oracle_with<F>(routes: &RouteTable, conflict: F) -> Result<usize>
where
    F: Fn(&BackhaulLink, &BackhaulLink) -> bool,
{
    if routes.connected_count == 0 {
        return Err(SimError::NoConnectedBs);
    }
    optimal_slots_for_flows(&flows(routes), conflict)
}

/// Exhaustive minimum slot count for an explicit set of packets.
pub fn optimal_slots_for_flows<F>(flows: &[Flow], conflict: F) -> Result<usize>
where
    F: Fn(&BackhaulLink, &BackhaulLink) -> bool,
{
    let activations: usize = flows.iter().map(|f| f.links.len()).sum();
    if activations > MAX_ORACLE_ACTIVATIONS {
        return Err(SimError::InstanceTooLarge {
            activations,
            limit: MAX_ORACLE_ACTIVATIONS,
        });
    }
    if activations == 0 {
        return Ok(0);
    }

    let done: Vec<u8> = flows.iter().map(|f| f.links.len() as u8).collect();
    let mut frontier = vec![vec![0u8; flows.len()]];
    let mut seen: HashSet<Vec<u8>> = frontier.iter().cloned().collect();
    let mut depth = 0;
    loop {
        let mut next = Vec::new();
        for state in &frontier {
            for step in maximal_steps(flows, state, &conflict) {
                let mut succ = state.clone();
                for f in step {
                    succ[f] += 1;
                }
                if succ == done {
                    return Ok(depth + 1);
                }
                if seen.insert(succ.clone()) {
                    next.push(succ);
                }
            }
        }
        debug_assert!(!next.is_empty());
        frontier = next;
        depth += 1;
    }
}

/// All maximal conflict-free subsets of the head links in `state`, as flow indices.
fn maximal_steps<F>(flows: &[Flow], state: &[u8], conflict: &F) -> Vec<Vec<usize>>
where
    F: Fn(&BackhaulLink, &BackhaulLink) -> bool,
{
    let heads: Vec<(usize, BackhaulLink)> = flows
        .iter()
        .enumerate()
        .filter(|(i, f)| (state[*i] as usize) < f.links.len())
        .map(|(i, f)| (i, f.links[state[i] as usize]))
        .collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    extend(&heads, 0, &mut chosen, conflict, &mut out);
    out
}

fn extend<F>(
    heads: &[(usize, BackhaulLink)],
    at: usize,
    chosen: &mut Vec<usize>,
    conflict: &F,
    out: &mut Vec<Vec<usize>>,
) where
    F: Fn(&BackhaulLink, &BackhaulLink) -> bool,
{
    let compatible =
        |k: usize, chosen: &[usize]| chosen.iter().all(|&c| !conflict(&heads[k].1, &heads[c].1));
    if at == heads.len() {
        let maximal = (0..heads.len()).all(|k| chosen.contains(&k) || !compatible(k, chosen));
        if maximal && !chosen.is_empty() {
            out.push(chosen.iter().map(|&k| heads[k].0).collect());
        }
        return;
    }
    if compatible(at, chosen) {
        chosen.push(at);
        extend(heads, at + 1, chosen, conflict, out);
        chosen.pop();
    }
    extend(heads, at + 1, chosen, conflict, out);
}
