//! Slot-by-slot scheduling of backhaul transmissions.
//!
//! Every connected BS injects one unit packet per epoch. A slot admits a set
//! of links whose transmitters are pairwise more than `(1 + Δ)·r` apart and
//! which share no BS (half-duplex, one link per BS). Gateways are receive-only
//! and may absorb several links in the same slot.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::routing::{NetworkTopology, RouteTable};

pub mod oracle;

pub use oracle::{optimal_schedule_oracle, optimal_slots_for_flows};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receiver {
    Bs(usize),
    Gateway(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BackhaulLink {
    pub tx: usize,
    pub rx: Receiver,
    /// BS whose packet this link carries.
    pub owner_flow: usize,
    /// Hops left for the owner's packet, this one included.
    pub remaining_hops_of_flow: u32,
}

impl BackhaulLink {
    fn shares_bs_with(&self, other: &BackhaulLink) -> bool {
        let rx_bs = |l: &BackhaulLink| match l.rx {
            Receiver::Bs(i) => Some(i),
            Receiver::Gateway(_) => None,
        };
        let (a_rx, b_rx) = (rx_bs(self), rx_bs(other));
        self.tx == other.tx
            || Some(self.tx) == b_rx
            || a_rx == Some(other.tx)
            || (a_rx.is_some() && a_rx == b_rx)
    }
}

/// True iff the two links cannot share a slot.
pub fn links_conflict(a: &BackhaulLink, b: &BackhaulLink, topology: &NetworkTopology) -> bool {
    let pa = &topology.bs_positions[a.tx];
    let pb = &topology.bs_positions[b.tx];
    pa.distance(pb) <= topology.exclusion_distance() || a.shares_bs_with(b)
}

/// The ordered hop sequence of one packet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub owner: usize,
    pub links: Vec<BackhaulLink>,
}

/// Expands each connected BS's route into its list of links, in BS index order.
pub fn flows(routes: &RouteTable) -> Vec<Flow> {
    (0..routes.entries.len())
        .filter_map(|owner| {
            let path = routes.path(owner)?;
            let h = path.len() as u32;
            let links = path
                .iter()
                .enumerate()
                .map(|(i, &tx)| BackhaulLink {
                    tx,
                    rx: match path.get(i + 1) {
                        Some(&next) => Receiver::Bs(next),
                        None => Receiver::Gateway(routes.entries[tx].gateway),
                    },
                    owner_flow: owner,
                    remaining_hops_of_flow: h - i as u32,
                })
                .collect();
            Some(Flow { owner, links })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTrace {
    pub slots: Vec<Vec<BackhaulLink>>,
    pub total_activations: u64,
}

impl ScheduleTrace {
    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// Y(n): mean number of simultaneous transmissions per slot.
    pub fn mean_concurrency(&self) -> f64 {
        self.total_activations as f64 / self.slots.len() as f64
    }

    /// One JSON object per line: `{"slot":i,"links":[{"tx":..,"rx":..,"owner_flow":..}]}`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        #[derive(Serialize)]
        struct LinkRecord {
            tx: usize,
            rx: Receiver,
            owner_flow: usize,
        }
        #[derive(Serialize)]
        struct SlotRecord {
            slot: usize,
            links: Vec<LinkRecord>,
        }
        for (slot, links) in self.slots.iter().enumerate() {
            let record = SlotRecord {
                slot,
                links: links
                    .iter()
                    .map(|l| LinkRecord {
                        tx: l.tx,
                        rx: l.rx,
                        owner_flow: l.owner_flow,
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn run_schedule(routes: &RouteTable, topology: &NetworkTopology) -> Result<ScheduleTrace> {
    run_schedule_with(routes, topology, |a, b| links_conflict(a, b, topology))
}

/// Greedy maximal scheduling with a caller-supplied conflict relation.
///
/// Each slot the head link of every unfinished packet is a candidate.
/// Candidates are ordered by remaining hops (descending) then owner index,
/// and admitted if they conflict with nothing already admitted in the slot.
pub fn run_schedule_with<F>(
    routes: &RouteTable,
    topology: &NetworkTopology,
    conflict: F,
) -> Result<ScheduleTrace>
where
    F: Fn(&BackhaulLink, &BackhaulLink) -> bool,
{
    debug_assert_eq!(routes.entries.len(), topology.bs_count());
    if routes.connected_count == 0 {
        return Err(SimError::NoConnectedBs);
    }
    Ok(schedule_flows(&flows(routes), conflict))
}

/// Greedy schedule for an explicit set of packets. See [`run_schedule_with`].
pub fn schedule_flows<F>(flows: &[Flow], conflict: F) -> ScheduleTrace
where
    F: Fn(&BackhaulLink, &BackhaulLink) -> bool,
{
    let mut progress = vec![0usize; flows.len()];
    let mut pending: Vec<usize> = (0..flows.len())
        .filter(|&f| !flows[f].links.is_empty())
        .collect();
    let mut slots = Vec::new();
    let mut total_activations = 0u64;

    while !pending.is_empty() {
        let mut candidates: Vec<(usize, BackhaulLink)> = pending
            .iter()
            .map(|&f| (f, flows[f].links[progress[f]]))
            .collect();
        candidates.sort_by(|(_, a), (_, b)| {
            b.remaining_hops_of_flow
                .cmp(&a.remaining_hops_of_flow)
                .then(a.owner_flow.cmp(&b.owner_flow))
        });
        let mut admitted: Vec<BackhaulLink> = Vec::new();
        for (f, link) in candidates {
            if admitted.iter().all(|other| !conflict(&link, other)) {
                admitted.push(link);
                progress[f] += 1;
            }
        }
        assert!(
            !admitted.is_empty(),
            "conflict relation rejected a lone link"
        );
        total_activations += admitted.len() as u64;
        slots.push(admitted);
        pending.retain(|&f| progress[f] < flows[f].links.len());
    }

    ScheduleTrace {
        slots,
        total_activations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2D;
    use crate::routing::build_routes;

    const R: f64 = 100.0;

    fn topo(bs: Vec<Point2D>, gws: Vec<Point2D>) -> NetworkTopology {
        NetworkTopology::new(bs, gws, R, 0.5, 1e9).unwrap()
    }

    fn link(tx: usize, rx: Receiver) -> BackhaulLink {
        BackhaulLink {
            tx,
            rx,
            owner_flow: tx,
            remaining_hops_of_flow: 1,
        }
    }

    #[test]
    fn exclusion_threshold_is_inclusive() {
        let t = topo(
            vec![
                Point2D::ORIGIN,
                Point2D::new(1.6 * R, 0.0),
                Point2D::new(1.5 * R, 0.0),
            ],
            vec![Point2D::new(0.0, 5.0 * R)],
        );
        let a = link(0, Receiver::Gateway(0));
        assert!(!links_conflict(&a, &link(1, Receiver::Gateway(0)), &t));
        assert!(links_conflict(&a, &link(2, Receiver::Gateway(0)), &t));
    }

    #[test]
    fn shared_relay_conflicts_even_when_far_apart() {
        let t = topo(
            vec![
                Point2D::ORIGIN,
                Point2D::new(5.0 * R, 0.0),
                Point2D::new(10.0 * R, 0.0),
            ],
            vec![Point2D::new(20.0 * R, 0.0)],
        );
        // X -> Y and Y -> Z
        let xy = link(0, Receiver::Bs(1));
        let yz = link(1, Receiver::Bs(2));
        assert!(links_conflict(&xy, &yz, &t));
        // two transmitters into the same BS
        let zy = link(2, Receiver::Bs(1));
        assert!(links_conflict(&xy, &zy, &t));
        // same gateway is fine
        assert!(!links_conflict(
            &link(0, Receiver::Gateway(0)),
            &link(2, Receiver::Gateway(0)),
            &t
        ));
    }

    #[test]
    fn single_direct_link() {
        let t = topo(vec![Point2D::new(50.0, 0.0)], vec![Point2D::ORIGIN]);
        let trace = run_schedule(&build_routes(&t), &t).unwrap();
        assert_eq!(trace.slot_count(), 1);
        assert_eq!(trace.mean_concurrency(), 1.0);
    }

    #[test]
    fn far_apart_direct_links_share_a_slot() {
        let t = topo(
            vec![Point2D::new(50.0, 0.0), Point2D::new(550.0, 0.0)],
            vec![Point2D::ORIGIN, Point2D::new(600.0, 0.0)],
        );
        let trace = run_schedule(&build_routes(&t), &t).unwrap();
        assert_eq!(trace.slot_count(), 1);
        assert_eq!(trace.mean_concurrency(), 2.0);
    }

    #[test]
    fn close_direct_links_serialize() {
        let t = topo(
            vec![Point2D::new(40.0, 40.0), Point2D::new(40.0, -40.0)],
            vec![Point2D::ORIGIN],
        );
        let trace = run_schedule(&build_routes(&t), &t).unwrap();
        assert_eq!(trace.slot_count(), 2);
        assert_eq!(trace.mean_concurrency(), 1.0);
    }

    #[test]
    fn longest_remaining_flow_goes_first() {
        // 0 relays through 1; 1 also has its own packet.
        let t = topo(
            vec![Point2D::new(1.8 * R, 0.0), Point2D::new(0.9 * R, 0.0)],
            vec![Point2D::ORIGIN],
        );
        let trace = run_schedule(&build_routes(&t), &t).unwrap();
        assert_eq!(
            trace.slots[0],
            vec![BackhaulLink {
                tx: 0,
                rx: Receiver::Bs(1),
                owner_flow: 0,
                remaining_hops_of_flow: 2,
            }]
        );
        assert_eq!(trace.slot_count(), 3);
        assert_eq!(trace.total_activations, 3);
    }

    #[test]
    fn no_connected_bs_is_an_error() {
        let t = topo(vec![Point2D::new(900.0, 0.0)], vec![Point2D::ORIGIN]);
        assert_eq!(
            run_schedule(&build_routes(&t), &t),
            Err(SimError::NoConnectedBs)
        );
    }

    #[test]
    fn jsonl_dump_has_one_line_per_slot() {
        let t = topo(
            vec![Point2D::new(1.8 * R, 0.0), Point2D::new(0.9 * R, 0.0)],
            vec![Point2D::ORIGIN],
        );
        let trace = run_schedule(&build_routes(&t), &t).unwrap();
        let mut buf = Vec::new();
        trace.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            r#"{"slot":0,"links":[{"tx":0,"rx":{"bs":1},"owner_flow":0}]}"#
        );
        assert!(lines[2].contains(r#""rx":{"gateway":0}"#));
    }
}
