//! Greedy multi-hop relay routing toward the nearest gateway.
//!
//! Each BS forwards to the gateway closest to it. If the gateway is within
//! `r` it transmits directly; otherwise it relays through the neighbor
//! (within `r`) that is closest to its gateway, provided that neighbor is
//! strictly closer to the gateway than the BS itself.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::Point2D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub bs_positions: Vec<Point2D>,
    pub gateway_positions: Vec<Point2D>,
    /// Small-cell radius `r` in meters; also the maximum hop length.
    pub small_cell_radius: f64,
    /// Interference protection factor Δ; simultaneous transmitters must be
    /// more than `(1 + Δ)·r` apart.
    pub exclusion_factor: f64,
    /// Per-link transmission rate W in bits/second.
    pub link_rate: f64,
}

impl NetworkTopology {
    pub fn new(
        bs_positions: Vec<Point2D>,
        gateway_positions: Vec<Point2D>,
        small_cell_radius: f64,
        exclusion_factor: f64,
        link_rate: f64,
    ) -> Result<Self> {
        if gateway_positions.is_empty() {
            return Err(SimError::invalid(
                "gateways",
                "at least one gateway is required",
            ));
        }
        if !(small_cell_radius > 0.0 && small_cell_radius.is_finite()) {
            return Err(SimError::invalid("r", "must be positive and finite"));
        }
        if !(exclusion_factor >= 0.0 && exclusion_factor.is_finite()) {
            return Err(SimError::invalid("delta", "must be >= 0"));
        }
        if !(link_rate > 0.0 && link_rate.is_finite()) {
            return Err(SimError::invalid("link_rate", "must be positive"));
        }
        Ok(Self {
            bs_positions,
            gateway_positions,
            small_cell_radius,
            exclusion_factor,
            link_rate,
        })
    }

    pub fn bs_count(&self) -> usize {
        self.bs_positions.len()
    }

    /// `(1 + Δ)·r`
    pub fn exclusion_distance(&self) -> f64 {
        (1.0 + self.exclusion_factor) * self.small_cell_radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NextHop {
    Bs(usize),
    DirectToGateway,
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteEntry {
    pub gateway: usize,
    pub next_hop: NextHop,
    /// Transmissions needed to reach a gateway, counting the final hop.
    /// `None` when the BS cannot reach any gateway.
    pub hop_count: Option<u32>,
}

impl RouteEntry {
    pub fn is_connected(&self) -> bool {
        self.hop_count.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteTable {
    pub entries: Vec<RouteEntry>,
    pub connected_count: usize,
    /// Mean hop count over connected BSs, `None` if there are none.
    pub mean_hops: Option<f64>,
}

impl RouteTable {
    /// The BS sequence a packet from `bs` visits, starting with `bs` itself.
    /// The last element transmits into [`RouteTable::delivery_gateway`].
    /// Returns `None` for disconnected BSs.
    pub fn path(&self, bs: usize) -> Option<Vec<usize>> {
        if !self.entries[bs].is_connected() {
            return None;
        }
        let mut path = vec![bs];
        let mut cur = bs;
        loop {
            match self.entries[cur].next_hop {
                NextHop::DirectToGateway => return Some(path),
                NextHop::Bs(next) => {
                    path.push(next);
                    cur = next;
                }
                NextHop::Disconnected => {
                    unreachable!("connected BS relays into a disconnected one")
                }
            }
        }
    }

    /// Gateway that finally receives traffic originating at `bs`.
    pub fn delivery_gateway(&self, bs: usize) -> Option<usize> {
        self.path(bs)
            .map(|p| self.entries[*p.last().expect("non-empty path")].gateway)
    }

    pub fn total_hops(&self) -> u64 {
        self.entries
            .iter()
            .filter_map(|e| e.hop_count)
            .map(u64::from)
            .sum()
    }
}

/// Index of the nearest gateway; ties go to the lowest index.
pub fn assign_gateway(bs: &Point2D, gateways: &[Point2D]) -> usize {
    assert!(!gateways.is_empty(), "gateway list must be non-empty");
    let mut best = 0;
    let mut best_d = bs.distance(&gateways[0]);
    for (i, g) in gateways.iter().enumerate().skip(1) {
        let d = bs.distance(g);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

pub fn next_hop(bs: usize, topology: &NetworkTopology, gateway: &Point2D) -> NextHop {
    let r = topology.small_cell_radius;
    let me = &topology.bs_positions[bs];
    let my_dist = me.distance(gateway);
    if my_dist <= r {
        return NextHop::DirectToGateway;
    }
    let mut best: Option<(usize, f64)> = None;
    for (j, p) in topology.bs_positions.iter().enumerate() {
        if j == bs || me.distance(p) > r {
            continue;
        }
        let d = p.distance(gateway);
        if d >= my_dist {
            continue;
        }
        if best.map_or(true, |(_, bd)| d < bd) {
            best = Some((j, d));
        }
    }
    best.map_or(NextHop::Disconnected, |(j, _)| NextHop::Bs(j))
}

pub fn build_routes(topology: &NetworkTopology) -> RouteTable {
    let n = topology.bs_count();
    let gateways: Vec<usize> = topology
        .bs_positions
        .iter()
        .map(|p| assign_gateway(p, &topology.gateway_positions))
        .collect();
    let hops: Vec<NextHop> = (0..n)
        .map(|i| next_hop(i, topology, &topology.gateway_positions[gateways[i]]))
        .collect();

    // Every relay is strictly closer to its own gateway than the sender is to
    // its gateway, so the forwarding graph is acyclic and memoized descent terminates.
    let mut hop_count: Vec<Option<Option<u32>>> = vec![None; n];
    for start in 0..n {
        let mut stack = vec![start];
        while let Some(&cur) = stack.last() {
            if hop_count[cur].is_some() {
                stack.pop();
                continue;
            }
            match hops[cur] {
                NextHop::DirectToGateway => {
                    hop_count[cur] = Some(Some(1));
                    stack.pop();
                }
                NextHop::Disconnected => {
                    hop_count[cur] = Some(None);
                    stack.pop();
                }
                NextHop::Bs(next) => match hop_count[next] {
                    Some(downstream) => {
                        hop_count[cur] = Some(downstream.map(|h| h + 1));
                        stack.pop();
                    }
                    None => {
                        debug_assert!(stack.len() <= n, "forwarding cycle");
                        stack.push(next);
                    }
                },
            }
        }
    }

    let entries: Vec<RouteEntry> = (0..n)
        .map(|i| RouteEntry {
            gateway: gateways[i],
            next_hop: hops[i],
            hop_count: hop_count[i].flatten(),
        })
        .collect();
    let connected: Vec<u32> = entries.iter().filter_map(|e| e.hop_count).collect();
    let mean_hops = (!connected.is_empty())
        .then(|| connected.iter().map(|&h| f64::from(h)).sum::<f64>() / connected.len() as f64);
    RouteTable {
        connected_count: connected.len(),
        entries,
        mean_hops,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{place_gateways, GatewayConfig, MacrocellRegion};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::VecDeque;

    const R: f64 = 100.0;

    fn topo(bs: Vec<Point2D>, gws: Vec<Point2D>) -> NetworkTopology {
        NetworkTopology::new(bs, gws, R, 0.5, 1e9).unwrap()
    }

    fn top_vertices() -> Vec<Point2D> {
        place_gateways(
            &GatewayConfig::TopVertices,
            &MacrocellRegion::new(1000.0, Point2D::ORIGIN).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn nearest_gateway_and_tie_break() {
        let gws = top_vertices();
        assert_eq!(assign_gateway(&Point2D::new(0.0, 900.0), &gws), 0);
        assert_eq!(assign_gateway(&Point2D::new(800.0, -450.0), &gws), 2);
        assert_eq!(assign_gateway(&Point2D::ORIGIN, &gws), 0);
    }

    #[test]
    fn nearest_gateway_matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gws: Vec<Point2D> = (0..5)
            .map(|_| {
                Point2D::new(
                    rng.gen_range(-1000.0..1000.0),
                    rng.gen_range(-1000.0..1000.0),
                )
            })
            .collect();
        for _ in 0..1000 {
            let p = Point2D::new(
                rng.gen_range(-1000.0..1000.0),
                rng.gen_range(-1000.0..1000.0),
            );
            let dists: Vec<f64> = gws.iter().map(|g| p.distance(g)).collect();
            let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
            let expected = dists.iter().position(|&d| d == min).unwrap();
            assert_eq!(assign_gateway(&p, &gws), expected);
        }
    }

    #[test]
    fn direct_when_within_radius() {
        let t = topo(
            vec![Point2D::new(0.5 * R, 0.0), Point2D::new(0.2 * R, 0.1 * R)],
            vec![Point2D::ORIGIN],
        );
        assert_eq!(next_hop(0, &t, &Point2D::ORIGIN), NextHop::DirectToGateway);
    }

    #[test]
    fn isolated_bs_is_disconnected() {
        let t = topo(
            vec![Point2D::new(3.0 * R, 0.0), Point2D::new(0.0, 3.0 * R)],
            vec![Point2D::ORIGIN],
        );
        assert_eq!(next_hop(0, &t, &Point2D::ORIGIN), NextHop::Disconnected);
        let table = build_routes(&t);
        assert_eq!(table.connected_count, 0);
        assert_eq!(table.mean_hops, None);
        assert_eq!(table.path(0), None);
    }

    /// A at 2.5r from the gateway; B and C both within r of A at 1.8r and 1.6r
    /// from the gateway. Coordinates: gateway at origin, A on the x axis,
    /// B and C placed on circles of the stated radii at small angles.
    #[test]
    fn relays_through_neighbor_closest_to_gateway() {
        let a = Point2D::new(2.5 * R, 0.0);
        let b = Point2D::ORIGIN.polar_offset(1.8 * R, 10.0);
        let c = Point2D::ORIGIN.polar_offset(1.6 * R, -8.0);
        assert!(a.distance(&b) <= R && a.distance(&c) <= R);
        let t = topo(vec![a, b, c], vec![Point2D::ORIGIN]);
        assert_eq!(next_hop(0, &t, &Point2D::ORIGIN), NextHop::Bs(2));
    }

    #[test]
    fn equidistant_candidates_pick_lowest_index() {
        let a = Point2D::new(1.8 * R, 0.0);
        let b = Point2D::new(1.0 * R, 0.3 * R);
        let c = Point2D::new(1.0 * R, -0.3 * R);
        let t = topo(vec![a, c, b], vec![Point2D::ORIGIN]);
        assert_eq!(next_hop(0, &t, &Point2D::ORIGIN), NextHop::Bs(1));
    }

    #[test]
    fn single_direct_bs() {
        let t = topo(vec![Point2D::new(0.9 * R, 0.0)], vec![Point2D::ORIGIN]);
        let table = build_routes(&t);
        assert_eq!(table.entries[0].hop_count, Some(1));
        assert_eq!(table.mean_hops, Some(1.0));
        assert_eq!(table.delivery_gateway(0), Some(0));
    }

    #[test]
    fn straight_chain_of_three() {
        let bs = vec![
            Point2D::new(2.8 * R, 0.0),
            Point2D::new(1.9 * R, 0.0),
            Point2D::new(1.0 * R, 0.0),
        ];
        let table = build_routes(&topo(bs, vec![Point2D::ORIGIN]));
        assert_eq!(table.entries[0].next_hop, NextHop::Bs(1));
        assert_eq!(table.entries[1].next_hop, NextHop::Bs(2));
        assert_eq!(table.entries[2].next_hop, NextHop::DirectToGateway);
        assert_eq!(table.entries[0].hop_count, Some(3));
        assert_eq!(table.path(0), Some(vec![0, 1, 2]));
        assert_eq!(table.mean_hops, Some(2.0));
        assert_eq!(table.total_hops(), 6);
    }

    /// Minimum hop count to any gateway over the unit-disk graph (edges <= r).
    fn bfs_min_hops(t: &NetworkTopology, start: usize) -> Option<u32> {
        let n = t.bs_count();
        let mut dist = vec![None; n];
        dist[start] = Some(0u32);
        let mut queue = VecDeque::from([start]);
        let mut best: Option<u32> = None;
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            let p = t.bs_positions[u];
            if t.gateway_positions
                .iter()
                .any(|g| p.distance(g) <= t.small_cell_radius)
            {
                best = Some(best.map_or(du + 1, |b: u32| b.min(du + 1)));
            }
            for v in 0..n {
                if dist[v].is_none() && p.distance(&t.bs_positions[v]) <= t.small_cell_radius {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        best
    }

    proptest::proptest! {
        #[test]
        fn greedy_never_beats_bfs(seed in proptest::prelude::any::<u64>(), n in 1usize..=12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bs: Vec<Point2D> = (0..n)
                .map(|_| Point2D::new(rng.gen_range(-400.0..400.0), rng.gen_range(-400.0..400.0)))
                .collect();
            let t = topo(bs, vec![Point2D::ORIGIN, Point2D::new(300.0, 300.0)]);
            let table = build_routes(&t);
            for i in 0..n {
                if let Some(h) = table.entries[i].hop_count {
                    let opt = bfs_min_hops(&t, i);
                    proptest::prop_assert!(opt.is_some());
                    proptest::prop_assert!(h >= opt.unwrap());
                }
            }
        }
    }
}
