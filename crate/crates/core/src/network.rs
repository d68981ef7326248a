//! +GRID inter-satellite links, per-instant topology snapshots, shortest-path
//! routing and handover timelines.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::astro::{self, BodyParameters, Vec3};
use crate::constellation::{Constellation, GroundStation};
use crate::coverage::{self, one_way_delay_ms, time_steps};
use crate::exec::{map_slice, Execution};
use crate::{Error, Result};

/// Inter-satellite links over `plane * sats_per_plane + slot` indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IslTopology {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub cross_seam: bool,
    /// Undirected edges `(a, b)` with `a < b`.
    pub edges: Vec<(usize, usize)>,
}

impl IslTopology {
    pub fn satellite_count(&self) -> usize {
        self.planes * self.sats_per_plane
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.satellite_count()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }
}

/// Intra-plane ring links plus same-slot links to adjacent planes.
///
/// Without `cross_seam`, planes 0 and P−1 have no link across the seam.
/// With two planes the seam link would duplicate the ordinary one, so
/// `cross_seam` only adds edges when P ≥ 3.
pub fn build_plus_grid(planes: usize, sats_per_plane: usize, cross_seam: bool) -> Result<IslTopology> {
    if planes == 0 {
        return Err(Error::invalid("planes", "must be >= 1"));
    }
    if sats_per_plane < 3 {
        return Err(Error::invalid(
            "sats_per_plane",
            format!("+GRID needs at least 3 satellites per plane, got {sats_per_plane}"),
        ));
    }
    let idx = |p: usize, s: usize| p * sats_per_plane + s;
    let ordered = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut edges = Vec::with_capacity(2 * planes * sats_per_plane);
    for p in 0..planes {
        for s in 0..sats_per_plane {
            edges.push(ordered(idx(p, s), idx(p, (s + 1) % sats_per_plane)));
        }
    }
    for p in 0..planes.saturating_sub(1) {
        for s in 0..sats_per_plane {
            edges.push(ordered(idx(p, s), idx(p + 1, s)));
        }
    }
    if cross_seam && planes >= 3 {
        for s in 0..sats_per_plane {
            edges.push(ordered(idx(planes - 1, s), idx(0, s)));
        }
    }
    Ok(IslTopology {
        planes,
        sats_per_plane,
        cross_seam,
        edges,
    })
}

/// Undirected weighted graph. Non-transit nodes may start or end a route
/// but are never passed through.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Graph {
    adjacency: Vec<Vec<(usize, f64)>>,
    transit: Vec<bool>,
}

impl Graph {
    pub fn new(nodes: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); nodes],
            transit: vec![true; nodes],
        }
    }

    pub fn add_node(&mut self, transit: bool) -> usize {
        self.adjacency.push(Vec::new());
        self.transit.push(transit);
        self.adjacency.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, weight: f64) {
        debug_assert!(a != b && weight > 0.0);
        self.adjacency[a].push((b, weight));
        self.adjacency[b].push((a, weight));
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn is_transit(&self, node: usize) -> bool {
        self.transit[node]
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency[a]
            .iter()
            .filter(|(n, _)| *n == b)
            .map(|&(_, w)| w)
            .reduce(f64::min)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub nodes: Vec<usize>,
    /// One-way propagation delay, ms.
    pub delay_ms: f64,
}

impl Route {
    pub fn hops(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }
}

#[derive(PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, node)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn path_to(pred: &[Option<usize>], src: usize, node: usize) -> Vec<usize> {
    let mut path = vec![node];
    let mut cur = node;
    while cur != src {
        cur = pred[cur].expect("reached node has a predecessor");
        path.push(cur);
    }
    path.reverse();
    path
}

/// Minimum-delay route from `src` to `dst`, `None` when unreachable.
///
/// Among equal-delay routes the lexicographically smallest node sequence
/// wins. For `src == dst` the route is just `[src]` with zero delay.
pub fn shortest_path(graph: &Graph, src: usize, dst: usize) -> Option<Route> {
    let n = graph.node_count();
    assert!(src < n && dst < n, "node out of range");
    if src == dst {
        return Some(Route {
            nodes: vec![src],
            delay_ms: 0.0,
        });
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Frontier { dist: 0.0, node: src });

    while let Some(Frontier { dist: d, node: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == dst {
            break;
        }
        if u != src && !graph.is_transit(u) {
            continue;
        }
        for &(v, w) in graph.neighbors(u) {
            if done[v] {
                continue;
            }
            let cand = d + w;
            let better = match cand.total_cmp(&dist[v]) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => {
                    let mut via_u = path_to(&pred, src, u);
                    via_u.push(v);
                    via_u < path_to(&pred, src, v)
                }
            };
            if better {
                dist[v] = cand;
                pred[v] = Some(u);
                heap.push(Frontier { dist: cand, node: v });
            }
        }
    }
    done[dst].then(|| Route {
        nodes: path_to(&pred, src, dst),
        delay_ms: dist[dst],
    })
}

/// A node of a [`TopologySnapshot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeId {
    Satellite(usize),
    Station(usize),
}

/// Network graph at one instant: satellites first, then ground stations.
/// Edge weights are one-way propagation delays in ms.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologySnapshot {
    pub time_s: f64,
    pub graph: Graph,
    pub satellite_positions: Vec<Vec3>,
    satellite_labels: Vec<String>,
    station_names: Vec<String>,
    /// ISLs dropped because the body blocked the line of sight.
    pub occluded_isls: usize,
}

impl TopologySnapshot {
    pub fn satellite_count(&self) -> usize {
        self.satellite_labels.len()
    }

    pub fn station_count(&self) -> usize {
        self.station_names.len()
    }

    pub fn index(&self, node: NodeId) -> usize {
        match node {
            NodeId::Satellite(i) => i,
            NodeId::Station(i) => self.satellite_count() + i,
        }
    }

    pub fn node(&self, index: usize) -> NodeId {
        let sats = self.satellite_count();
        if index < sats {
            NodeId::Satellite(index)
        } else {
            NodeId::Station(index - sats)
        }
    }

    pub fn label(&self, index: usize) -> &str {
        match self.node(index) {
            NodeId::Satellite(i) => &self.satellite_labels[i],
            NodeId::Station(i) => &self.station_names[i],
        }
    }

    pub fn station_index(&self, name: &str) -> Option<usize> {
        self.station_names.iter().position(|n| n == name)
    }

    pub fn route_between(&self, a: NodeId, b: NodeId) -> Option<Route> {
        shortest_path(&self.graph, self.index(a), self.index(b))
    }
}

/// `true` when the segment `a`–`b` stays clear of a sphere of `radius`.
pub fn line_of_sight(a: Vec3, b: Vec3, radius: f64) -> bool {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 { (-a.dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (a + ab * t).norm() > radius
}

/// Builds the network graph at time `t`.
///
/// ISL weights come from satellite distances at `t`; every station is
/// linked to each satellite at or above its minimum elevation.
pub fn snapshot(
    body: &BodyParameters,
    constellation: &Constellation,
    topology: &IslTopology,
    stations: &[GroundStation],
    t: f64,
) -> Result<TopologySnapshot> {
    if topology.satellite_count() != constellation.len() {
        return Err(Error::invalid(
            "topology",
            format!(
                "{} satellites in topology, {} in constellation",
                topology.satellite_count(),
                constellation.len()
            ),
        ));
    }
    let positions: Vec<Vec3> = constellation
        .satellites()
        .iter()
        .map(|s| astro::propagate(body, &s.orbit, t))
        .collect();
    let mut graph = Graph::new(positions.len());
    let mut occluded = 0;
    for &(a, b) in &topology.edges {
        let (pa, pb) = (positions[a], positions[b]);
        if line_of_sight(pa, pb, body.radius_km) {
            graph.add_edge(a, b, one_way_delay_ms(pa.distance(pb)));
        } else {
            occluded += 1;
        }
    }
    for station in stations {
        let node = graph.add_node(false);
        let ground = astro::ground_point_position(body, station.lat_deg, station.lon_deg, t);
        for (i, &sat) in positions.iter().enumerate() {
            let Ok(el) = coverage::elevation(ground, sat) else { continue };
            if el >= station.min_elevation_deg {
                graph.add_edge(node, i, one_way_delay_ms(ground.distance(sat)));
            }
        }
    }
    Ok(TopologySnapshot {
        time_s: t,
        graph,
        satellite_positions: positions,
        satellite_labels: constellation.satellites().iter().map(|s| s.label()).collect(),
        station_names: stations.iter().map(|s| s.name.clone()).collect(),
        occluded_isls: occluded,
    })
}

/// Snapshots at every time in `times`, built independently.
pub fn snapshot_series(
    body: &BodyParameters,
    constellation: &Constellation,
    topology: &IslTopology,
    stations: &[GroundStation],
    times: &[f64],
    execution: Execution,
) -> Result<Vec<TopologySnapshot>> {
    map_slice(execution, times, |&t| snapshot(body, constellation, topology, stations, t))
        .into_iter()
        .collect()
}

/// Single-attachment rule for picking the serving satellite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HandoverPolicy {
    #[default]
    MaxElevation,
    MinRtt,
}

impl FromStr for HandoverPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-elevation" => Ok(Self::MaxElevation),
            "min-rtt" => Ok(Self::MinRtt),
            other => Err(Error::invalid(
                "handover policy",
                format!("`{other}` is not one of max-elevation, min-rtt"),
            )),
        }
    }
}

impl fmt::Display for HandoverPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MaxElevation => "max-elevation",
            Self::MinRtt => "min-rtt",
        })
    }
}

/// Maximal interval with one serving satellite (`None`: no satellite visible).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServingInterval {
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub satellite: Option<usize>,
}

/// Serving satellite per step, merged into maximal constant intervals.
/// The last interval ends at `t1`. Ties go to the lower satellite index.
#[allow(clippy::too_many_arguments)]
pub fn handover_timeline(
    body: &BodyParameters,
    constellation: &Constellation,
    station: &GroundStation,
    t0: f64,
    t1: f64,
    dt: f64,
    policy: HandoverPolicy,
    execution: Execution,
) -> Result<Vec<ServingInterval>> {
    let times = time_steps(t0, t1, dt)?;
    let serving = map_slice(execution, &times, |&t| {
        let visible = coverage::visible_satellites(body, constellation, station, t);
        visible
            .iter()
            .reduce(|best, cand| {
                let better = match policy {
                    HandoverPolicy::MaxElevation => cand.elevation_deg > best.elevation_deg,
                    HandoverPolicy::MinRtt => cand.rtt_ms < best.rtt_ms,
                };
                if better {
                    cand
                } else {
                    best
                }
            })
            .map(|s| s.satellite)
    });

    let mut intervals: Vec<ServingInterval> = Vec::new();
    for (&t, sat) in times.iter().zip(serving) {
        match intervals.last_mut() {
            Some(last) if last.satellite == sat => {}
            Some(last) => {
                last.t_end_s = t;
                intervals.push(ServingInterval {
                    t_start_s: t,
                    t_end_s: t1,
                    satellite: sat,
                });
            }
            None => intervals.push(ServingInterval {
                t_start_s: t,
                t_end_s: t1,
                satellite: sat,
            }),
        }
    }
    Ok(intervals)
}

/// Handovers in a timeline; gaps count as interval boundaries.
pub fn handover_count(timeline: &[ServingInterval]) -> usize {
    timeline.len().saturating_sub(1)
}
