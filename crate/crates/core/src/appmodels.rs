//! End-to-end latency and bandwidth models for on-orbit services:
//! compute offloading, multi-party collaboration, caching of Earth content
//! and pre-processing of data bound for Earth.

use crate::astro::positive;
use crate::network::{NodeId, TopologySnapshot};
use crate::{Error, Result};

/// Default orbital access bandwidth. No measured value exists; this is an
/// assumption and is labelled as such in reports.
pub const DEFAULT_ORBIT_BANDWIDTH_BPS: f64 = 100e6;

/// Mars–Earth relay link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthLink {
    pub rtt_s: f64,
    pub bandwidth_bps: f64,
}

impl Default for EarthLink {
    /// Six-minute round trip, 40.5 kbit/s.
    fn default() -> Self {
        Self {
            rtt_s: 360.0,
            bandwidth_bps: 40_500.0,
        }
    }
}

impl EarthLink {
    pub fn validate(&self) -> Result<()> {
        positive("earth.rtt_s", self.rtt_s)?;
        positive("earth.bandwidth_bps", self.bandwidth_bps)
    }
}

/// Ground-to-constellation access link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitLink {
    pub rtt_ms: f64,
    pub bandwidth_bps: f64,
}

impl OrbitLink {
    pub fn validate(&self) -> Result<()> {
        positive("orbit.rtt_ms", self.rtt_ms)?;
        positive("orbit.bandwidth_bps", self.bandwidth_bps)
    }
}

/// Upload, execute on a satellite, return the result.
pub fn offload_latency(payload_bits: f64, uplink_bps: f64, exec_time_s: f64, orbit: &OrbitLink) -> f64 {
    let transmit = if payload_bits == 0.0 { 0.0 } else { payload_bits / uplink_bps };
    transmit + exec_time_s + orbit.rtt_ms / 1_000.0
}

/// One-way network delay between two stations in a snapshot, ms.
/// `None` when no route exists. Routed from the lower station index so the
/// floating-point sum is identical in both directions.
pub fn collaboration_latency(snapshot: &TopologySnapshot, station_a: usize, station_b: usize) -> Option<f64> {
    let (lo, hi) = (station_a.min(station_b), station_a.max(station_b));
    snapshot
        .route_between(NodeId::Station(lo), NodeId::Station(hi))
        .map(|r| r.delay_ms)
}

/// Time to fetch an object through an on-orbit pull-through cache.
/// A miss additionally pays the Earth round trip and Earth-link transfer.
pub fn cache_fetch_latency(object_bits: f64, hit: bool, earth: &EarthLink, orbit: &OrbitLink) -> f64 {
    let orbital = orbit.rtt_ms / 1_000.0 + object_bits / orbit.bandwidth_bps;
    if hit {
        orbital
    } else {
        earth.rtt_s + object_bits / earth.bandwidth_bps + orbital
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkAssessment {
    pub rate_bps: f64,
    /// Whether the reduced stream fits the Earth link.
    pub fits: bool,
}

/// Data rate toward Earth after keeping `retention_fraction` of the raw stream.
pub fn preprocess_uplink_rate(raw_bps: f64, retention_fraction: f64, earth: &EarthLink) -> Result<UplinkAssessment> {
    if !(0.0..=1.0).contains(&retention_fraction) {
        return Err(Error::Domain(format!(
            "retention fraction must lie in [0, 1], got {retention_fraction}"
        )));
    }
    let rate_bps = raw_bps * retention_fraction;
    Ok(UplinkAssessment {
        rate_bps,
        fits: rate_bps <= earth.bandwidth_bps,
    })
}

/// Min, median and max of a sample; `None` when empty.
pub fn summary(values: &[f64]) -> Option<(f64, f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
    Some((v[0], median, v[n - 1]))
}
