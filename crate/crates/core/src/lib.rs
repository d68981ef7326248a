//! Geometry, coverage, routing and feasibility models for a communication
//! and compute constellation in low Mars orbit.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`astro`] | body constants, circular two-body propagation, frames |
//! | [`constellation`] | Walker constellations and ground-station catalogs |
//! | [`coverage`] | elevation, slant range, RTT and surface coverage reports |
//! | [`network`] | +GRID inter-satellite links, snapshots, routing, handovers |
//! | [`feasibility`] | power scaling, dust attenuation, soft errors, EDL mass |
//! | [`appmodels`] | latency models for offloading, collaboration, caching, pre-processing |
//! | [`scenario`] | flat `key=value` scenario files |
//! | [`runner`] | command dispatch and CSV report writers |
//!
//! Sweeps over grid points and time steps run on rayon when the `parallel`
//! feature is enabled (the default). Every reduction is done in a fixed
//! order afterwards, so results are bit-identical to the sequential path.

pub mod appmodels;
pub mod astro;
pub mod constellation;
pub mod coverage;
mod error;
pub mod exec;
pub mod feasibility;
pub mod network;
pub mod report;
pub mod runner;
pub mod scenario;

pub use astro::{BodyParameters, CircularOrbit, Vec3};
pub use constellation::{generate_walker, load_ground_stations, Constellation, GroundStation, WalkerConfig};
pub use coverage::{coverage_report, CoverageParams, CoverageReport};
pub use error::{Error, Result};
pub use exec::Execution;
pub use network::{build_plus_grid, shortest_path, snapshot, IslTopology, Route, TopologySnapshot};
pub use scenario::{parse_scenario, Scenario};

/// Vacuum speed of light, km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

/// Version string stamped into every report header.
pub const TOOL_VERSION: &str = concat!("marsnet ", env!("CARGO_PKG_VERSION"));
