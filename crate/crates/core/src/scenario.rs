//! Flat `key=value` scenario files.
//!
//! One assignment per line; blank lines and lines starting with `#` are
//! ignored. Every key is optional and falls back to the nine-plane,
//! 1,120 km, 25° reference design. Relative paths are resolved against the
//! directory holding the scenario file.
//!
//! ```text
//! # four planes instead of nine
//! walker.planes=4
//! time.dt_s=30
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::appmodels::{EarthLink, DEFAULT_ORBIT_BANDWIDTH_BPS};
use crate::astro::{areostationary_altitude, positive, BodyParameters};
use crate::constellation::{generate_walker, Constellation, WalkerConfig};
use crate::coverage::{CoverageParams, time_steps};
use crate::feasibility::{DistanceMode, MassBudget};
use crate::network::HandoverPolicy;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinkParams {
    pub ref_power_w: f64,
    pub ref_rate_bps: f64,
    /// `None`: the body's synchronous altitude.
    pub ref_altitude_km: Option<f64>,
    pub target_altitude_km: f64,
    pub distance_mode: DistanceMode,
    pub dust_attenuation_db: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            ref_power_w: 10.0,
            ref_rate_bps: 1_000.0,
            ref_altitude_km: None,
            target_altitude_km: 1_000.0,
            distance_mode: DistanceMode::EdgeOfCoverage,
            dust_attenuation_db: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppParams {
    pub earth: EarthLink,
    pub orbit_bandwidth_bps: f64,
    /// `None`: worst-case edge-of-coverage RTT of the constellation.
    pub orbit_rtt_ms: Option<f64>,
    pub payload_bits: f64,
    pub uplink_bps: f64,
    pub exec_time_s: f64,
    pub object_bits: f64,
    pub raw_bps: f64,
    pub retention_fraction: f64,
    /// Added to every collaboration path for on-path service compute.
    pub service_time_ms: f64,
}

impl Default for AppParams {
    fn default() -> Self {
        Self {
            earth: EarthLink::default(),
            orbit_bandwidth_bps: DEFAULT_ORBIT_BANDWIDTH_BPS,
            orbit_rtt_ms: None,
            payload_bits: 8e6,
            uplink_bps: 1e6,
            exec_time_s: 0.5,
            object_bits: 8e6,
            raw_bps: 405_000.0,
            retention_fraction: 0.1,
            service_time_ms: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub body: BodyParameters,
    pub walker: WalkerConfig,
    pub cross_seam: bool,
    /// `None`: the bundled landing-site catalog.
    pub stations_catalog: Option<PathBuf>,
    pub t0_s: f64,
    /// `None`: one orbital period after `t0_s`.
    pub t1_s: Option<f64>,
    pub dt_s: f64,
    pub grid_deg: f64,
    pub min_elevation_deg: f64,
    pub band_deg: f64,
    pub processing_delay_ms: f64,
    pub handover_policy: HandoverPolicy,
    pub link: LinkParams,
    pub mass: MassBudget,
    pub soft_error_rate_per_day: f64,
    pub soft_error_days: f64,
    pub apps: AppParams,
    pub output_dir: Option<PathBuf>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            body: BodyParameters::mars(),
            walker: WalkerConfig::default(),
            cross_seam: false,
            stations_catalog: None,
            t0_s: 0.0,
            t1_s: None,
            dt_s: 10.0,
            grid_deg: 2.0,
            min_elevation_deg: 25.0,
            band_deg: 10.0,
            processing_delay_ms: 0.0,
            handover_policy: HandoverPolicy::MaxElevation,
            link: LinkParams::default(),
            mass: MassBudget::mars_2020(),
            soft_error_rate_per_day: 1e-3,
            soft_error_days: 1.0,
            apps: AppParams::default(),
            output_dir: None,
        }
    }
}

const MASS_KEYS: [&str; 4] = ["backshell", "heat_shield", "descent_stage", "propellant"];

/// Reads and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario_str(&text, base)
}

/// Parses scenario text; relative paths resolve against `base_dir`.
pub fn parse_scenario_str(text: &str, base_dir: &Path) -> Result<Scenario> {
    let mut sc = Scenario::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(Error::Scenario {
                line,
                message: format!("expected key=value, found `{trimmed}`"),
            });
        };
        sc.set(key.trim(), value.trim(), line, base_dir)?;
    }
    sc.validate()?;
    Ok(sc)
}

fn parse<T: FromStr>(value: &str, key: &str, line: usize, what: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Scenario {
        line,
        message: format!("`{key}` expects {what}, found `{value}`"),
    })
}

impl Scenario {
    fn set(&mut self, key: &str, value: &str, line: usize, base_dir: &Path) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            parse::<f64>(v, key, line, "a number").and_then(|x| {
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(Error::Scenario {
                        line,
                        message: format!("`{key}` must be finite"),
                    })
                }
            })
        };
        let count = |v: &str| parse::<usize>(v, key, line, "a non-negative integer");
        let flag = |v: &str| parse::<bool>(v, key, line, "true or false");

        match key {
            "body.radius_km" => self.body.radius_km = num(value)?,
            "body.gm_km3_s2" => self.body.gm_km3_s2 = num(value)?,
            "body.rotation_period_s" => self.body.rotation_period_s = num(value)?,
            "walker.planes" => self.walker.planes = count(value)?,
            "walker.sats_per_plane" => self.walker.sats_per_plane = count(value)?,
            "walker.altitude_km" => self.walker.altitude_km = num(value)?,
            "walker.inclination_deg" => self.walker.inclination_deg = num(value)?,
            "walker.raan_spread_deg" => self.walker.raan_spread_deg = num(value)?,
            "walker.phasing_offset_deg" => self.walker.phasing_offset_deg = num(value)?,
            "isl.cross_seam" => self.cross_seam = flag(value)?,
            "stations.catalog" => {
                let p = PathBuf::from(value);
                let p = if p.is_relative() { base_dir.join(p) } else { p };
                if !p.is_file() {
                    return Err(Error::Scenario {
                        line,
                        message: format!("station catalog `{}` does not exist", p.display()),
                    });
                }
                self.stations_catalog = Some(p);
            }
            "time.t0_s" => self.t0_s = num(value)?,
            "time.t1_s" => self.t1_s = Some(num(value)?),
            "time.dt_s" => self.dt_s = num(value)?,
            "coverage.grid_deg" => self.grid_deg = num(value)?,
            "coverage.min_elevation_deg" => self.min_elevation_deg = num(value)?,
            "coverage.band_deg" => self.band_deg = num(value)?,
            "coverage.processing_delay_ms" => self.processing_delay_ms = num(value)?,
            "handover.policy" => {
                self.handover_policy = parse(value, key, line, "max-elevation or min-rtt")?;
            }
            "link.ref_power_w" => self.link.ref_power_w = num(value)?,
            "link.ref_rate_bps" => self.link.ref_rate_bps = num(value)?,
            "link.ref_altitude_km" => self.link.ref_altitude_km = Some(num(value)?),
            "link.target_altitude_km" => self.link.target_altitude_km = num(value)?,
            "link.distance_mode" => self.link.distance_mode = parse(value, key, line, "edge or nadir")?,
            "link.dust_attenuation_db" => self.link.dust_attenuation_db = num(value)?,
            "mass.payload_kg" => self.mass.payload_kg = num(value)?,
            "soft.rate_per_day" => self.soft_error_rate_per_day = num(value)?,
            "soft.days" => self.soft_error_days = num(value)?,
            "apps.earth_rtt_s" => self.apps.earth.rtt_s = num(value)?,
            "apps.earth_bandwidth_bps" => self.apps.earth.bandwidth_bps = num(value)?,
            "apps.orbit_bandwidth_bps" => self.apps.orbit_bandwidth_bps = num(value)?,
            "apps.orbit_rtt_ms" => self.apps.orbit_rtt_ms = Some(num(value)?),
            "apps.payload_bits" => self.apps.payload_bits = num(value)?,
            "apps.uplink_bps" => self.apps.uplink_bps = num(value)?,
            "apps.exec_time_s" => self.apps.exec_time_s = num(value)?,
            "apps.object_bits" => self.apps.object_bits = num(value)?,
            "apps.raw_bps" => self.apps.raw_bps = num(value)?,
            "apps.retention_fraction" => self.apps.retention_fraction = num(value)?,
            "apps.service_time_ms" => self.apps.service_time_ms = num(value)?,
            "output.dir" => {
                let p = PathBuf::from(value);
                self.output_dir = Some(if p.is_relative() { base_dir.join(p) } else { p });
            }
            _ => {
                let component = key
                    .strip_prefix("mass.")
                    .and_then(|k| k.strip_suffix("_kg"))
                    .filter(|k| MASS_KEYS.contains(k));
                let Some(component) = component else {
                    return Err(Error::UnknownKey {
                        line,
                        key: key.to_string(),
                    });
                };
                let mass = num(value)?;
                if let Some(entry) = self.mass.edl_components.iter_mut().find(|(n, _)| n == component) {
                    entry.1 = mass;
                } else {
                    self.mass.edl_components.push((component.to_string(), mass));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.body.validate()?;
        self.walker.validate()?;
        let window = self.coverage_params();
        window.validate()?;
        time_steps(self.t0_s, self.t1(), self.dt_s)?;
        positive("link.ref_power_w", self.link.ref_power_w)?;
        positive("link.ref_rate_bps", self.link.ref_rate_bps)?;
        positive("link.target_altitude_km", self.link.target_altitude_km)?;
        if let Some(h) = self.link.ref_altitude_km {
            positive("link.ref_altitude_km", h)?;
        }
        non_negative("link.dust_attenuation_db", self.link.dust_attenuation_db)?;
        positive("mass.payload_kg", self.mass.payload_kg)?;
        for (_, m) in &self.mass.edl_components {
            non_negative("mass component", *m)?;
        }
        non_negative("soft.rate_per_day", self.soft_error_rate_per_day)?;
        non_negative("soft.days", self.soft_error_days)?;
        self.apps.earth.validate()?;
        positive("apps.orbit_bandwidth_bps", self.apps.orbit_bandwidth_bps)?;
        if let Some(rtt) = self.apps.orbit_rtt_ms {
            positive("apps.orbit_rtt_ms", rtt)?;
        }
        non_negative("apps.payload_bits", self.apps.payload_bits)?;
        positive("apps.uplink_bps", self.apps.uplink_bps)?;
        non_negative("apps.exec_time_s", self.apps.exec_time_s)?;
        non_negative("apps.object_bits", self.apps.object_bits)?;
        non_negative("apps.raw_bps", self.apps.raw_bps)?;
        if !(0.0..=1.0).contains(&self.apps.retention_fraction) {
            return Err(Error::invalid("apps.retention_fraction", "must lie in [0, 1]"));
        }
        non_negative("apps.service_time_ms", self.apps.service_time_ms)
    }

    pub fn constellation(&self) -> Result<Constellation> {
        generate_walker(&self.walker)
    }

    /// End of the simulation window.
    pub fn t1(&self) -> f64 {
        self.t1_s.unwrap_or_else(|| {
            let a = self.body.radius_km + self.walker.altitude_km;
            self.t0_s + crate::astro::period_at_radius(&self.body, a)
        })
    }

    pub fn coverage_params(&self) -> CoverageParams {
        CoverageParams {
            grid_deg: self.grid_deg,
            t0_s: self.t0_s,
            t1_s: self.t1(),
            dt_s: self.dt_s,
            min_elevation_deg: self.min_elevation_deg,
            band_deg: self.band_deg,
            processing_delay_ms: self.processing_delay_ms,
            execution: Default::default(),
        }
    }

    pub fn ref_altitude_km(&self) -> f64 {
        self.link
            .ref_altitude_km
            .unwrap_or_else(|| areostationary_altitude(&self.body))
    }

    /// Effective configuration as ordered `key=value` pairs.
    pub fn effective(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        put("body.radius_km", self.body.radius_km.to_string());
        put("body.gm_km3_s2", self.body.gm_km3_s2.to_string());
        put("body.rotation_period_s", self.body.rotation_period_s.to_string());
        put("walker.planes", self.walker.planes.to_string());
        put("walker.sats_per_plane", self.walker.sats_per_plane.to_string());
        put("walker.altitude_km", self.walker.altitude_km.to_string());
        put("walker.inclination_deg", self.walker.inclination_deg.to_string());
        put("walker.raan_spread_deg", self.walker.raan_spread_deg.to_string());
        put("walker.phasing_offset_deg", self.walker.phasing_offset_deg.to_string());
        put("isl.cross_seam", self.cross_seam.to_string());
        put(
            "stations.catalog",
            self.stations_catalog
                .as_ref()
                .map_or_else(|| "<bundled landing sites>".to_string(), |p| p.display().to_string()),
        );
        put("time.t0_s", self.t0_s.to_string());
        put("time.t1_s", self.t1().to_string());
        put("time.dt_s", self.dt_s.to_string());
        put("coverage.grid_deg", self.grid_deg.to_string());
        put("coverage.min_elevation_deg", self.min_elevation_deg.to_string());
        put("coverage.band_deg", self.band_deg.to_string());
        put("coverage.processing_delay_ms", self.processing_delay_ms.to_string());
        put("handover.policy", self.handover_policy.to_string());
        put("link.ref_power_w", self.link.ref_power_w.to_string());
        put("link.ref_rate_bps", self.link.ref_rate_bps.to_string());
        put("link.ref_altitude_km", self.ref_altitude_km().to_string());
        put("link.target_altitude_km", self.link.target_altitude_km.to_string());
        put("link.distance_mode", self.link.distance_mode.to_string());
        put("link.dust_attenuation_db", self.link.dust_attenuation_db.to_string());
        put("mass.payload_kg", self.mass.payload_kg.to_string());
        for (name, m) in &self.mass.edl_components {
            put(&format!("mass.{name}_kg"), m.to_string());
        }
        put("soft.rate_per_day", self.soft_error_rate_per_day.to_string());
        put("soft.days", self.soft_error_days.to_string());
        put("apps.earth_rtt_s", self.apps.earth.rtt_s.to_string());
        put("apps.earth_bandwidth_bps", self.apps.earth.bandwidth_bps.to_string());
        put("apps.orbit_bandwidth_bps", self.apps.orbit_bandwidth_bps.to_string());
        put(
            "apps.orbit_rtt_ms",
            self.apps
                .orbit_rtt_ms
                .map_or_else(|| "<edge-of-coverage>".to_string(), |v| v.to_string()),
        );
        put("apps.payload_bits", self.apps.payload_bits.to_string());
        put("apps.uplink_bps", self.apps.uplink_bps.to_string());
        put("apps.exec_time_s", self.apps.exec_time_s.to_string());
        put("apps.object_bits", self.apps.object_bits.to_string());
        put("apps.raw_bps", self.apps.raw_bps.to_string());
        put("apps.retention_fraction", self.apps.retention_fraction.to_string());
        put("apps.service_time_ms", self.apps.service_time_ms.to_string());
        out
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_text(text: &str) -> Result<Scenario> {
        parse_scenario_str(text, Path::new("."))
    }

    #[test]
    fn empty_file_gives_defaults() {
        let sc = parse_text("").unwrap();
        assert_eq!(sc, Scenario::default());
        assert_eq!(sc.constellation().unwrap().len(), 81);
        assert_eq!(sc.walker.altitude_km, 1_120.0);
        assert_eq!(sc.min_elevation_deg, 25.0);
        assert_eq!(sc.apps.earth.rtt_s, 360.0);
        assert_eq!(sc.apps.earth.bandwidth_bps, 40_500.0);
    }

    #[test]
    fn single_override() {
        let sc = parse_text("# fewer planes\nwalker.planes=4\n").unwrap();
        assert_eq!(sc.constellation().unwrap().len(), 36);
        assert_eq!(sc.walker.sats_per_plane, 9);
    }

    #[test]
    fn negative_altitude_rejected() {
        let err = parse_text("walker.altitude_km=-5").unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "walker.altitude_km", .. }), "{err}");
    }

    #[test]
    fn unknown_key_named() {
        let err = parse_text("walker.planes=4\nwalker.colour=red\n").unwrap_err();
        match err {
            Error::UnknownKey { line, key } => assert_eq!((line, key.as_str()), (2, "walker.colour")),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn type_mismatch_has_line() {
        let err = parse_text("\n\nwalker.planes=nine\n").unwrap_err();
        assert!(matches!(err, Error::Scenario { line: 3, .. }), "{err}");
        assert!(matches!(parse_text("isl.cross_seam=yes"), Err(Error::Scenario { line: 1, .. })));
        assert!(matches!(parse_text("just text"), Err(Error::Scenario { line: 1, .. })));
    }

    #[test]
    fn mass_components_and_policy() {
        let sc = parse_text("mass.propellant_kg=0\nmass.parachute_kg=80\nhandover.policy=min-rtt\n");
        assert!(matches!(sc, Err(Error::UnknownKey { line: 2, .. })));
        let sc = parse_text("mass.propellant_kg=0\nhandover.policy=min-rtt\n").unwrap();
        assert_eq!(sc.mass.edl_components[3], ("propellant".to_string(), 0.0));
        assert_eq!(sc.handover_policy, HandoverPolicy::MinRtt);
    }

    #[test]
    fn missing_catalog_rejected() {
        assert!(parse_text("stations.catalog=/definitely/not/here.csv").is_err());
    }

    #[test]
    fn default_window_is_one_period() {
        let sc = Scenario::default();
        assert!((sc.t1() - 9_194.0).abs() < 5.0);
        let eff = sc.effective();
        assert!(eff.iter().any(|(k, _)| k == "time.t1_s"));
    }
}
