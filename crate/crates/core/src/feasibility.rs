//! Transmit-power scaling, dust attenuation, soft-error expectation and
//! landing-mass overhead.

use std::fmt;
use std::str::FromStr;

use crate::astro::positive;
use crate::coverage::slant_range;
use crate::{Error, Result};

/// A link known to close at `power_w` over `distance_km` for `data_rate_bps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkReference {
    pub power_w: f64,
    pub data_rate_bps: f64,
    pub distance_km: f64,
}

impl LinkReference {
    pub fn new(power_w: f64, data_rate_bps: f64, distance_km: f64) -> Result<Self> {
        positive("power_w", power_w)?;
        positive("data_rate_bps", data_rate_bps)?;
        positive("distance_km", distance_km)?;
        Ok(Self {
            power_w,
            data_rate_bps,
            distance_km,
        })
    }
}

/// Which ground-to-orbit distance stands for an orbit altitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Slant range at the minimum elevation (worst case).
    #[default]
    EdgeOfCoverage,
    /// Straight up: the altitude itself.
    Nadir,
}

impl DistanceMode {
    pub fn distance_km(&self, radius_km: f64, altitude_km: f64, min_elevation_deg: f64) -> f64 {
        match self {
            Self::EdgeOfCoverage => slant_range(radius_km, altitude_km, min_elevation_deg),
            Self::Nadir => altitude_km,
        }
    }
}

impl FromStr for DistanceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(Self::EdgeOfCoverage),
            "nadir" => Ok(Self::Nadir),
            other => Err(Error::invalid("distance mode", format!("`{other}` is not one of edge, nadir"))),
        }
    }
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EdgeOfCoverage => "edge",
            Self::Nadir => "nadir",
        })
    }
}

/// Power needed at `new_distance_km` for the same rate and margin
/// (free-space inverse-square law).
pub fn scale_power(reference: &LinkReference, new_distance_km: f64) -> f64 {
    let ratio = new_distance_km / reference.distance_km;
    reference.power_w * ratio * ratio
}

/// Received-power factor for an attenuation in dB, `10^(−dB/10)`.
pub fn attenuation_factor(attenuation_db: f64) -> f64 {
    10f64.powf(-attenuation_db / 10.0)
}

/// Mean number of soft errors (Poisson mean).
pub fn expected_soft_errors(rate_per_processor_day: f64, processors: f64, days: f64) -> f64 {
    rate_per_processor_day * processors * days
}

/// Landed payload plus the named entry, descent and landing components.
#[derive(Debug, Clone, PartialEq)]
pub struct MassBudget {
    pub payload_kg: f64,
    pub edl_components: Vec<(String, f64)>,
}

impl MassBudget {
    /// Mars 2020: 1,025 kg rover; 575 kg backshell, 440 kg heat shield,
    /// 670 kg descent stage, 400 kg propellant.
    pub fn mars_2020() -> Self {
        Self {
            payload_kg: 1_025.0,
            edl_components: vec![
                ("backshell".into(), 575.0),
                ("heat_shield".into(), 440.0),
                ("descent_stage".into(), 670.0),
                ("propellant".into(), 400.0),
            ],
        }
    }
}

/// `(edl_total_kg, edl_total / payload)`.
pub fn mass_overhead(budget: &MassBudget) -> Result<(f64, f64)> {
    if !(budget.payload_kg > 0.0 && budget.payload_kg.is_finite()) {
        return Err(Error::Domain(format!(
            "payload mass must be > 0 for an overhead ratio, got {}",
            budget.payload_kg
        )));
    }
    if let Some((name, m)) = budget.edl_components.iter().find(|(_, m)| m.is_nan() || *m < 0.0) {
        return Err(Error::Domain(format!("EDL component `{name}` has negative mass {m}")));
    }
    let total: f64 = budget.edl_components.iter().map(|(_, m)| m).sum();
    Ok((total, total / budget.payload_kg))
}
