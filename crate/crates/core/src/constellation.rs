//! Walker constellations and ground-station catalogs.

use std::collections::BTreeSet;
use std::io::Read;

use crate::astro::{normalize_deg, positive, BodyParameters, CircularOrbit};
use crate::{Error, Result};

/// Minimum elevation applied to catalog rows that leave it blank.
pub const DEFAULT_MIN_ELEVATION_DEG: f64 = 25.0;

/// Exact header line of a ground-station catalog.
pub const CATALOG_HEADER: [&str; 4] = ["name", "lat_deg", "lon_deg", "min_elevation_deg"];

/// Landing-site catalog shipped with the crate.
pub const DEFAULT_CATALOG: &str = include_str!("../data/landing_sites.csv");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkerConfig {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    /// 180° for a Walker Star, 360° for a Walker Delta.
    pub raan_spread_deg: f64,
    /// Phase added per plane, applied cumulatively.
    pub phasing_offset_deg: f64,
}

impl Default for WalkerConfig {
    /// Nine polar planes of nine satellites at 1,120 km, Star pattern.
    fn default() -> Self {
        Self {
            planes: 9,
            sats_per_plane: 9,
            altitude_km: 1_120.0,
            inclination_deg: 90.0,
            raan_spread_deg: 180.0,
            phasing_offset_deg: 0.0,
        }
    }
}

impl WalkerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.planes == 0 {
            return Err(Error::invalid("walker.planes", "must be >= 1"));
        }
        if self.sats_per_plane == 0 {
            return Err(Error::invalid("walker.sats_per_plane", "must be >= 1"));
        }
        positive("walker.altitude_km", self.altitude_km)?;
        if !(0.0..=180.0).contains(&self.inclination_deg) {
            return Err(Error::invalid("walker.inclination_deg", "must lie in [0, 180]"));
        }
        if !self.raan_spread_deg.is_finite() || !self.phasing_offset_deg.is_finite() {
            return Err(Error::invalid("walker angles", "must be finite"));
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.planes * self.sats_per_plane
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Satellite {
    pub plane: usize,
    pub slot: usize,
    pub orbit: CircularOrbit,
}

impl Satellite {
    /// Short label used in reports, e.g. `P3S4`.
    pub fn label(&self) -> String {
        format!("P{}S{}", self.plane, self.slot)
    }
}

/// Satellites ordered by `(plane, slot)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Constellation {
    satellites: Vec<Satellite>,
}

impl Constellation {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a constellation from explicit satellites, sorting by `(plane, slot)`.
    pub fn from_satellites(mut satellites: Vec<Satellite>) -> Self {
        satellites.sort_by_key(|s| (s.plane, s.slot));
        Self { satellites }
    }

    pub fn satellites(&self) -> &[Satellite] {
        &self.satellites
    }

    pub fn len(&self) -> usize {
        self.satellites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.satellites.is_empty()
    }

    /// Same constellation with every ascending node shifted by `delta_deg`.
    pub fn rotated(&self, delta_deg: f64) -> Self {
        Self {
            satellites: self
                .satellites
                .iter()
                .map(|s| Satellite {
                    orbit: s.orbit.with_raan_offset(delta_deg),
                    ..*s
                })
                .collect(),
        }
    }

    /// Highest orbit period among the satellites, or `None` when empty.
    pub fn max_period(&self, body: &BodyParameters) -> Option<f64> {
        self.satellites
            .iter()
            .map(|s| crate::astro::orbital_period(body, &s.orbit))
            .reduce(f64::max)
    }
}

/// Plane `p` gets RAAN `p·spread/P`; slot `s` gets phase `s·360/S + p·offset`.
pub fn generate_walker(config: &WalkerConfig) -> Result<Constellation> {
    config.validate()?;
    let p_count = config.planes as f64;
    let s_count = config.sats_per_plane as f64;
    let mut satellites = Vec::with_capacity(config.total());
    for plane in 0..config.planes {
        let raan = plane as f64 * config.raan_spread_deg / p_count;
        for slot in 0..config.sats_per_plane {
            let phase = normalize_deg(slot as f64 * 360.0 / s_count + plane as f64 * config.phasing_offset_deg);
            let orbit = CircularOrbit::new(config.altitude_km, config.inclination_deg, raan, phase)?;
            satellites.push(Satellite { plane, slot, orbit });
        }
    }
    Ok(Constellation { satellites })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStation {
    pub name: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub min_elevation_deg: f64,
}

impl GroundStation {
    pub fn new(name: impl Into<String>, lat_deg: f64, lon_deg: f64, min_elevation_deg: f64) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::invalid("station name", "must not be empty"));
        }
        if !(-90.0..=90.0).contains(&lat_deg) {
            return Err(Error::invalid("lat_deg", format!("{lat_deg} outside [-90, 90]")));
        }
        if !(-180.0..180.0).contains(&lon_deg) {
            return Err(Error::invalid("lon_deg", format!("{lon_deg} outside [-180, 180)")));
        }
        if !(0.0..90.0).contains(&min_elevation_deg) {
            return Err(Error::invalid(
                "min_elevation_deg",
                format!("{min_elevation_deg} outside [0, 90)"),
            ));
        }
        Ok(Self {
            name,
            lat_deg,
            lon_deg,
            min_elevation_deg,
        })
    }
}

/// Parses a `name,lat_deg,lon_deg,min_elevation_deg` catalog.
///
/// The last column may be empty or missing. Lines starting with `#` are skipped.
pub fn load_ground_stations<R: Read>(catalog: R) -> Result<Vec<GroundStation>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(catalog);

    let header = reader.headers().map_err(|e| csv_error(&e, 1))?.clone();
    if header.iter().collect::<Vec<_>>() != CATALOG_HEADER {
        let line = header.position().map_or(1, |p| p.line());
        return Err(Error::Catalog {
            line,
            message: format!("header must be `{}`", CATALOG_HEADER.join(",")),
        });
    }

    let mut stations = Vec::new();
    let mut names = BTreeSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |message: String| Error::Catalog { line, message };
        if !(3..=4).contains(&record.len()) {
            return Err(fail(format!("expected 3 or 4 fields, found {}", record.len())));
        }
        let number = |idx: usize, what: &str| -> Result<f64> {
            record[idx]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| fail(format!("{what} `{}` is not a number", &record[idx])))
        };
        let lat = number(1, "lat_deg")?;
        let lon = number(2, "lon_deg")?;
        let min_el = match record.get(3) {
            Some(s) if !s.is_empty() => number(3, "min_elevation_deg")?,
            _ => DEFAULT_MIN_ELEVATION_DEG,
        };
        let station = GroundStation::new(&record[0], lat, lon, min_el).map_err(|e| fail(e.to_string()))?;
        if !names.insert(station.name.clone()) {
            return Err(fail(format!("duplicate station name `{}`", station.name)));
        }
        stations.push(station);
    }
    Ok(stations)
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> Error {
    Error::Catalog {
        line: e.position().map_or(fallback_line, |p| p.line()),
        message: e.to_string(),
    }
}

pub fn default_ground_stations() -> Vec<GroundStation> {
    load_ground_stations(DEFAULT_CATALOG.as_bytes()).expect("bundled catalog is valid")
}
