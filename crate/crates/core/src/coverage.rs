//! Visibility geometry, round-trip times and surface coverage reports.

use crate::astro::{self, BodyParameters, Vec3};
use crate::constellation::{Constellation, GroundStation};
use crate::exec::{map_indices, Execution};
use crate::{Error, Result, SPEED_OF_LIGHT_KM_S};

/// Body-central half-angle of a satellite's coverage cone, degrees.
///
/// `α = arccos(R·cos ε / (R + h)) − ε`
pub fn coverage_half_angle(radius_km: f64, altitude_km: f64, min_elevation_deg: f64) -> f64 {
    let eps = min_elevation_deg.to_radians();
    let ratio = radius_km * eps.cos() / (radius_km + altitude_km);
    (ratio.clamp(-1.0, 1.0).acos() - eps).to_degrees().max(0.0)
}

/// Fewest equally spaced equatorial satellites whose cones of half-angle
/// `half_angle_deg` cover the whole equator.
pub fn min_equatorial_ring(half_angle_deg: f64) -> Result<u32> {
    if !(half_angle_deg > 0.0 && half_angle_deg <= 90.0) {
        return Err(Error::Domain(format!(
            "coverage half-angle must lie in (0, 90], got {half_angle_deg}"
        )));
    }
    Ok((180.0 / half_angle_deg).ceil() as u32)
}

/// Distance from a surface point to a satellite seen at elevation `ε`.
///
/// `d = sqrt((R+h)² − R²cos²ε) − R sin ε`
pub fn slant_range(radius_km: f64, altitude_km: f64, elevation_deg: f64) -> f64 {
    if elevation_deg == 90.0 {
        return altitude_km;
    }
    let (s, c) = elevation_deg.to_radians().sin_cos();
    let a = radius_km + altitude_km;
    (a * a - radius_km * radius_km * c * c).sqrt() - radius_km * s
}

/// Out-and-back light time over `distance_km`, milliseconds.
pub fn rtt_ms(distance_km: f64) -> f64 {
    2_000.0 * distance_km / SPEED_OF_LIGHT_KM_S
}

/// One-way light time over `distance_km`, milliseconds.
pub fn one_way_delay_ms(distance_km: f64) -> f64 {
    1_000.0 * distance_km / SPEED_OF_LIGHT_KM_S
}

/// Elevation of `satellite` above the local horizon of `station`, degrees.
/// Both positions must be in the same frame; the station's zenith is its
/// radial direction.
pub fn elevation(station: Vec3, satellite: Vec3) -> Result<f64> {
    let los = satellite - station;
    let len = los.norm();
    if len == 0.0 || station.norm() == 0.0 {
        return Err(Error::Domain("elevation undefined for coincident positions".into()));
    }
    Ok(90.0 - station.angle_to(los).to_degrees())
}

/// One station/satellite pair at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilitySample {
    pub time_s: f64,
    pub satellite: usize,
    pub elevation_deg: f64,
    pub slant_range_km: f64,
    pub rtt_ms: f64,
}

/// Satellites at or above the station's minimum elevation at time `t`,
/// in constellation order.
pub fn visible_satellites(
    body: &BodyParameters,
    constellation: &Constellation,
    station: &GroundStation,
    t: f64,
) -> Vec<VisibilitySample> {
    let ground = astro::ground_point_position(body, station.lat_deg, station.lon_deg, t);
    constellation
        .satellites()
        .iter()
        .enumerate()
        .filter_map(|(i, sat)| {
            let pos = astro::propagate(body, &sat.orbit, t);
            let el = elevation(ground, pos).ok()?;
            (el >= station.min_elevation_deg).then(|| {
                let d = ground.distance(pos);
                VisibilitySample {
                    time_s: t,
                    satellite: i,
                    elevation_deg: el,
                    slant_range_km: d,
                    rtt_ms: rtt_ms(d),
                }
            })
        })
        .collect()
}

/// Sample times `t0, t0+dt, …` strictly before `t1`.
pub fn time_steps(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::invalid("time window", format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
    }
    let mut n = ((t1 - t0) / dt).ceil() as usize;
    while n > 1 && t0 + (n - 1) as f64 * dt >= t1 {
        n -= 1;
    }
    Ok((0..n.max(1)).map(|k| t0 + k as f64 * dt).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageParams {
    pub grid_deg: f64,
    pub t0_s: f64,
    pub t1_s: f64,
    pub dt_s: f64,
    pub min_elevation_deg: f64,
    /// Width of the latitude bands in the per-band breakdown.
    pub band_deg: f64,
    /// Added to every ground-to-satellite RTT.
    pub processing_delay_ms: f64,
    pub execution: Execution,
}

impl CoverageParams {
    /// Defaults: 2° grid, 10 s step, 25° elevation, 10° bands, window `[0, window_s)`.
    pub fn with_window(window_s: f64) -> Self {
        Self {
            grid_deg: 2.0,
            t0_s: 0.0,
            t1_s: window_s,
            dt_s: 10.0,
            min_elevation_deg: 25.0,
            band_deg: 10.0,
            processing_delay_ms: 0.0,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grid_deg > 0.0 && self.grid_deg <= 30.0) {
            return Err(Error::invalid("grid_deg", format!("must lie in (0, 30], got {}", self.grid_deg)));
        }
        if !(0.0..90.0).contains(&self.min_elevation_deg) {
            return Err(Error::invalid("min_elevation_deg", "must lie in [0, 90)"));
        }
        if !(self.band_deg > 0.0 && self.band_deg <= 180.0) {
            return Err(Error::invalid("band_deg", "must lie in (0, 180]"));
        }
        if !(self.processing_delay_ms >= 0.0 && self.processing_delay_ms.is_finite()) {
            return Err(Error::invalid("processing_delay_ms", "must be >= 0"));
        }
        time_steps(self.t0_s, self.t1_s, self.dt_s).map(|_| ())
    }
}

/// Cell-centred lat/lon lattice. The requested spacing is shrunk so that it
/// divides 180° and 360° evenly.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub lats: Vec<f64>,
    pub lons: Vec<f64>,
}

impl SurfaceGrid {
    pub fn new(grid_deg: f64) -> Self {
        let rows = (180.0 / grid_deg - 1e-9).ceil().max(1.0) as usize;
        let cols = (360.0 / grid_deg - 1e-9).ceil().max(1.0) as usize;
        let dlat = 180.0 / rows as f64;
        let dlon = 360.0 / cols as f64;
        Self {
            lats: (0..rows).map(|i| -90.0 + (i as f64 + 0.5) * dlat).collect(),
            lons: (0..cols).map(|j| -180.0 + (j as f64 + 0.5) * dlon).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.lats.len() * self.lons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(lat, lon)` of point `i`, row-major by latitude.
    pub fn point(&self, i: usize) -> (f64, f64) {
        let cols = self.lons.len();
        (self.lats[i / cols], self.lons[i % cols])
    }
}

/// Satellite state reduced to what the visibility kernel needs.
#[derive(Debug, Clone, Copy)]
struct SatState {
    unit: Vec3,
    radius: f64,
    cos_half_angle: f64,
}

/// Body-fixed satellite states for every time step, flattened step-major.
struct Ephemeris {
    sats: usize,
    states: Vec<SatState>,
}

impl Ephemeris {
    fn new(body: &BodyParameters, constellation: &Constellation, times: &[f64], min_elevation_deg: f64) -> Self {
        let cones: Vec<f64> = constellation
            .satellites()
            .iter()
            .map(|s| {
                coverage_half_angle(body.radius_km, s.orbit.altitude_km(), min_elevation_deg)
                    .to_radians()
                    .cos()
            })
            .collect();
        let mut states = Vec::with_capacity(times.len() * cones.len());
        for &t in times {
            for (sat, &cos_half_angle) in constellation.satellites().iter().zip(&cones) {
                let p = astro::body_fixed_from_inertial(body, astro::propagate(body, &sat.orbit, t), t);
                states.push(SatState {
                    unit: p.unit(),
                    radius: p.norm(),
                    cos_half_angle,
                });
            }
        }
        Self {
            sats: cones.len(),
            states,
        }
    }

    fn step(&self, k: usize) -> &[SatState] {
        &self.states[k * self.sats..(k + 1) * self.sats]
    }

    /// Shortest slant range (km) from the surface point `unit·R` to any
    /// satellite inside its coverage cone at step `k`.
    fn nearest_visible(&self, k: usize, unit: Vec3, radius: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        for s in self.step(k) {
            let cos_gamma = unit.dot(s.unit);
            if cos_gamma >= s.cos_half_angle {
                let d2 = radius * radius + s.radius * s.radius - 2.0 * radius * s.radius * cos_gamma;
                best = Some(best.map_or(d2, |b| b.min(d2)));
            }
        }
        best.map(|d2| d2.max(0.0).sqrt())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct PointStats {
    covered: usize,
    rtt_sum: f64,
    rtt_max: f64,
    longest_gap: usize,
}

/// Coverage of one latitude band.
#[derive(Debug, Clone, PartialEq)]
pub struct BandCoverage {
    pub lat_min_deg: f64,
    pub lat_max_deg: f64,
    pub covered_fraction: f64,
    pub max_rtt_ms: f64,
    pub mean_rtt_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub grid_deg: f64,
    pub t0_s: f64,
    pub t1_s: f64,
    pub dt_s: f64,
    pub steps: usize,
    pub grid_points: usize,
    /// Area-weighted fraction of point×step samples with a visible satellite.
    pub covered_fraction: f64,
    /// Largest RTT to the nearest visible satellite; 0 when nothing is covered.
    pub max_rtt_ms: f64,
    /// Area-weighted mean RTT over covered samples; 0 when nothing is covered.
    pub mean_rtt_ms: f64,
    /// Longest run of consecutive uncovered steps at any grid point, seconds.
    pub max_gap_s: f64,
    /// Grid points with no coverage at any step.
    pub never_covered_points: usize,
    pub bands: Vec<BandCoverage>,
}

/// Sweeps a lat/lon grid over a time window and aggregates visibility.
///
/// Grid points are area-weighted by `cos(lat)`. Per-point statistics are
/// computed independently (in parallel when requested) and reduced in grid
/// order, so the result does not depend on scheduling.
pub fn coverage_report(
    constellation: &Constellation,
    body: &BodyParameters,
    params: &CoverageParams,
) -> Result<CoverageReport> {
    params.validate()?;
    body.validate()?;
    let times = time_steps(params.t0_s, params.t1_s, params.dt_s)?;
    let grid = SurfaceGrid::new(params.grid_deg);
    let eph = Ephemeris::new(body, constellation, &times, params.min_elevation_deg);
    let radius = body.radius_km;

    let stats = map_indices(params.execution, grid.len(), |i| {
        let (lat, lon) = grid.point(i);
        let unit = astro::surface_point(body, lat, lon).unit();
        let mut st = PointStats::default();
        let mut gap = 0;
        for k in 0..times.len() {
            match eph.nearest_visible(k, unit, radius) {
                Some(d) => {
                    let rtt = rtt_ms(d) + params.processing_delay_ms;
                    st.covered += 1;
                    st.rtt_sum += rtt;
                    st.rtt_max = st.rtt_max.max(rtt);
                    gap = 0;
                }
                None => {
                    gap += 1;
                    st.longest_gap = st.longest_gap.max(gap);
                }
            }
        }
        st
    });

    let n_steps = times.len() as f64;
    let band_count = (180.0 / params.band_deg).ceil() as usize;
    let band_of = |lat: f64| (((lat + 90.0) / params.band_deg) as usize).min(band_count - 1);

    #[derive(Default, Clone, Copy)]
    struct Acc {
        weight: f64,
        covered: f64,
        rtt: f64,
        rtt_max: f64,
    }
    let mut total = Acc::default();
    let mut bands = vec![Acc::default(); band_count];
    let mut longest_gap = 0;
    let mut never = 0;
    for (i, st) in stats.iter().enumerate() {
        let (lat, _) = grid.point(i);
        let w = lat.to_radians().cos();
        for acc in [&mut total, &mut bands[band_of(lat)]] {
            acc.weight += w * n_steps;
            acc.covered += w * st.covered as f64;
            acc.rtt += w * st.rtt_sum;
            acc.rtt_max = acc.rtt_max.max(st.rtt_max);
        }
        longest_gap = longest_gap.max(st.longest_gap);
        if st.covered == 0 {
            never += 1;
        }
    }
    let fraction = |a: &Acc| if a.weight > 0.0 { (a.covered / a.weight).clamp(0.0, 1.0) } else { 0.0 };
    let mean = |a: &Acc| if a.covered > 0.0 { (a.rtt / a.covered).min(a.rtt_max) } else { 0.0 };

    Ok(CoverageReport {
        grid_deg: params.grid_deg,
        t0_s: params.t0_s,
        t1_s: params.t1_s,
        dt_s: params.dt_s,
        steps: times.len(),
        grid_points: grid.len(),
        covered_fraction: fraction(&total),
        max_rtt_ms: total.rtt_max,
        mean_rtt_ms: mean(&total),
        max_gap_s: longest_gap as f64 * params.dt_s,
        never_covered_points: never,
        bands: bands
            .iter()
            .enumerate()
            .map(|(b, acc)| BandCoverage {
                lat_min_deg: -90.0 + b as f64 * params.band_deg,
                lat_max_deg: (-90.0 + (b + 1) as f64 * params.band_deg).min(90.0),
                covered_fraction: fraction(acc),
                max_rtt_ms: acc.rtt_max,
                mean_rtt_ms: mean(acc),
            })
            .collect(),
    })
}

/// Coverage of one grid point at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCoverage {
    pub lat_deg: f64,
    pub lon_deg: f64,
    /// RTT to the nearest visible satellite, `None` when uncovered.
    pub rtt_ms: Option<f64>,
}

/// Per-point coverage map at time `t`.
pub fn coverage_map(
    constellation: &Constellation,
    body: &BodyParameters,
    grid_deg: f64,
    t: f64,
    min_elevation_deg: f64,
    execution: Execution,
) -> Vec<PointCoverage> {
    let grid = SurfaceGrid::new(grid_deg);
    let eph = Ephemeris::new(body, constellation, &[t], min_elevation_deg);
    map_indices(execution, grid.len(), |i| {
        let (lat, lon) = grid.point(i);
        let unit = astro::surface_point(body, lat, lon).unit();
        PointCoverage {
            lat_deg: lat,
            lon_deg: lon,
            rtt_ms: eph.nearest_visible(0, unit, body.radius_km).map(rtt_ms),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astro::{areostationary_altitude, MARS_RADIUS_KM};
    use crate::constellation::{generate_walker, WalkerConfig};
    use proptest::prelude::*;

    const R: f64 = MARS_RADIUS_KM;

    /// Central-angle half-angle solved by bisection on the elevation of a
    /// satellite placed at central angle γ; independent of the closed form.
    fn half_angle_by_bisection(h: f64, eps: f64) -> f64 {
        let elev_at = |gamma_deg: f64| {
            let station = Vec3::new(R, 0.0, 0.0);
            let g = gamma_deg.to_radians();
            let sat = Vec3::new(g.cos(), g.sin(), 0.0) * (R + h);
            elevation(station, sat).unwrap()
        };
        let (mut lo, mut hi) = (0.0, 90.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if elev_at(mid) >= eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn half_angle_examples() {
        let h_areo = areostationary_altitude(&BodyParameters::mars());
        assert!((coverage_half_angle(R, h_areo, 25.0) - 56.3).abs() < 0.1);
        assert_eq!(coverage_half_angle(R, 1_120.0, 90.0), 0.0);
        let leo = coverage_half_angle(R, 1_120.0, 25.0);
        assert!((leo - 22.05).abs() < 0.05, "{leo}");
        assert!((leo - half_angle_by_bisection(1_120.0, 25.0)).abs() < 1e-9);
        assert!((coverage_half_angle(R, h_areo, 25.0) - half_angle_by_bisection(h_areo, 25.0)).abs() < 1e-9);
    }

    #[test]
    fn ring_examples() {
        assert_eq!(min_equatorial_ring(56.35).unwrap(), 4);
        assert_eq!(min_equatorial_ring(90.0).unwrap(), 2);
        assert_eq!(min_equatorial_ring(22.05).unwrap(), 9);
        assert!(min_equatorial_ring(0.0).is_err());
        assert!(min_equatorial_ring(-3.0).is_err());
    }

    #[test]
    fn slant_and_rtt_examples() {
        let h_areo = areostationary_altitude(&BodyParameters::mars());
        let d_areo = slant_range(R, h_areo, 25.0);
        assert!((d_areo - 18_763.0).abs() < 20.0, "{d_areo}");
        assert_eq!(slant_range(R, 1_120.0, 90.0), 1_120.0);
        let d_leo = slant_range(R, 1_120.0, 25.0);
        assert!((d_leo - 1_869.0).abs() < 2.0, "{d_leo}");
        assert!((rtt_ms(18_763.0) - 125.2).abs() < 0.5);
        assert_eq!(rtt_ms(0.0), 0.0);
        assert!((rtt_ms(1_869.0) - 12.47).abs() < 0.05);
        let d_1000 = slant_range(R, 1_000.0, 25.0);
        assert!((d_1000 - 1_703.0).abs() < 2.0, "{d_1000}");
        assert!((rtt_ms(d_1000) - 11.4).abs() < 0.1);
    }

    #[test]
    fn elevation_examples() {
        let station = Vec3::new(R, 0.0, 0.0);
        assert!((elevation(station, Vec3::new(R + 1_120.0, 0.0, 0.0)).unwrap() - 90.0).abs() < 1e-12);
        assert!(elevation(station, Vec3::new(-(R + 1_120.0), 0.0, 0.0)).unwrap() < 0.0);
        assert!(elevation(station, station).is_err());

        // place the satellite at the central angle where the slant range is 1,869 km
        let a = R + 1_120.0;
        let d = 1_869.0;
        let gamma = ((R * R + a * a - d * d) / (2.0 * R * a)).acos();
        let sat = Vec3::new(gamma.cos(), gamma.sin(), 0.0) * a;
        assert!((elevation(station, sat).unwrap() - 25.0).abs() < 0.05);
    }

    #[test]
    fn time_steps_are_half_open() {
        assert_eq!(time_steps(0.0, 30.0, 10.0).unwrap(), vec![0.0, 10.0, 20.0]);
        assert_eq!(time_steps(0.0, 31.0, 10.0).unwrap().len(), 4);
        assert_eq!(time_steps(5.0, 6.0, 10.0).unwrap(), vec![5.0]);
        assert!(time_steps(1.0, 1.0, 1.0).is_err());
        assert!(time_steps(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn empty_constellation_covers_nothing() {
        let params = CoverageParams { grid_deg: 10.0, ..CoverageParams::with_window(100.0) };
        let r = coverage_report(&Constellation::empty(), &BodyParameters::mars(), &params).unwrap();
        assert_eq!(r.covered_fraction, 0.0);
        assert_eq!(r.max_rtt_ms, 0.0);
        assert_eq!(r.never_covered_points, r.grid_points);
    }

    #[test]
    fn invalid_params_rejected() {
        let c = Constellation::empty();
        let body = BodyParameters::mars();
        for p in [
            CoverageParams { grid_deg: 0.0, ..CoverageParams::with_window(10.0) },
            CoverageParams { grid_deg: 31.0, ..CoverageParams::with_window(10.0) },
            CoverageParams { dt_s: -1.0, ..CoverageParams::with_window(10.0) },
            CoverageParams::with_window(0.0),
        ] {
            assert!(coverage_report(&c, &body, &p).is_err());
        }
    }

    #[test]
    fn grid_is_area_consistent() {
        let g = SurfaceGrid::new(2.0);
        assert_eq!(g.lats.len(), 90);
        assert_eq!(g.lons.len(), 180);
        assert_eq!(g.point(0), (-89.0, -179.0));
        let g = SurfaceGrid::new(7.0);
        assert_eq!(g.lats.len(), 26);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let c = generate_walker(&WalkerConfig::default()).unwrap();
        let body = BodyParameters::mars();
        let mut p = CoverageParams { grid_deg: 6.0, ..CoverageParams::with_window(600.0) };
        p.execution = Execution::Sequential;
        let a = coverage_report(&c, &body, &p).unwrap();
        p.execution = Execution::Parallel;
        let b = coverage_report(&c, &body, &p).unwrap();
        assert_eq!(a, b);
        assert!(a.max_rtt_ms >= a.mean_rtt_ms && a.mean_rtt_ms >= 0.0);
    }

    proptest! {
        #[test]
        fn half_angle_monotone(h in 100.0..30_000.0f64, eps in 0.0..85.0f64, dh in 1.0..1_000.0f64, de in 0.5..4.0f64) {
            prop_assert!(coverage_half_angle(R, h, eps + de) < coverage_half_angle(R, h, eps));
            prop_assert!(coverage_half_angle(R, h + dh, eps) > coverage_half_angle(R, h, eps));
        }

        #[test]
        fn slant_range_decreasing(h in 100.0..30_000.0f64, eps in 0.0..89.0f64, de in 0.1..1.0f64) {
            prop_assert!(slant_range(R, h, eps + de) < slant_range(R, h, eps));
        }

        #[test]
        fn slant_range_inverts_elevation(h in 200.0..30_000.0f64, eps in 0.0..89.5f64) {
            let a = R + h;
            let d = slant_range(R, h, eps);
            let gamma = ((R * R + a * a - d * d) / (2.0 * R * a)).clamp(-1.0, 1.0).acos();
            let sat = Vec3::new(gamma.cos(), gamma.sin(), 0.0) * a;
            let el = elevation(Vec3::new(R, 0.0, 0.0), sat).unwrap();
            prop_assert!((el - eps).abs() < 0.05, "{el} vs {eps}");
        }

        #[test]
        fn elevation_and_central_angle_agree(h in 300.0..20_000.0f64, eps in 0.0..80.0f64,
                                             gamma in 0.0..120.0f64, lat in -80.0..80.0f64, lon in -180.0..180.0f64) {
            let alpha = coverage_half_angle(R, h, eps);
            // skip a thin shell around the boundary where rounding decides
            prop_assume!((gamma - alpha).abs() > 1e-6);
            let body = BodyParameters::mars();
            let station = astro::surface_point(&body, lat, lon);
            // rotate the station direction by gamma about an axis perpendicular to it
            let u = station.unit();
            let perp = u.cross(Vec3::new(0.0, 0.0, 1.0)).unit();
            let g = gamma.to_radians();
            let sat_dir = u * g.cos() + perp.cross(u) * g.sin();
            let sat = sat_dir * (R + h);
            let visible = elevation(station, sat).unwrap() >= eps;
            prop_assert_eq!(visible, gamma <= alpha);
        }
    }
}
