//! Body constants, circular two-body propagation and reference frames.
//!
//! Two frames are used throughout: a body-centered inertial frame and a
//! body-fixed frame rotating about +z. They coincide at `t = 0`; all orbit
//! phases are defined at that epoch.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Mean radius of Mars, km.
pub const MARS_RADIUS_KM: f64 = 3_389.5;
/// Gravitational parameter of Mars, km³/s².
pub const MARS_GM_KM3_S2: f64 = 42_828.37;
/// Sidereal rotation period of Mars, s (24.6229 h).
pub const MARS_ROTATION_PERIOD_S: f64 = 88_642.44;
/// Average interval between planet-encircling dust storms, Earth years.
/// Annotation only; storms are modelled as a static attenuation.
pub const GLOBAL_DUST_STORM_INTERVAL_YEARS: f64 = 5.5;

/// Physical constants of a spherical central body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyParameters {
    pub radius_km: f64,
    pub gm_km3_s2: f64,
    pub rotation_period_s: f64,
}

impl BodyParameters {
    pub fn new(radius_km: f64, gm_km3_s2: f64, rotation_period_s: f64) -> Result<Self> {
        let body = Self {
            radius_km,
            gm_km3_s2,
            rotation_period_s,
        };
        body.validate()?;
        Ok(body)
    }

    pub fn mars() -> Self {
        Self {
            radius_km: MARS_RADIUS_KM,
            gm_km3_s2: MARS_GM_KM3_S2,
            rotation_period_s: MARS_ROTATION_PERIOD_S,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("body.radius_km", self.radius_km)?;
        positive("body.gm_km3_s2", self.gm_km3_s2)?;
        positive("body.rotation_period_s", self.rotation_period_s)
    }

    /// Rotation rate in rad/s.
    pub fn rotation_rate(&self) -> f64 {
        2.0 * PI / self.rotation_period_s
    }
}

impl Default for BodyParameters {
    fn default() -> Self {
        Self::mars()
    }
}

pub(crate) fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

/// Wraps an angle in degrees into `[0, 360)`.
pub fn normalize_deg(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Wraps a longitude in degrees into `[-180, 180)`.
pub fn wrap_longitude(deg: f64) -> f64 {
    normalize_deg(deg + 180.0) - 180.0
}

/// One satellite's circular orbit. Angles are stored normalized to `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularOrbit {
    altitude_km: f64,
    inclination_deg: f64,
    raan_deg: f64,
    phase_deg: f64,
}

impl CircularOrbit {
    pub fn new(altitude_km: f64, inclination_deg: f64, raan_deg: f64, phase_deg: f64) -> Result<Self> {
        positive("altitude_km", altitude_km)?;
        if !(0.0..=180.0).contains(&inclination_deg) {
            return Err(Error::invalid(
                "inclination_deg",
                format!("must lie in [0, 180], got {inclination_deg}"),
            ));
        }
        if !raan_deg.is_finite() || !phase_deg.is_finite() {
            return Err(Error::invalid("orbit angles", "must be finite"));
        }
        Ok(Self {
            altitude_km,
            inclination_deg,
            raan_deg: normalize_deg(raan_deg),
            phase_deg: normalize_deg(phase_deg),
        })
    }

    pub fn altitude_km(&self) -> f64 {
        self.altitude_km
    }
    pub fn inclination_deg(&self) -> f64 {
        self.inclination_deg
    }
    pub fn raan_deg(&self) -> f64 {
        self.raan_deg
    }
    pub fn phase_deg(&self) -> f64 {
        self.phase_deg
    }

    /// Orbital radius `R + h`.
    pub fn radius_km(&self, body: &BodyParameters) -> f64 {
        body.radius_km + self.altitude_km
    }

    /// Same orbit with the ascending node shifted by `delta_deg`.
    pub fn with_raan_offset(&self, delta_deg: f64) -> Self {
        Self {
            raan_deg: normalize_deg(self.raan_deg + delta_deg),
            ..*self
        }
    }
}

/// Cartesian vector in km. Used for both inertial and body-fixed positions;
/// the frame is given by context.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn unit(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    /// Rotation about +z by `angle` radians.
    pub fn rotate_z(self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        Vec3::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }

    /// Rotation about +x by `angle` radians.
    pub fn rotate_x(self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        Vec3::new(self.x, c * self.y - s * self.z, s * self.y + c * self.z)
    }

    /// Angle between two nonzero vectors, radians. Stable near 0 and π.
    pub fn angle_to(self, o: Vec3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Radius of the body-synchronous circular orbit, `(gm·T²/4π²)^(1/3)`.
pub fn synchronous_radius(body: &BodyParameters) -> f64 {
    let t = body.rotation_period_s;
    (body.gm_km3_s2 * t * t / (4.0 * PI * PI)).cbrt()
}

/// Altitude of the equatorial synchronous (areostationary) orbit.
pub fn areostationary_altitude(body: &BodyParameters) -> f64 {
    synchronous_radius(body) - body.radius_km
}

/// Period of a circular orbit at radius `radius_km`.
pub fn period_at_radius(body: &BodyParameters, radius_km: f64) -> f64 {
    2.0 * PI * (radius_km.powi(3) / body.gm_km3_s2).sqrt()
}

pub fn orbital_period(body: &BodyParameters, orbit: &CircularOrbit) -> f64 {
    period_at_radius(body, orbit.radius_km(body))
}

/// Inertial position at time `t` (seconds from epoch).
///
/// `Rz(raan)·Rx(inc)·(a cos θ, a sin θ, 0)` with `θ = phase + 2π·t/period`.
pub fn propagate(body: &BodyParameters, orbit: &CircularOrbit, t: f64) -> Vec3 {
    let a = orbit.radius_km(body);
    let revs = (t / orbital_period(body, orbit)).rem_euclid(1.0);
    let theta = orbit.phase_deg.to_radians() + 2.0 * PI * revs;
    let (s, c) = theta.sin_cos();
    Vec3::new(a * c, a * s, 0.0)
        .rotate_x(orbit.inclination_deg.to_radians())
        .rotate_z(orbit.raan_deg.to_radians())
}

fn rotation_angle(body: &BodyParameters, t: f64) -> f64 {
    2.0 * PI * (t / body.rotation_period_s).rem_euclid(1.0)
}

/// Rotates an inertial vector into the body-fixed frame at time `t`.
pub fn body_fixed_from_inertial(body: &BodyParameters, p: Vec3, t: f64) -> Vec3 {
    p.rotate_z(-rotation_angle(body, t))
}

pub fn inertial_from_body_fixed(body: &BodyParameters, p: Vec3, t: f64) -> Vec3 {
    p.rotate_z(rotation_angle(body, t))
}

/// Geocentric (areocentric) latitude and longitude of a body-fixed vector,
/// degrees. Longitude is in `[-180, 180)` and is 0 at the poles.
pub fn latlon_from_body_fixed(p: Vec3) -> (f64, f64) {
    let horizontal = p.x.hypot(p.y);
    let lat = p.z.atan2(horizontal).to_degrees();
    if horizontal == 0.0 {
        return (lat, 0.0);
    }
    (lat, wrap_longitude(p.y.atan2(p.x).to_degrees()))
}

/// Body-fixed position of a surface point.
pub fn surface_point(body: &BodyParameters, lat_deg: f64, lon_deg: f64) -> Vec3 {
    let (slat, clat) = lat_deg.to_radians().sin_cos();
    let (slon, clon) = lon_deg.to_radians().sin_cos();
    Vec3::new(clat * clon, clat * slon, slat) * body.radius_km
}

/// Inertial position of a surface point at time `t`.
pub fn ground_point_position(body: &BodyParameters, lat_deg: f64, lon_deg: f64, t: f64) -> Vec3 {
    inertial_from_body_fixed(body, surface_point(body, lat_deg, lon_deg), t)
}

/// Latitude/longitude of the point directly beneath an inertial position.
pub fn sub_satellite_point(body: &BodyParameters, p: Vec3, t: f64) -> (f64, f64) {
    latlon_from_body_fixed(body_fixed_from_inertial(body, p, t))
}
