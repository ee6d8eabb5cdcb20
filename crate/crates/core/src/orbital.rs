//! Circular-orbit placement of a shell and sub-satellite points at epoch.
//!
//! Satellites are frozen at their epoch positions: Earth rotation is not
//! applied and nothing is propagated forward in time.

use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, SatId};

/// Generative description of one orbital shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShellParams {
    pub planes: u32,
    pub sats_per_plane: u32,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    /// Walker-style inter-plane phase factor. Plane `p` is advanced by
    /// `p * phasing_offset / planes` satellite slots.
    pub phasing_offset: u32,
}

impl Default for ShellParams {
    /// 72 planes of 22 satellites at 540 km and 53°, planes index-aligned.
    fn default() -> Self {
        ShellParams {
            planes: 72,
            sats_per_plane: 22,
            altitude_km: 540.0,
            inclination_deg: 53.0,
            phasing_offset: 0,
        }
    }
}

impl ShellParams {
    pub fn validate(&self) -> Result<()> {
        if self.planes < 3 {
            return Err(Error::config("planes", "must be ≥ 3"));
        }
        if self.sats_per_plane < 3 {
            return Err(Error::config("sats_per_plane", "must be ≥ 3"));
        }
        if self.planes.checked_mul(self.sats_per_plane).is_none() {
            return Err(Error::config("planes", "planes × sats_per_plane overflows"));
        }
        if !(self.altitude_km.is_finite() && self.altitude_km > 0.0) {
            return Err(Error::config("altitude_km", "must be a positive number"));
        }
        if !(self.inclination_deg >= 0.0 && self.inclination_deg < 180.0) {
            return Err(Error::config("inclination_deg", "must lie in [0, 180)"));
        }
        Ok(())
    }

    pub fn satellite_count(&self) -> u32 {
        self.planes * self.sats_per_plane
    }

    /// Splits a 1-indexed id into its 0-indexed `(plane, index)`.
    pub fn plane_index(&self, id: SatId) -> Result<(u32, u32)> {
        if id == 0 || id > self.satellite_count() {
            return Err(Error::Argument(alloc::format!(
                "satellite id {id} outside 1..={}",
                self.satellite_count()
            )));
        }
        let k = id - 1;
        Ok((k / self.sats_per_plane, k % self.sats_per_plane))
    }

    /// Orbital state of the satellite at `(plane, index)`.
    pub fn state(&self, plane: u32, index: u32) -> SatelliteState {
        let o = f64::from(self.planes);
        let q = f64::from(self.sats_per_plane);
        let raan_deg = f64::from(plane) * (360.0 / o);
        let phase = f64::from(plane) * f64::from(self.phasing_offset) / o;
        let arg_lat_deg = wrap360((f64::from(index) + phase) * (360.0 / q));
        SatelliteState {
            id: plane * self.sats_per_plane + index + 1,
            plane,
            index,
            raan_deg,
            arg_lat_deg,
            altitude_km: self.altitude_km,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteState {
    pub id: SatId,
    pub plane: u32,
    pub index: u32,
    pub raan_deg: f64,
    /// Angular position along the orbit, measured from the ascending node.
    pub arg_lat_deg: f64,
    pub altitude_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoCoord {
    pub lat_deg: f64,
    pub lon_deg: f64,
}

/// Places every satellite of the shell, ordered by id.
pub fn place_shell(params: &ShellParams) -> Result<Vec<SatelliteState>> {
    params.validate()?;
    let mut states = Vec::with_capacity(params.satellite_count() as usize);
    for plane in 0..params.planes {
        for index in 0..params.sats_per_plane {
            states.push(params.state(plane, index));
        }
    }
    Ok(states)
}

/// Geographic point directly beneath the satellite at epoch.
///
/// At the exact poles longitude is undefined; 0° is returned there.
pub fn subsatellite_point(state: &SatelliteState, inclination_deg: f64) -> GeoCoord {
    let inc = inclination_deg * (PI / 180.0);
    let u = state.arg_lat_deg * (PI / 180.0);
    let (sin_u, cos_u) = (libm::sin(u), libm::cos(u));
    let sin_lat = (libm::sin(inc) * sin_u).clamp(-1.0, 1.0);
    let lat_deg = libm::asin(sin_lat) * (180.0 / PI);

    let y = libm::cos(inc) * sin_u;
    let x = cos_u;
    let lon_deg = if libm::hypot(x, y) < 1e-12 {
        0.0
    } else {
        wrap180(libm::atan2(y, x) * (180.0 / PI) + state.raan_deg)
    };
    GeoCoord { lat_deg, lon_deg }
}

/// Mean Earth radius.
pub const EARTH_RADIUS_KM: f64 = 6371.0;
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

/// Earth-centered inertial position at epoch, in kilometers.
pub fn position_km(state: &SatelliteState, inclination_deg: f64) -> [f64; 3] {
    let r = EARTH_RADIUS_KM + state.altitude_km;
    let inc = inclination_deg * (PI / 180.0);
    let raan = state.raan_deg * (PI / 180.0);
    let u = state.arg_lat_deg * (PI / 180.0);
    let (sin_o, cos_o) = (libm::sin(raan), libm::cos(raan));
    let (sin_u, cos_u) = (libm::sin(u), libm::cos(u));
    let (sin_i, cos_i) = (libm::sin(inc), libm::cos(inc));
    [
        r * (cos_o * cos_u - sin_o * sin_u * cos_i),
        r * (sin_o * cos_u + cos_o * sin_u * cos_i),
        r * (sin_u * sin_i),
    ]
}

/// Straight-line distance between two satellites of the same shell.
pub fn distance_km(a: &SatelliteState, b: &SatelliteState, inclination_deg: f64) -> f64 {
    let (pa, pb) = (position_km(a, inclination_deg), position_km(b, inclination_deg));
    let d = [pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]];
    libm::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
}

/// Light-speed travel time between two satellites, rounded up to the next
/// nanosecond.
pub fn propagation_delay_ns(a: &SatelliteState, b: &SatelliteState, inclination_deg: f64) -> u64 {
    libm::ceil(distance_km(a, b, inclination_deg) / SPEED_OF_LIGHT_KM_S * 1e9) as u64
}

/// Reduces an angle to `[0, 360)`.
pub fn wrap360(deg: f64) -> f64 {
    let r = deg % 360.0;
    if r < 0.0 {
        // a tiny negative remainder would round up to exactly 360
        let w = r + 360.0;
        if w >= 360.0 {
            0.0
        } else {
            w
        }
    } else {
        r
    }
}

/// Reduces an angle to `(-180, 180]`.
pub fn wrap180(deg: f64) -> f64 {
    let r = wrap360(deg);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}
