//! Points in the local east/north/up frame, in meters.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn ground(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    /// Same horizontal position at altitude `z`.
    pub const fn at_altitude(self, z: f64) -> Self {
        Self { x: self.x, y: self.y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn horizontal_distance(&self, other: &Point3) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Euclidean distance.
pub fn distance(p: &Point3, q: &Point3) -> f64 {
    let (dx, dy, dz) = (p.x - q.x, p.y - q.y, p.z - q.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Elevation angle of `uav` as seen from `ch_ground`, in radians.
///
/// Returns exactly pi/2 when the UAV is directly overhead.
pub fn elevation_angle(ch_ground: &Point3, uav: &Point3) -> Result<f64> {
    let dz = uav.z - ch_ground.z;
    if !(dz > 0.0) {
        return Err(Error::NotAboveGround {
            ground_z: ch_ground.z,
            uav_z: uav.z,
        });
    }
    let horizontal = ch_ground.horizontal_distance(uav);
    if horizontal == 0.0 {
        return Ok(FRAC_PI_2);
    }
    Ok((dz / horizontal).atan())
}
