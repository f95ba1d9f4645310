//! Sensor-field scenarios plus the radio and propagation settings that go with them.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::rng::rng_from_seed;

/// A sensor field to be served by cluster heads and UAVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub area_width: f64,
    pub area_height: f64,
    pub sensors: Vec<Point3>,
    pub dock: Point3,
    /// Cluster-head budget K.
    pub max_chs: usize,
    /// UAV budget U.
    pub max_uavs: usize,
    pub uav_altitude: f64,
    pub uav_speed: f64,
    pub seed: u64,
}

/// Inputs to [`generate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub n_sensors: usize,
    pub area_width: f64,
    pub area_height: f64,
    /// Defaults to the area center.
    pub dock: Option<Point3>,
    pub max_chs: usize,
    pub max_uavs: usize,
    pub uav_altitude: f64,
    pub uav_speed: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            n_sensors: 500,
            area_width: 10_000.0,
            area_height: 10_000.0,
            dock: None,
            max_chs: 200,
            max_uavs: 3,
            uav_altitude: 200.0,
            uav_speed: 10.0,
        }
    }
}

impl Scenario {
    pub fn contains(&self, p: &Point3) -> bool {
        (0.0..=self.area_width).contains(&p.x) && (0.0..=self.area_height).contains(&p.y)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area_width > 0.0 && self.area_height > 0.0)
            || !self.area_width.is_finite()
            || !self.area_height.is_finite()
        {
            return Err(Error::invalid("area must have positive finite width and height"));
        }
        if let Some((i, s)) = self
            .sensors
            .iter()
            .enumerate()
            .find(|(_, s)| !s.is_finite() || !self.contains(s) || s.z != 0.0)
        {
            return Err(Error::invalid(format!(
                "sensor {i} at ({}, {}, {}) is not a ground point inside the area",
                s.x, s.y, s.z
            )));
        }
        if !self.dock.is_finite() || !self.contains(&self.dock) {
            return Err(Error::invalid("dock must lie inside the area"));
        }
        if self.max_chs == 0 || self.max_uavs == 0 {
            return Err(Error::invalid("cluster-head and UAV budgets must be at least 1"));
        }
        if !(self.uav_altitude > 0.0) || !(self.uav_speed > 0.0) {
            return Err(Error::invalid("UAV altitude and speed must be positive"));
        }
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let scenario: Scenario = read_json(path)?;
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Draws `n` points uniformly over `[0, width] x [0, height]` at ground level.
pub fn uniform_points<R: Rng>(rng: &mut R, n: usize, width: f64, height: f64) -> Vec<Point3> {
    (0..n)
        .map(|_| Point3::ground(rng.gen_range(0.0..=width), rng.gen_range(0.0..=height)))
        .collect()
}

/// Builds a scenario with sensors drawn i.i.d. uniform over the area.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    if spec.n_sensors == 0 {
        return Err(Error::invalid("at least one sensor is required"));
    }
    if !(spec.area_width > 0.0 && spec.area_height > 0.0) {
        return Err(Error::invalid("area must have positive width and height"));
    }
    let mut rng = rng_from_seed(spec.seed);
    let sensors = uniform_points(&mut rng, spec.n_sensors, spec.area_width, spec.area_height);
    let dock = spec
        .dock
        .unwrap_or(Point3::ground(spec.area_width / 2.0, spec.area_height / 2.0));
    let scenario = Scenario {
        area_width: spec.area_width,
        area_height: spec.area_height,
        sensors,
        dock: Point3::ground(dock.x, dock.y),
        max_chs: spec.max_chs,
        max_uavs: spec.max_uavs,
        uav_altitude: spec.uav_altitude,
        uav_speed: spec.uav_speed,
        seed: spec.seed,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Air-to-ground propagation environment.
///
/// `a` and `b` shape the sigmoid LoS probability over the elevation angle in
/// degrees; `nu_los` / `nu_nlos` are the excess losses (dB) on top of free space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentProfile {
    pub a: f64,
    pub b: f64,
    pub nu_los: f64,
    pub nu_nlos: f64,
    pub name: String,
}

impl EnvironmentProfile {
    pub fn new(name: &str, a: f64, b: f64, nu_los: f64, nu_nlos: f64) -> Self {
        Self {
            a,
            b,
            nu_los,
            nu_nlos,
            name: name.to_string(),
        }
    }

    pub fn suburban() -> Self {
        Self::new("suburban", 4.88, 0.429, 0.1, 21.0)
    }

    pub fn urban() -> Self {
        Self::new("urban", 9.6117, 0.739, 1.0, 20.0)
    }

    pub fn dense_urban() -> Self {
        Self::new("dense-urban", 12.08, 0.11, 1.6, 23.0)
    }

    pub fn high_rise() -> Self {
        Self::new("high-rise", 27.23, 0.08, 2.3, 34.0)
    }

    /// Built-in presets. Only the urban (a, b) pair comes from published
    /// measurements used by the default scenario; the others are common
    /// literature values.
    pub fn presets() -> Vec<Self> {
        vec![
            Self::suburban(),
            Self::urban(),
            Self::dense_urban(),
            Self::high_rise(),
        ]
    }

    pub fn preset(name: &str) -> Option<Self> {
        Self::presets().into_iter().find(|p| p.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.a > 0.0
            && self.b > 0.0
            && self.a.is_finite()
            && self.b.is_finite()
            && 0.0 <= self.nu_los
            && self.nu_los <= self.nu_nlos
            && self.nu_nlos.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "environment `{}` needs a > 0, b > 0 and 0 <= nu_los <= nu_nlos",
                self.name
            )))
        }
    }
}

/// Loads a JSON array of environment profiles.
pub fn load_environment_registry(path: &Path) -> Result<Vec<EnvironmentProfile>> {
    let profiles: Vec<EnvironmentProfile> = read_json(path)?;
    for p in &profiles {
        p.validate()?;
    }
    Ok(profiles)
}

/// Link parameters for both hops: sensor to cluster head (SNR model) and
/// cluster head to UAV (received power against receiver sensitivity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    /// Linear SNR threshold at the cluster head.
    pub gamma_th: f64,
    /// Linear ratio of sensor transmit power to noise power.
    pub snr_budget: f64,
    /// Path-loss exponent of the sensor link.
    pub alpha: f64,
    /// Cluster-head transmit power, dBm.
    pub p_c: f64,
    /// UAV receiver sensitivity, dBm.
    pub p_th: f64,
    /// Carrier frequency, Hz.
    pub f_c: f64,
}

impl RadioConfig {
    /// Picks `snr_budget` so that the sensor range equals `d_th`.
    pub fn with_sensor_range(mut self, d_th: f64) -> Self {
        self.snr_budget = d_th.powf(self.alpha) * self.gamma_th;
        self
    }

    pub fn link_budget_db(&self) -> f64 {
        self.p_c - self.p_th
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.gamma_th > 0.0
            && self.snr_budget > 0.0
            && (2.0..=5.0).contains(&self.alpha)
            && self.p_c > self.p_th
            && self.f_c > 0.0
            && self.p_c.is_finite()
            && self.p_th.is_finite()
            && self.f_c.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "radio config needs gamma_th > 0, snr_budget > 0, alpha in [2, 5], p_c > p_th, f_c > 0",
            ))
        }
    }
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            gamma_th: 1e-4,
            snr_budget: 1.0,
            alpha: 3.0,
            p_c: 20.0,
            p_th: -100.0,
            f_c: 2e9,
        }
        .with_sensor_range(1700.0)
    }
}

/// Reads and deserializes a JSON file.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `value` as pretty-printed JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    std::fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
