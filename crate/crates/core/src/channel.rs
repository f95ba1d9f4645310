//! Radio propagation: sensor-to-cluster-head SNR, cluster-head-to-UAV mean
//! path loss under a probabilistic LoS/NLoS mixture, and the aerial coverage
//! radius of a cluster head at a given UAV altitude.
//!
//! Distances are meters, angles radians, losses dB, powers dBm. All
//! logarithms are base 10. The LoS sigmoid takes the elevation angle in
//! degrees because its `a`, `b` constants are calibrated that way.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{EnvironmentProfile, RadioConfig};

/// Speed of light used in the free-space term, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Slack (dB) under which a link-budget target is treated as exactly the
/// overhead minimum, giving a zero coverage radius instead of no coverage.
pub const COVERAGE_EDGE_DB: f64 = 1e-9;

/// Altitude cap for [`max_service_altitude`], meters.
pub const DEFAULT_ALTITUDE_CAP: f64 = 1.0e6;

const MONOTONE_SCAN_POINTS: usize = 1024;
const MAX_BISECTIONS: usize = 400;

/// SNR at a cluster head `d` meters from the transmitting sensor (linear).
pub fn snr_at_clusterhead(cfg: &RadioConfig, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::invalid(format!("sensor distance must be positive, got {d}")));
    }
    Ok(cfg.snr_budget * d.powf(-cfg.alpha))
}

/// Largest sensor-to-cluster-head distance that still meets `gamma_th`.
pub fn max_sensor_range(cfg: &RadioConfig) -> f64 {
    (cfg.snr_budget / cfg.gamma_th).powf(cfg.alpha.recip())
}

fn check_angle(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::AngleOutOfDomain(theta))
    }
}

/// `a * exp(-b * (theta_deg - a))`, the odds of NLoS over LoS.
fn nlos_odds(env: &EnvironmentProfile, theta: f64) -> f64 {
    env.a * (-env.b * (theta.to_degrees() - env.a)).exp()
}

/// Probability of a line-of-sight link at elevation `theta`.
pub fn los_probability(env: &EnvironmentProfile, theta: f64) -> Result<f64> {
    check_angle(theta)?;
    Ok(1.0 / (1.0 + nlos_odds(env, theta)))
}

/// Free-space reference loss `20 log10(4 pi f_c / c)`.
pub fn free_space_loss(f_c: f64) -> f64 {
    debug_assert!(f_c > 0.0);
    20.0 * (4.0 * PI * f_c / SPEED_OF_LIGHT).log10()
}

/// Tolerable loss and the frequency-dependent free-space constant of the
/// cluster-head-to-UAV hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub budget_db: f64,
    pub free_space_const_db: f64,
}

impl LinkBudget {
    pub fn from_radio(cfg: &RadioConfig) -> Self {
        Self {
            budget_db: cfg.p_c - cfg.p_th,
            free_space_const_db: free_space_loss(cfg.f_c),
        }
    }
}

/// Loss of a single propagation group (LoS or NLoS) with excess loss `nu`.
pub fn group_path_loss(link: &LinkBudget, d: f64, nu: f64) -> f64 {
    link.free_space_const_db + 20.0 * d.log10() + nu
}

/// Probability-weighted LoS/NLoS path loss at slant distance `d`, elevation `theta`.
pub fn mean_path_loss(env: &EnvironmentProfile, link: &LinkBudget, d: f64, theta: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::invalid(format!("link distance must be positive, got {d}")));
    }
    let p_los = los_probability(env, theta)?;
    let los = group_path_loss(link, d, env.nu_los);
    let nlos = group_path_loss(link, d, env.nu_nlos);
    Ok(p_los * los + (1.0 - p_los) * nlos)
}

/// Power received by the UAV for a given path loss.
pub fn received_power_uav(cfg: &RadioConfig, loss_db: f64) -> f64 {
    cfg.p_c - loss_db
}

/// Whether a link with this loss reaches the receiver sensitivity.
pub fn link_succeeds(cfg: &RadioConfig, loss_db: f64) -> bool {
    received_power_uav(cfg, loss_db) >= cfg.p_th
}

fn mixed_excess_loss(env: &EnvironmentProfile, theta: f64) -> f64 {
    let odds = nlos_odds(env, theta);
    if odds.is_infinite() {
        env.nu_nlos
    } else {
        (env.nu_los + env.nu_nlos * odds) / (1.0 + odds)
    }
}

/// Angle-dependent part of the mean path loss once the altitude is factored out:
/// `mean_path_loss = L_FS + 20 log10(z) + f(theta)` since `d = z / sin(theta)`.
pub fn excess_loss_f(env: &EnvironmentProfile, theta: f64) -> Result<f64> {
    check_angle(theta)?;
    Ok(excess_loss_unchecked(env, theta))
}

fn excess_loss_unchecked(env: &EnvironmentProfile, theta: f64) -> f64 {
    mixed_excess_loss(env, theta) - 20.0 * theta.sin().log10()
}

/// Solution of the coverage-radius inversion at one altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub altitude: f64,
    /// Elevation angle at the coverage edge.
    pub theta_star: f64,
    /// Largest horizontal UAV offset from the cluster head keeping the link up.
    pub radius: f64,
}

/// Value `f(theta*)` must reach at altitude `z`.
pub fn coverage_target_db(cfg: &RadioConfig, z: f64) -> f64 {
    cfg.link_budget_db() - 20.0 * z.log10() - free_space_loss(cfg.f_c)
}

/// Maximum horizontal radius around a cluster head within which a UAV at
/// altitude `z` still receives at least `p_th`.
///
/// Inverts `f(theta) = target` by bisection over (0, pi/2]. If a 1024-point
/// scan finds `f` not monotone decreasing, the grid point closest to the
/// target is used instead.
pub fn coverage_radius(env: &EnvironmentProfile, cfg: &RadioConfig, z: f64) -> Result<Coverage> {
    if !(z > 0.0) {
        return Err(Error::invalid(format!("altitude must be positive, got {z}")));
    }
    let target = coverage_target_db(cfg, z);
    let f = |theta: f64| excess_loss_unchecked(env, theta);
    let f_overhead = f(FRAC_PI_2);
    if target < f_overhead - COVERAGE_EDGE_DB {
        return Err(Error::NoCoverage {
            target_db: target,
            min_db: f_overhead,
        });
    }
    if target <= f_overhead + COVERAGE_EDGE_DB {
        return Ok(Coverage {
            altitude: z,
            theta_star: FRAC_PI_2,
            radius: 0.0,
        });
    }

    let theta_star = if is_monotone_decreasing(&f) {
        bisect_decreasing(&f, target)
    } else {
        grid_closest(&f, target)
    };
    let radius = if theta_star >= FRAC_PI_2 {
        0.0
    } else {
        z / theta_star.tan()
    };
    Ok(Coverage {
        altitude: z,
        theta_star,
        radius,
    })
}

fn scan_grid(i: usize) -> f64 {
    FRAC_PI_2 * (i + 1) as f64 / MONOTONE_SCAN_POINTS as f64
}

fn is_monotone_decreasing(f: &impl Fn(f64) -> f64) -> bool {
    let mut prev = f(scan_grid(0));
    for i in 1..MONOTONE_SCAN_POINTS {
        let cur = f(scan_grid(i));
        if cur > prev {
            return false;
        }
        prev = cur;
    }
    true
}

fn grid_closest(f: &impl Fn(f64) -> f64, target: f64) -> f64 {
    (0..MONOTONE_SCAN_POINTS)
        .map(scan_grid)
        .min_by(|a, b| (f(*a) - target).abs().total_cmp(&(f(*b) - target).abs()))
        .unwrap_or(FRAC_PI_2)
}

/// Requires `f(pi/2) < target` and `f -> +inf` as theta -> 0.
fn bisect_decreasing(f: &impl Fn(f64) -> f64, target: f64) -> f64 {
    let mut hi = FRAC_PI_2;
    let mut lo = FRAC_PI_2 / 2.0;
    while f(lo) <= target {
        hi = lo;
        lo /= 2.0;
        if lo == 0.0 {
            return hi;
        }
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (f(lo) - target).abs() <= (f(hi) - target).abs() {
        lo
    } else {
        hi
    }
}

/// Highest altitude from which a UAV directly overhead still closes the link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceAltitude {
    pub altitude: f64,
    /// The link still closes at the cap; the true ceiling is higher.
    pub saturated: bool,
}

pub fn max_service_altitude(env: &EnvironmentProfile, cfg: &RadioConfig) -> ServiceAltitude {
    max_service_altitude_capped(env, cfg, DEFAULT_ALTITUDE_CAP)
}

pub fn max_service_altitude_capped(
    env: &EnvironmentProfile,
    cfg: &RadioConfig,
    cap: f64,
) -> ServiceAltitude {
    let f_overhead = excess_loss_unchecked(env, FRAC_PI_2);
    let serviceable = |z: f64| coverage_target_db(cfg, z) >= f_overhead - COVERAGE_EDGE_DB;
    if serviceable(cap) {
        return ServiceAltitude {
            altitude: cap,
            saturated: true,
        };
    }
    let mut lo = 1e-3;
    if !serviceable(lo) {
        return ServiceAltitude {
            altitude: 0.0,
            saturated: false,
        };
    }
    let mut hi = cap;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if serviceable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ServiceAltitude {
        altitude: lo,
        saturated: false,
    }
}
