use serde::{Deserialize, Serialize};

use super::{population_std, route_length, RoutePlan};
use crate::channel::{mean_path_loss, received_power_uav, LinkBudget};
use crate::clustering::Clustering;
use crate::geometry::{distance, elevation_angle};
use crate::scenario::{EnvironmentProfile, RadioConfig};

/// Slack on the received-power check, dB.
const POWER_SLACK_DB: f64 = 1e-6;
const LENGTH_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn outcome(name: &str, problems: Vec<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            "ok".to_string()
        } else {
            problems.join("; ")
        },
    }
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= LENGTH_REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Checks a plan against the clustering it serves: cluster-head partition,
/// dock endpoints, hover distance, link quality at every hover point, and
/// internal length bookkeeping.
pub fn validate_plan(
    plan: &RoutePlan,
    clustering: &Clustering,
    env: &EnvironmentProfile,
    cfg: &RadioConfig,
    radius: f64,
) -> ValidationReport {
    let k = clustering.k_prime;
    let mut checks = Vec::new();

    let mut seen = vec![0usize; k];
    let mut problems = Vec::new();
    for &c in plan.routes.iter().flatten() {
        match seen.get_mut(c) {
            Some(n) => *n += 1,
            None => problems.push(format!("unknown cluster head {c}")),
        }
    }
    for (c, &n) in seen.iter().enumerate() {
        if n != 1 {
            problems.push(format!("cluster head {c} visited {n} times"));
        }
    }
    if let Some(u) = plan.routes.iter().position(|r| r.is_empty()) {
        problems.push(format!("UAV {u} has an empty route"));
    }
    checks.push(outcome("partition", problems));

    let mut problems = Vec::new();
    if plan.waypoints.len() != plan.routes.len() {
        problems.push("waypoint and route counts differ".to_string());
    }
    for (u, (w, r)) in plan.waypoints.iter().zip(&plan.routes).enumerate() {
        if w.len() != r.len() + 2 {
            problems.push(format!("UAV {u}: {} waypoints for {} cluster heads", w.len(), r.len()));
        } else if w.first() != Some(&plan.dock) || w.last() != Some(&plan.dock) {
            problems.push(format!("UAV {u} does not start and end at the dock"));
        }
    }
    checks.push(outcome("dock_endpoints", problems));

    let link = LinkBudget::from_radio(cfg);
    let mut radius_problems = Vec::new();
    let mut power_problems = Vec::new();
    for (u, (w, r)) in plan.waypoints.iter().zip(&plan.routes).enumerate() {
        if w.len() != r.len() + 2 {
            continue;
        }
        for (&c, hover) in r.iter().zip(&w[1..]) {
            let Some(ch) = clustering.ch_positions.get(c) else {
                continue;
            };
            let offset = ch.horizontal_distance(hover);
            if offset > radius + 1e-9 * radius.max(1.0) {
                radius_problems.push(format!("UAV {u} hovers {offset:.3} m from cluster head {c}"));
            }
            let power = elevation_angle(ch, hover)
                .and_then(|theta| mean_path_loss(env, &link, distance(ch, hover), theta))
                .map(|loss| received_power_uav(cfg, loss));
            match power {
                Ok(p) if p >= cfg.p_th - POWER_SLACK_DB => {}
                Ok(p) => power_problems.push(format!(
                    "UAV {u} receives {p:.3} dBm from cluster head {c} (< {:.3})",
                    cfg.p_th
                )),
                Err(e) => power_problems.push(format!("UAV {u}, cluster head {c}: {e}")),
            }
        }
    }
    checks.push(outcome("hover_radius", radius_problems));
    checks.push(outcome("received_power", power_problems));

    let mut problems = Vec::new();
    for (u, w) in plan.waypoints.iter().enumerate() {
        let recomputed = route_length(w).unwrap_or(f64::NAN);
        match plan.lengths.get(u) {
            Some(&l) if rel_close(l, recomputed) => {}
            Some(&l) => problems.push(format!("UAV {u}: stored length {l} vs {recomputed}")),
            None => problems.push(format!("UAV {u}: no stored length")),
        }
    }
    if !rel_close(plan.total_length, plan.lengths.iter().sum()) {
        problems.push("total length is not the sum of route lengths".to_string());
    }
    if !rel_close(plan.std_dev, population_std(&plan.lengths)) {
        problems.push("std_dev does not match route lengths".to_string());
    }
    checks.push(outcome("length_consistency", problems));

    ValidationReport { checks }
}
