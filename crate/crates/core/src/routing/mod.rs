//! Multi-UAV collection tours over cluster heads.
//!
//! Every UAV leaves the shared dock, hovers over (or near) each of its
//! cluster heads in order, and returns to the dock. All waypoints, the dock
//! waypoint included, sit at the flight altitude; takeoff and landing legs
//! are not costed.

mod exact;
mod ga;
mod nn;
mod tspn;
mod validate;

pub use exact::{brute_force_mtsp, EXACT_MAX_CHS, EXACT_MAX_UAVS};
pub use ga::{ga_mtsp, ga_mtsp_fair, run_ga, GAConfig, GaRun};
pub use nn::nearest_neighbor_route;
pub use tspn::{hover_point, tspn_adjust, tspn_gain};
pub use validate::{validate_plan, CheckOutcome, ValidationReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Point3};

/// Cluster heads to visit, the shared dock and flight parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteProblem {
    /// Ground positions of the cluster heads.
    pub chs: Vec<Point3>,
    /// Ground position of the dock.
    pub dock: Point3,
    pub uavs: usize,
    pub altitude: f64,
    pub speed: f64,
}

impl RouteProblem {
    pub fn new(chs: Vec<Point3>, dock: Point3, uavs: usize, altitude: f64, speed: f64) -> Self {
        Self {
            chs,
            dock,
            uavs,
            altitude,
            speed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.uavs == 0 {
            return Err(Error::invalid("at least one UAV is required"));
        }
        if self.chs.len() < self.uavs {
            return Err(Error::Infeasible(format!(
                "{} cluster heads cannot give each of {} UAVs a nonempty route",
                self.chs.len(),
                self.uavs
            )));
        }
        if !(self.altitude > 0.0) {
            return Err(Error::invalid("flight altitude must be positive"));
        }
        if !(self.speed > 0.0) {
            return Err(Error::invalid("flight speed must be positive"));
        }
        if !self.dock.is_finite() || self.chs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("positions must be finite"));
        }
        Ok(())
    }

    pub fn dock_waypoint(&self) -> Point3 {
        self.dock.at_altitude(self.altitude)
    }

    pub fn overhead(&self, ch: usize) -> Point3 {
        self.chs[ch].at_altitude(self.altitude)
    }

    /// Symmetric distances between flight-altitude nodes; node 0 is the dock,
    /// node `i + 1` is cluster head `i`.
    pub(crate) fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let nodes: Vec<Point3> = std::iter::once(self.dock_waypoint())
            .chain((0..self.chs.len()).map(|i| self.overhead(i)))
            .collect();
        nodes
            .iter()
            .map(|a| nodes.iter().map(|b| distance(a, b)).collect())
            .collect()
    }

    /// Plan hovering directly above each cluster head.
    pub fn plan_from_routes(&self, routes: Vec<Vec<usize>>) -> RoutePlan {
        let dock = self.dock_waypoint();
        let waypoints = routes
            .iter()
            .map(|r| {
                std::iter::once(dock)
                    .chain(r.iter().map(|&c| self.overhead(c)))
                    .chain(std::iter::once(dock))
                    .collect()
            })
            .collect();
        RoutePlan::from_waypoints(dock, routes, waypoints, self.speed)
    }
}

/// Ordered per-UAV tours and their costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutePlan {
    /// Dock waypoint at flight altitude.
    pub dock: Point3,
    /// Cluster-head indices visited by each UAV, in order.
    pub routes: Vec<Vec<usize>>,
    /// Per UAV: dock, one hover point per cluster head, dock.
    pub waypoints: Vec<Vec<Point3>>,
    pub lengths: Vec<f64>,
    pub total_length: f64,
    pub std_dev: f64,
    /// Average per-UAV flight time, seconds.
    pub mission_time: f64,
    pub speed: f64,
}

impl RoutePlan {
    pub fn from_waypoints(dock: Point3, routes: Vec<Vec<usize>>, waypoints: Vec<Vec<Point3>>, speed: f64) -> Self {
        let lengths: Vec<f64> = waypoints.iter().map(|w| polyline_length(w)).collect();
        let total_length = lengths.iter().sum();
        let std_dev = population_std(&lengths);
        let mission_time = mean(&lengths) / speed;
        Self {
            dock,
            routes,
            waypoints,
            lengths,
            total_length,
            std_dev,
            mission_time,
            speed,
        }
    }

    pub fn uav_count(&self) -> usize {
        self.routes.len()
    }

    pub fn mean_length(&self) -> f64 {
        mean(&self.lengths)
    }
}

fn polyline_length(points: &[Point3]) -> f64 {
    points.windows(2).map(|w| distance(&w[0], &w[1])).sum()
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

pub(crate) fn population_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Sum of consecutive leg lengths.
pub fn route_length(waypoints: &[Point3]) -> Result<f64> {
    if waypoints.len() < 2 {
        return Err(Error::invalid("a route needs at least two waypoints"));
    }
    Ok(polyline_length(waypoints))
}

/// Average per-UAV flight time at speed `speed`, hover time excluded.
pub fn mission_time(plan: &RoutePlan, speed: f64) -> Result<f64> {
    if !(speed > 0.0) {
        return Err(Error::invalid(format!("speed must be positive, got {speed}")));
    }
    Ok(mean(&plan.lengths) / speed)
}

/// Population standard deviation of the per-UAV route lengths.
pub fn trajectory_std(plan: &RoutePlan) -> f64 {
    population_std(&plan.lengths)
}
