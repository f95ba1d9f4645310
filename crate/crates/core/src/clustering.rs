//! Cluster-head placement.
//!
//! Sensors are grouped with Lloyd's k-means (k-means++ seeding), and the
//! number of clusters grows one at a time until every sensor is within its
//! communication range of the assigned cluster head, or the cluster-head
//! budget runs out.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Point3};
use crate::rng::{derive_seed, rng_from_seed};
use crate::scenario::Scenario;

pub const MAX_LLOYD_ITERATIONS: usize = 300;

/// Cluster heads and the sensor-to-cluster-head association.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub ch_positions: Vec<Point3>,
    /// `assignment[s]` is the cluster-head index serving sensor `s`.
    pub assignment: Vec<usize>,
    pub k_prime: usize,
    /// Largest sensor-to-cluster-head distance.
    pub d_max: f64,
}

impl Clustering {
    /// Sensor indices grouped per cluster head.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.k_prime];
        for (s, &c) in self.assignment.iter().enumerate() {
            groups[c].push(s);
        }
        groups
    }
}

/// Per-iteration snapshot of a k-means run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansTrace {
    /// Centroids used for the assignment step of each iteration; entry 0 is the seeding.
    pub centroids: Vec<Vec<Point3>>,
    /// Within-cluster sum of squared distances after each assignment step.
    pub objective: Vec<f64>,
}

fn dist2(p: &Point3, q: &Point3) -> f64 {
    let (dx, dy) = (p.x - q.x, p.y - q.y);
    dx * dx + dy * dy
}

fn nearest(p: &Point3, centroids: &[Point3]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = dist2(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn assign(points: &[Point3], centroids: &[Point3]) -> (Vec<usize>, f64) {
    let mut objective = 0.0;
    let labels = points
        .iter()
        .map(|p| {
            let (j, d) = nearest(p, centroids);
            objective += d;
            j
        })
        .collect();
    (labels, objective)
}

fn seed_centroids<R: Rng>(points: &[Point3], k: usize, rng: &mut R) -> Vec<Point3> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..points.len())]);
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(weights) => weights.sample(rng),
            // all remaining mass is zero (duplicates): fall back to uniform
            Err(_) => rng.gen_range(0..points.len()),
        };
        let c = points[next];
        centroids.push(c);
        for (slot, p) in d2.iter_mut().zip(points) {
            *slot = slot.min(dist2(p, &c));
        }
    }
    centroids
}

fn update_centroids(points: &[Point3], labels: &[usize], centroids: &[Point3]) -> Vec<Point3> {
    let k = centroids.len();
    let mut sums = vec![(0.0, 0.0, 0usize); k];
    for (p, &l) in points.iter().zip(labels) {
        sums[l].0 += p.x;
        sums[l].1 += p.y;
        sums[l].2 += 1;
    }
    let mut next: Vec<Point3> = sums
        .iter()
        .zip(centroids)
        .map(|(&(sx, sy, n), old)| {
            if n == 0 {
                *old
            } else {
                Point3::ground(sx / n as f64, sy / n as f64)
            }
        })
        .collect();

    // Empty clusters restart on the point farthest from its own centroid.
    let mut taken = vec![false; points.len()];
    for j in (0..k).filter(|&j| sums[j].2 == 0) {
        let far = points
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .map(|(i, p)| (i, dist2(p, &next[labels[i]])))
            .fold(None, |best: Option<(usize, f64)>, cand| match best {
                Some(b) if b.1 >= cand.1 => Some(b),
                _ => Some(cand),
            });
        if let Some((i, _)) = far {
            taken[i] = true;
            next[j] = points[i];
        }
    }
    next
}

fn finish(points: &[Point3], centroids: Vec<Point3>, labels: Vec<usize>) -> Clustering {
    let d_max = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| distance(p, &centroids[l]))
        .fold(0.0, f64::max);
    Clustering {
        k_prime: centroids.len(),
        ch_positions: centroids,
        assignment: labels,
        d_max,
    }
}

/// Lloyd's k-means on ground positions, run until assignments stop changing
/// or [`MAX_LLOYD_ITERATIONS`] is reached.
pub fn lloyd_kmeans(points: &[Point3], k: usize, seed: u64) -> Result<Clustering> {
    lloyd_kmeans_traced(points, k, seed).map(|(c, _)| c)
}

pub fn lloyd_kmeans_traced(points: &[Point3], k: usize, seed: u64) -> Result<(Clustering, KMeansTrace)> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > points.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the number of points ({})",
            points.len()
        )));
    }
    let ground: Vec<Point3> = points.iter().map(|p| Point3::ground(p.x, p.y)).collect();
    let mut rng = rng_from_seed(seed);
    let mut centroids = seed_centroids(&ground, k, &mut rng);
    let (mut labels, objective) = assign(&ground, &centroids);
    let mut trace = KMeansTrace {
        centroids: vec![centroids.clone()],
        objective: vec![objective],
    };

    for _ in 0..MAX_LLOYD_ITERATIONS {
        centroids = update_centroids(&ground, &labels, &centroids);
        let (next, objective) = assign(&ground, &centroids);
        trace.centroids.push(centroids.clone());
        trace.objective.push(objective);
        let converged = next == labels;
        labels = next;
        if converged {
            break;
        }
    }
    Ok((finish(&ground, centroids, labels), trace))
}

/// Grows the number of cluster heads from 1 until the farthest sensor is
/// within `d_th` of its cluster head. Each cluster count uses a fresh k-means
/// run seeded from `(seed, k)`.
pub fn plan_clusterheads(scenario: &Scenario, d_th: f64, seed: u64) -> Result<Clustering> {
    if !(d_th > 0.0) {
        return Err(Error::invalid(format!("d_th must be positive, got {d_th}")));
    }
    if scenario.sensors.is_empty() {
        return Err(Error::invalid("scenario has no sensors"));
    }
    let budget = scenario.max_chs.min(scenario.sensors.len());
    let mut last = None;
    for k in 1..=budget {
        let clustering = lloyd_kmeans(&scenario.sensors, k, derive_seed(seed, k as u64))?;
        if clustering.d_max <= d_th {
            return Ok(clustering);
        }
        last = Some(clustering);
    }
    let d_max = last.map_or(f64::INFINITY, |c| c.d_max);
    Err(Error::BudgetExceeded {
        k: scenario.max_chs,
        d_max,
        d_th,
    })
}

/// One row of a cluster-count sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub d_th: f64,
    pub run: usize,
    pub seed: u64,
    /// `None` when the budget was exhausted.
    pub k_prime: Option<usize>,
    pub d_max: f64,
}

/// Repeats [`plan_clusterheads`] `runs` times per range value. Run `r` uses
/// the seed `derive_seed(base_seed, r)` for every range value.
pub fn clustering_sweep(
    scenario: &Scenario,
    d_th_values: &[f64],
    runs: usize,
    base_seed: u64,
) -> Result<Vec<SweepRecord>> {
    let mut records = Vec::with_capacity(d_th_values.len() * runs);
    for &d_th in d_th_values {
        for run in 0..runs {
            records.push(sweep_cell(scenario, d_th, run, base_seed)?);
        }
    }
    Ok(records)
}

pub(crate) fn sweep_cell(scenario: &Scenario, d_th: f64, run: usize, base_seed: u64) -> Result<SweepRecord> {
    let seed = derive_seed(base_seed, run as u64);
    match plan_clusterheads(scenario, d_th, seed) {
        Ok(c) => Ok(SweepRecord {
            d_th,
            run,
            seed,
            k_prime: Some(c.k_prime),
            d_max: c.d_max,
        }),
        Err(Error::BudgetExceeded { d_max, .. }) => Ok(SweepRecord {
            d_th,
            run,
            seed,
            k_prime: None,
            d_max,
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::scenario::uniform_points;

    fn blob(cx: f64, cy: f64, radius: f64, n: usize, seed: u64) -> Vec<Point3> {
        let mut rng = rng_from_seed(seed);
        (0..n)
            .map(|_| {
                let r = radius * rng.gen::<f64>().sqrt();
                let t = rng.gen::<f64>() * std::f64::consts::TAU;
                Point3::ground(cx + r * t.cos(), cy + r * t.sin())
            })
            .collect()
    }

    fn scenario_with(sensors: Vec<Point3>, k: usize) -> Scenario {
        Scenario {
            area_width: 10_000.0,
            area_height: 10_000.0,
            sensors,
            dock: Point3::ground(5000.0, 5000.0),
            max_chs: k,
            max_uavs: 1,
            uav_altitude: 200.0,
            uav_speed: 10.0,
            seed: 0,
        }
    }

    fn mean(points: &[Point3]) -> Point3 {
        let n = points.len() as f64;
        Point3::ground(
            points.iter().map(|p| p.x).sum::<f64>() / n,
            points.iter().map(|p| p.y).sum::<f64>() / n,
        )
    }

    #[test]
    fn single_point() {
        let p = [Point3::ground(12.0, 34.0)];
        let c = lloyd_kmeans(&p, 1, 5).unwrap();
        assert_eq!(c.ch_positions, vec![p[0]]);
        assert_eq!(c.assignment, vec![0]);
        assert_eq!(c.d_max, 0.0);
    }

    #[test]
    fn k_larger_than_points_is_rejected() {
        let p = [Point3::ground(0.0, 0.0), Point3::ground(1.0, 0.0)];
        assert!(lloyd_kmeans(&p, 3, 0).is_err());
        assert!(lloyd_kmeans(&p, 0, 0).is_err());
    }

    #[test]
    fn recovers_four_square_blobs() {
        let corners = [(1000.0, 1000.0), (9000.0, 1000.0), (1000.0, 9000.0), (9000.0, 9000.0)];
        let blobs: Vec<Vec<Point3>> = corners
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| blob(x, y, 150.0, 40, i as u64))
            .collect();
        let points: Vec<Point3> = blobs.concat();
        let objective = |c: &Clustering| -> f64 {
            points
                .iter()
                .zip(&c.assignment)
                .map(|(p, &l)| dist2(p, &c.ch_positions[l]))
                .sum()
        };
        let best = (0..20)
            .map(|s| lloyd_kmeans(&points, 4, s).unwrap())
            .min_by(|a, b| objective(a).total_cmp(&objective(b)))
            .unwrap();
        for b in &blobs {
            let m = mean(b);
            let closest = best
                .ch_positions
                .iter()
                .map(|c| distance(c, &m))
                .fold(f64::INFINITY, f64::min);
            assert!(closest < 50.0, "blob mean {m:?} unmatched ({closest} m)");
        }
    }

    #[test]
    fn objective_never_increases() {
        for seed in 0..10 {
            let pts = uniform_points(&mut rng_from_seed(seed), 300, 10_000.0, 10_000.0);
            let (_, trace) = lloyd_kmeans_traced(&pts, 12, seed).unwrap();
            for w in trace.objective.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn one_cluster_for_a_tight_disc() {
        let s = scenario_with(blob(5000.0, 5000.0, 100.0, 60, 3), 10);
        let c = plan_clusterheads(&s, 500.0, 1).unwrap();
        assert_eq!(c.k_prime, 1);
    }

    #[test]
    fn two_clusters_for_distant_blobs() {
        let mut pts = blob(2500.0, 5000.0, 100.0, 50, 1);
        pts.extend(blob(7500.0, 5000.0, 100.0, 50, 2));
        let s = scenario_with(pts, 10);
        let c = plan_clusterheads(&s, 500.0, 9).unwrap();
        assert_eq!(c.k_prime, 2);
        assert!(c.d_max <= 500.0);
    }

    #[test]
    fn budget_exceeded_reports_d_max() {
        let mut pts = blob(2500.0, 5000.0, 100.0, 50, 1);
        pts.extend(blob(7500.0, 5000.0, 100.0, 50, 2));
        let s = scenario_with(pts, 1);
        match plan_clusterheads(&s, 500.0, 9) {
            Err(Error::BudgetExceeded { k, d_max, .. }) => {
                assert_eq!(k, 1);
                assert!(d_max > 2400.0);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_points_do_not_break_seeding() {
        let pts = vec![Point3::ground(1.0, 1.0); 6];
        let c = lloyd_kmeans(&pts, 3, 0).unwrap();
        assert_eq!(c.assignment.len(), 6);
        assert_eq!(c.d_max, 0.0);
    }

    #[test]
    fn sweep_shape() {
        let pts = uniform_points(&mut rng_from_seed(4), 120, 10_000.0, 10_000.0);
        let s = scenario_with(pts, 60);
        let rows = clustering_sweep(&s, &[2500.0], 1, 3).unwrap();
        assert_eq!(rows.len(), 1);
        let rows = clustering_sweep(&s, &[1500.0, 3000.0], 3, 3).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows, clustering_sweep(&s, &[1500.0, 3000.0], 3, 3).unwrap());
    }
}
