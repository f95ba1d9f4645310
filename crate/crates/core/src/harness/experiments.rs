use rayon::prelude::*;

use super::{Cell, ExperimentConfig, Status, Table};
use crate::channel::coverage_radius;
use crate::clustering::{lloyd_kmeans_traced, sweep_cell};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::rng::{derive_seed, rng_from_seed};
use crate::routing::{
    brute_force_mtsp, ga_mtsp, ga_mtsp_fair, nearest_neighbor_route, trajectory_std, tspn_adjust, tspn_gain,
    RoutePlan, RouteProblem,
};
use crate::scenario::uniform_points;

/// Stream tags separating the random draws of one replication.
const GA_STREAM: u64 = 0x6761;
const FAIR_STREAM: u64 = 0x6661;

type Tables = (Table, Table);

fn rep_seed(config: &ExperimentConfig, rep: usize) -> u64 {
    derive_seed(config.base_seed, rep as u64)
}

/// Uniform cluster heads over the scenario area; the same `(seed, k)` always
/// gives the same instance.
fn random_chs(config: &ExperimentConfig, seed: u64, k: usize) -> Vec<Point3> {
    let s = &config.scenario;
    uniform_points(
        &mut rng_from_seed(derive_seed(seed, k as u64)),
        k,
        s.area_width,
        s.area_height,
    )
}

fn problem(config: &ExperimentConfig, chs: Vec<Point3>, uavs: usize, altitude: f64) -> RouteProblem {
    RouteProblem::new(chs, config.scenario.dock, uavs, altitude, config.scenario.uav_speed)
}

/// Maps expected sub-run failures to a status; anything else aborts.
fn status_of(err: Error) -> Result<Status> {
    match err {
        Error::InstanceTooLarge { .. } => Ok(Status::ExactTooLarge),
        Error::BudgetExceeded { .. } => Ok(Status::BudgetExceeded),
        Error::NoCoverage { .. } => Ok(Status::NoCoverage),
        Error::Infeasible(_) => Ok(Status::Infeasible),
        other => Err(other),
    }
}

fn grid<A: Copy + Send, B: Copy + Send>(outer: &[A], inner: &[B]) -> Vec<(A, B)> {
    outer.iter().flat_map(|&a| inner.iter().map(move |&b| (a, b))).collect()
}

fn reps(config: &ExperimentConfig) -> Vec<usize> {
    (0..config.replications).collect()
}

/// Runs cells in parallel and returns their rows in input order.
fn par_rows<T: Sync, F>(cells: &[T], f: F) -> Result<Vec<Vec<Cell>>>
where
    F: Fn(&T) -> Result<Vec<Cell>> + Sync + Send,
{
    cells.par_iter().map(f).collect()
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var.sqrt()))
}

fn min_max(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    (
        Some(values.iter().copied().fold(f64::INFINITY, f64::min)),
        Some(values.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    )
}

/// Numeric values of `column` over the rows in `rows` that have status ok.
fn ok_values(table: &Table, rows: &[usize], column: &str) -> Vec<f64> {
    let c = table.column(column).expect("known column");
    let s = table.column("status").expect("status column");
    rows.iter()
        .filter(|&&r| table.rows[r][s].as_str() == Some(Status::Ok.label()))
        .filter_map(|&r| table.rows[r][c].as_f64())
        .collect()
}

/// Row indices grouped by consecutive runs of `group_len` rows.
fn groups(n_rows: usize, group_len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n_rows).step_by(group_len.max(1)).map(move |start| (start..(start + group_len).min(n_rows)).collect())
}

pub fn clustering_sweep_table(config: &ExperimentConfig) -> Result<Tables> {
    let cells = grid(&config.sweep.d_th_values, &reps(config));
    let mut records = Table::new(&["d_th_m", "run", "seed", "status", "k_prime", "d_max_m"]);
    records.rows = par_rows(&cells, |&(d_th, run)| {
        let rec = sweep_cell(&config.scenario, d_th, run, config.base_seed)?;
        let status = if rec.k_prime.is_some() {
            Status::Ok
        } else {
            Status::BudgetExceeded
        };
        Ok(vec![
            d_th.into(),
            run.into(),
            rec.seed.into(),
            status.into(),
            rec.k_prime.into(),
            rec.d_max.into(),
        ])
    })?;

    let mut summary = Table::new(&[
        "d_th_m",
        "runs",
        "ok_runs",
        "k_prime_mean",
        "k_prime_std",
        "k_prime_min",
        "k_prime_max",
        "d_max_mean_m",
    ]);
    for (rows, &d_th) in groups(records.len(), config.replications).zip(&config.sweep.d_th_values) {
        let k = ok_values(&records, &rows, "k_prime");
        let (mean, std) = mean_std(&k);
        let (lo, hi) = min_max(&k);
        let (d_max, _) = mean_std(&ok_values(&records, &rows, "d_max_m"));
        summary.push(vec![
            d_th.into(),
            rows.len().into(),
            k.len().into(),
            mean.into(),
            std.into(),
            lo.into(),
            hi.into(),
            d_max.into(),
        ]);
    }
    Ok((records, summary))
}

pub fn solver_compare(config: &ExperimentConfig) -> Result<Tables> {
    let uavs = config.sweep.compare_uavs;
    let altitude = config.scenario.uav_altitude;
    let cells = grid(&config.sweep.compare_k_values, &reps(config));
    let mut records = Table::new(&[
        "k_prime", "uavs", "rep", "seed", "status", "exact_m", "nn_m", "ga_m", "gap_nn", "gap_ga",
    ]);
    records.rows = par_rows(&cells, |&(k, rep)| {
        let seed = rep_seed(config, rep);
        let p = problem(config, random_chs(config, seed, k), uavs, altitude);
        let mut row: Vec<Cell> = vec![k.into(), uavs.into(), rep.into(), seed.into()];
        let (nn, ga) = match nearest_neighbor_route(&p)
            .and_then(|nn| ga_mtsp(&p, &config.ga, derive_seed(seed, GA_STREAM)).map(|ga| (nn, ga)))
        {
            Ok(pair) => pair,
            Err(e) => {
                row.push(status_of(e)?.into());
                row.extend(std::iter::repeat_n(Cell::Empty, 5));
                return Ok(row);
            }
        };
        let (status, exact) = match brute_force_mtsp(&p) {
            Ok(plan) => (Status::Ok, Some(plan.total_length)),
            Err(e) => (status_of(e)?, None),
        };
        let gap = |len: f64| exact.map(|x| len / x - 1.0);
        row.extend([
            status.into(),
            exact.into(),
            nn.total_length.into(),
            ga.total_length.into(),
            gap(nn.total_length).into(),
            gap(ga.total_length).into(),
        ]);
        Ok(row)
    })?;

    let mut summary = Table::new(&[
        "k_prime",
        "reps",
        "exact_mean_m",
        "nn_mean_m",
        "ga_mean_m",
        "gap_nn_mean",
        "gap_nn_max",
        "gap_ga_mean",
        "gap_ga_max",
    ]);
    for (rows, &k) in groups(records.len(), config.replications).zip(&config.sweep.compare_k_values) {
        let col = |name: &str| -> Vec<f64> {
            let c = records.column(name).expect("known column");
            rows.iter().filter_map(|&r| records.rows[r][c].as_f64()).collect()
        };
        let gap_nn = col("gap_nn");
        let gap_ga = col("gap_ga");
        summary.push(vec![
            k.into(),
            rows.len().into(),
            mean_std(&col("exact_m")).0.into(),
            mean_std(&col("nn_m")).0.into(),
            mean_std(&col("ga_m")).0.into(),
            mean_std(&gap_nn).0.into(),
            min_max(&gap_nn).1.into(),
            mean_std(&gap_ga).0.into(),
            min_max(&gap_ga).1.into(),
        ]);
    }
    Ok((records, summary))
}

/// Single-UAV GA tour and its neighborhood-adjusted counterpart.
fn tour_and_gain(p: &RouteProblem, tour: &RoutePlan, radius: f64) -> Result<(f64, f64, f64)> {
    let adjusted = tspn_adjust(tour, &p.chs, radius)?;
    let rho = tspn_gain(tour.total_length, adjusted.total_length)?;
    Ok((tour.total_length, adjusted.total_length, rho))
}

pub fn tspn_gain_table(config: &ExperimentConfig) -> Result<Tables> {
    let altitude = config.scenario.uav_altitude;
    let chs = config.sweep.tspn_chs;
    let radius = || match config.sweep.tspn_radius {
        Some(r) => Ok(r),
        None => coverage_radius(&config.env, &config.radio, altitude).map(|c| c.radius),
    };
    let mut records = Table::new(&[
        "rep", "seed", "status", "chs", "radius_m", "d_tsp_m", "d_tspn_m", "rho",
    ]);
    records.rows = par_rows(&reps(config), |&rep| {
        let seed = rep_seed(config, rep);
        let mut row: Vec<Cell> = vec![rep.into(), seed.into()];
        let result = radius().and_then(|r| {
            let p = problem(config, random_chs(config, seed, chs), 1, altitude);
            let tour = ga_mtsp(&p, &config.ga, derive_seed(seed, GA_STREAM))?;
            tour_and_gain(&p, &tour, r).map(|v| (r, v))
        });
        match result {
            Ok((r, (d_tsp, d_tspn, rho))) => row.extend([
                Status::Ok.into(),
                chs.into(),
                r.into(),
                d_tsp.into(),
                d_tspn.into(),
                rho.into(),
            ]),
            Err(e) => {
                row.push(status_of(e)?.into());
                row.push(chs.into());
                row.extend(std::iter::repeat_n(Cell::Empty, 4));
            }
        }
        Ok(row)
    })?;

    let rho = ok_values(&records, &(0..records.len()).collect::<Vec<_>>(), "rho");
    let (mean, std) = mean_std(&rho);
    let (lo, hi) = min_max(&rho);
    let mut summary = Table::new(&["reps", "ok_reps", "rho_mean", "rho_std", "rho_min", "rho_max"]);
    summary.push(vec![
        records.len().into(),
        rho.len().into(),
        mean.into(),
        std.into(),
        lo.into(),
        hi.into(),
    ]);
    Ok((records, summary))
}

/// The tour order does not depend on altitude (every waypoint shares it), so
/// each replication runs the GA once and re-lifts that order to every `z`.
pub fn altitude_gain(config: &ExperimentConfig) -> Result<Tables> {
    let chs = config.sweep.altitude_chs;
    let tours: Vec<(u64, Vec<Point3>, Vec<Vec<usize>>)> = reps(config)
        .par_iter()
        .map(|&rep| {
            let seed = rep_seed(config, rep);
            let points = random_chs(config, seed, chs);
            let p = problem(config, points.clone(), 1, config.scenario.uav_altitude);
            let plan = ga_mtsp(&p, &config.ga, derive_seed(seed, GA_STREAM))?;
            Ok((seed, points, plan.routes))
        })
        .collect::<Result<_>>()?;

    let envs: Vec<usize> = (0..config.sweep.environments.len()).collect();
    let cells: Vec<((usize, f64), usize)> = grid(&grid(&envs, &config.sweep.z_values), &reps(config));
    let mut records = Table::new(&[
        "env", "z_m", "rep", "seed", "status", "radius_m", "d_tsp_m", "d_tspn_m", "rho",
    ]);
    records.rows = par_rows(&cells, |&((e, z), rep)| {
        let env = &config.sweep.environments[e];
        let (seed, points, routes) = &tours[rep];
        let p = problem(config, points.clone(), 1, z);
        let tour = p.plan_from_routes(routes.clone());
        let mut row: Vec<Cell> = vec![env.name.as_str().into(), z.into(), rep.into(), (*seed).into()];
        match coverage_radius(env, &config.radio, z) {
            Ok(cov) => {
                let (d_tsp, d_tspn, rho) = tour_and_gain(&p, &tour, cov.radius)?;
                row.extend([
                    Status::Ok.into(),
                    cov.radius.into(),
                    d_tsp.into(),
                    d_tspn.into(),
                    rho.into(),
                ]);
            }
            Err(err) => {
                let status = status_of(err)?;
                row.extend([
                    status.into(),
                    Cell::Empty,
                    tour.total_length.into(),
                    Cell::Empty,
                    0.0.into(),
                ]);
            }
        }
        Ok(row)
    })?;

    let mut summary = Table::new(&["env", "z_m", "reps", "covered_reps", "rho_mean", "rho_std", "radius_m"]);
    let keys = grid(&envs, &config.sweep.z_values);
    let rho_col = records.column("rho").expect("rho column");
    for (rows, &(e, z)) in groups(records.len(), config.replications).zip(&keys) {
        // uncovered rows count as zero gain
        let rho: Vec<f64> = rows.iter().filter_map(|&r| records.rows[r][rho_col].as_f64()).collect();
        let covered = ok_values(&records, &rows, "radius_m");
        let (mean, std) = mean_std(&rho);
        summary.push(vec![
            config.sweep.environments[e].name.as_str().into(),
            z.into(),
            rows.len().into(),
            covered.len().into(),
            mean.into(),
            std.into(),
            covered.first().copied().into(),
        ]);
    }
    Ok((records, summary))
}

const MULTI_COLUMNS: [&str; 11] = [
    "k_prime",
    "uavs",
    "fair",
    "rep",
    "seed",
    "status",
    "delta_th_m",
    "total_m",
    "mean_len_per_uav_m",
    "std_m",
    "within_delta",
];

fn multi_rows(config: &ExperimentConfig, modes: &[bool]) -> Result<Tables> {
    let s = &config.sweep;
    let altitude = config.scenario.uav_altitude;
    let keys = grid(&grid(&s.multi_k_values, &s.uav_values), modes);
    let cells = grid(&keys, &reps(config));
    let mut records = Table::new(&MULTI_COLUMNS);
    records.rows = par_rows(&cells, |&(((k, u), fair), rep)| {
        let seed = rep_seed(config, rep);
        let p = problem(config, random_chs(config, seed, k), u, altitude);
        let delta = fair.then_some(s.delta_th);
        let plan = match delta {
            Some(d) => ga_mtsp_fair(&p, &config.ga, derive_seed(seed, FAIR_STREAM), d),
            None => ga_mtsp(&p, &config.ga, derive_seed(seed, GA_STREAM)),
        };
        let mut row: Vec<Cell> = vec![
            k.into(),
            u.into(),
            fair.into(),
            rep.into(),
            seed.into(),
        ];
        match plan {
            Ok(plan) => {
                let std = trajectory_std(&plan);
                row.extend([
                    Status::Ok.into(),
                    delta.into(),
                    plan.total_length.into(),
                    plan.mean_length().into(),
                    std.into(),
                    delta.map(|d| std <= d).into(),
                ]);
            }
            Err(e) => {
                row.push(status_of(e)?.into());
                row.push(delta.into());
                row.extend(std::iter::repeat_n(Cell::Empty, 4));
            }
        }
        Ok(row)
    })?;

    let mut summary = Table::new(&[
        "k_prime",
        "uavs",
        "fair",
        "reps",
        "ok_reps",
        "mean_len_per_uav_mean_m",
        "mean_len_per_uav_std_m",
        "std_mean_m",
        "std_max_m",
    ]);
    for (rows, &((k, u), fair)) in groups(records.len(), config.replications).zip(&keys) {
        let len = ok_values(&records, &rows, "mean_len_per_uav_m");
        let std = ok_values(&records, &rows, "std_m");
        let (len_mean, len_std) = mean_std(&len);
        summary.push(vec![
            k.into(),
            u.into(),
            fair.into(),
            rows.len().into(),
            len.len().into(),
            len_mean.into(),
            len_std.into(),
            mean_std(&std).0.into(),
            min_max(&std).1.into(),
        ]);
    }
    Ok((records, summary))
}

/// Unconstrained and fairness-constrained GA side by side.
pub fn multi_uav(config: &ExperimentConfig) -> Result<Tables> {
    multi_rows(config, &[false, true])
}

/// Fairness-constrained GA only.
pub fn fairness(config: &ExperimentConfig) -> Result<Tables> {
    multi_rows(config, &[true])
}

/// Centroids of every k-means iteration on the scenario's sensors.
pub(super) fn kmeans_trace(config: &ExperimentConfig) -> Result<Table> {
    let k = config.sweep.trace_k.min(config.scenario.sensors.len());
    let (_, trace) = lloyd_kmeans_traced(&config.scenario.sensors, k, config.base_seed)?;
    let mut table = Table::new(&["iteration", "cluster", "x_m", "y_m", "objective"]);
    for (it, (centroids, objective)) in trace.centroids.iter().zip(&trace.objective).enumerate() {
        for (c, p) in centroids.iter().enumerate() {
            table.push(vec![it.into(), c.into(), p.x.into(), p.y.into(), (*objective).into()]);
        }
    }
    Ok(table)
}
