//! Seeded experiment runner producing plot-ready CSV tables.
//!
//! Every experiment expands its sweep into independent cells (sweep value x
//! replication). Replication `r` draws its randomness from
//! `derive_seed(base_seed, r)`; cells run on a rayon pool capped by the
//! `SKYHARVEST_THREADS` environment variable and are reassembled in sweep
//! order, so outputs are byte-identical across runs and thread counts.

mod experiments;
mod table;

pub use experiments::{
    altitude_gain, clustering_sweep_table, fairness, multi_uav, solver_compare, tspn_gain_table,
};
pub use table::{format_sig6, Cell, Table};

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::GAConfig;
use crate::scenario::{
    generate_scenario, read_json, write_json, EnvironmentProfile, RadioConfig, Scenario, ScenarioSpec,
};

pub const THREADS_ENV: &str = "SKYHARVEST_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ClusteringSweep,
    SolverCompare,
    TspnGain,
    AltitudeGain,
    MultiUav,
    Fairness,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::ClusteringSweep,
        ExperimentKind::SolverCompare,
        ExperimentKind::TspnGain,
        ExperimentKind::AltitudeGain,
        ExperimentKind::MultiUav,
        ExperimentKind::Fairness,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::ClusteringSweep => "clustering_sweep",
            ExperimentKind::SolverCompare => "solver_compare",
            ExperimentKind::TspnGain => "tspn_gain",
            ExperimentKind::AltitudeGain => "altitude_gain",
            ExperimentKind::MultiUav => "multi_uav",
            ExperimentKind::Fairness => "fairness",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// Sweep values for all experiments; each experiment reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepParams {
    /// Sensor communication ranges, meters (`clustering_sweep`).
    pub d_th_values: Vec<f64>,
    /// Cluster-head counts for `solver_compare`.
    pub compare_k_values: Vec<usize>,
    pub compare_uavs: usize,
    /// Cluster heads per `tspn_gain` instance.
    pub tspn_chs: usize,
    /// Fixed coverage radius for `tspn_gain`; derived from the channel when absent.
    pub tspn_radius: Option<f64>,
    /// Cluster heads per `altitude_gain` instance.
    pub altitude_chs: usize,
    /// Flight altitudes, meters (`altitude_gain`).
    pub z_values: Vec<f64>,
    /// Environments compared by `altitude_gain`.
    pub environments: Vec<EnvironmentProfile>,
    /// Cluster-head counts for `multi_uav` / `fairness`.
    pub multi_k_values: Vec<usize>,
    pub uav_values: Vec<usize>,
    /// Route-length standard-deviation bound, meters.
    pub delta_th: f64,
    /// Cluster count for the k-means trace dump.
    pub trace_k: usize,
}

impl Default for SweepParams {
    fn default() -> Self {
        let mut z_values = Vec::new();
        let mut z = 25.0f64;
        while z <= 16_000.0 {
            z_values.push((z * 10.0).round() / 10.0);
            z *= 1.1;
        }
        Self {
            d_th_values: (0..15).map(|i| 100.0 + 200.0 * i as f64).collect(),
            compare_k_values: (6..=10).collect(),
            compare_uavs: 1,
            tspn_chs: 10,
            tspn_radius: Some(1000.0),
            altitude_chs: 20,
            z_values,
            environments: EnvironmentProfile::presets(),
            multi_k_values: (20..=120).step_by(5).collect(),
            uav_values: vec![1, 2, 3],
            delta_th: 10_000.0,
            trace_k: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub name: ExperimentKind,
    pub scenario: Scenario,
    pub radio: RadioConfig,
    pub env: EnvironmentProfile,
    pub ga: GAConfig,
    pub sweep: SweepParams,
    pub replications: usize,
    pub base_seed: u64,
    /// Also dump per-iteration k-means centroids.
    pub trace: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: ExperimentKind::ClusteringSweep,
            scenario: generate_scenario(&ScenarioSpec::default()).expect("default scenario is valid"),
            radio: RadioConfig::default(),
            env: EnvironmentProfile::urban(),
            ga: GAConfig::default(),
            sweep: SweepParams::default(),
            replications: 10,
            base_seed: 1,
            trace: false,
        }
    }
}

impl ExperimentConfig {
    pub fn for_kind(name: ExperimentKind) -> Self {
        Self {
            name,
            ..Self::default()
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.radio.validate()?;
        self.env.validate()?;
        self.ga.validate()?;
        if self.replications == 0 {
            return Err(Error::invalid("replications must be at least 1"));
        }
        let s = &self.sweep;
        let empty = |what: &str| Err(Error::invalid(format!("sweep list `{what}` is empty")));
        match self.name {
            ExperimentKind::ClusteringSweep => {
                if s.d_th_values.is_empty() {
                    return empty("d_th_values");
                }
                if s.d_th_values.iter().any(|d| !(*d > 0.0)) {
                    return Err(Error::invalid("d_th values must be positive"));
                }
            }
            ExperimentKind::SolverCompare => {
                if s.compare_k_values.is_empty() {
                    return empty("compare_k_values");
                }
                if s.compare_uavs == 0 {
                    return Err(Error::invalid("compare_uavs must be at least 1"));
                }
            }
            ExperimentKind::TspnGain => {
                if s.tspn_chs == 0 {
                    return Err(Error::invalid("tspn_chs must be at least 1"));
                }
                if matches!(s.tspn_radius, Some(r) if !(r >= 0.0)) {
                    return Err(Error::invalid("tspn_radius must be non-negative"));
                }
            }
            ExperimentKind::AltitudeGain => {
                if s.z_values.is_empty() {
                    return empty("z_values");
                }
                if s.environments.is_empty() {
                    return empty("environments");
                }
                if s.z_values.iter().any(|z| !(*z > 0.0)) {
                    return Err(Error::invalid("altitudes must be positive"));
                }
                if s.altitude_chs == 0 {
                    return Err(Error::invalid("altitude_chs must be at least 1"));
                }
                for e in &s.environments {
                    e.validate()?;
                }
            }
            ExperimentKind::MultiUav | ExperimentKind::Fairness => {
                if s.multi_k_values.is_empty() {
                    return empty("multi_k_values");
                }
                if s.uav_values.is_empty() {
                    return empty("uav_values");
                }
                if s.uav_values.contains(&0) {
                    return Err(Error::invalid("uav_values must be positive"));
                }
                if !(s.delta_th >= 0.0) {
                    return Err(Error::invalid("delta_th must be non-negative"));
                }
            }
        }
        if self.trace && s.trace_k == 0 {
            return Err(Error::invalid("trace_k must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMetadata {
    pub config: ExperimentConfig,
    pub code_version: String,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
    pub rows: usize,
    pub failed_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: ExperimentKind,
    /// One row per (sweep point, replication), with seed and status columns.
    pub records: Table,
    /// Aggregates over replications.
    pub summary: Table,
    pub trace: Option<Table>,
    pub metadata: ResultMetadata,
}

impl ExperimentResult {
    /// True when every record carries a failure status.
    pub fn all_failed(&self) -> bool {
        let Some(i) = self.records.column("status") else {
            return false;
        };
        !self.records.is_empty()
            && self
                .records
                .rows
                .iter()
                .all(|r| r[i].as_str().is_some_and(Status::is_failure_label))
    }
}

/// Outcome label carried by every record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    ExactTooLarge,
    BudgetExceeded,
    NoCoverage,
    Infeasible,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::ExactTooLarge => "exact_too_large",
            Status::BudgetExceeded => "budget_exceeded",
            Status::NoCoverage => "no_coverage",
            Status::Infeasible => "infeasible",
        }
    }

    fn is_failure_label(label: &str) -> bool {
        matches!(label, "budget_exceeded" | "no_coverage" | "infeasible")
    }
}

impl From<Status> for Cell {
    fn from(s: Status) -> Self {
        Cell::Text(s.label().to_string())
    }
}

/// Builds the worker pool, honoring [`THREADS_ENV`].
pub(crate) fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
}

/// Runs the experiment named in `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let started = Instant::now();
    let started_unix_s = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let pool = worker_pool()?;
    let (records, summary) = pool.install(|| match config.name {
        ExperimentKind::ClusteringSweep => clustering_sweep_table(config),
        ExperimentKind::SolverCompare => solver_compare(config),
        ExperimentKind::TspnGain => tspn_gain_table(config),
        ExperimentKind::AltitudeGain => altitude_gain(config),
        ExperimentKind::MultiUav => multi_uav(config),
        ExperimentKind::Fairness => fairness(config),
    })?;
    let trace = if config.trace {
        Some(experiments::kmeans_trace(config)?)
    } else {
        None
    };
    let status = records.column("status");
    let failed_rows = status.map_or(0, |i| {
        records
            .rows
            .iter()
            .filter(|r| r[i].as_str().is_some_and(Status::is_failure_label))
            .count()
    });
    Ok(ExperimentResult {
        name: config.name,
        metadata: ResultMetadata {
            config: config.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_s,
            wall_clock_s: started.elapsed().as_secs_f64(),
            rows: records.len(),
            failed_rows,
        },
        records,
        summary,
        trace,
    })
}

fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("result");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

/// Writes the records to `path` and, next to it, `<stem>_summary.csv`,
/// `<stem>_trace.csv` (when traced) and the metadata as `<stem>.json`.
/// Returns every path written.
pub fn emit_csv(result: &ExperimentResult, path: &Path) -> Result<Vec<PathBuf>> {
    result.records.write_csv(path)?;
    let mut written = vec![path.to_path_buf()];
    let summary = sibling(path, "_summary", "csv");
    result.summary.write_csv(&summary)?;
    written.push(summary);
    if let Some(trace) = &result.trace {
        let p = sibling(path, "_trace", "csv");
        trace.write_csv(&p)?;
        written.push(p);
    }
    let meta = sibling(path, "", "json");
    write_json(&meta, &result.metadata)?;
    written.push(meta);
    Ok(written)
}
