use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("elevation undefined: UAV altitude {uav_z} m is not above ground point altitude {ground_z} m")]
    NotAboveGround { ground_z: f64, uav_z: f64 },

    #[error("elevation angle {0} rad outside (0, pi/2]")]
    AngleOutOfDomain(f64),

    #[error("no coverage: link budget target {target_db:.4} dB is below the overhead minimum {min_db:.4} dB")]
    NoCoverage { target_db: f64, min_db: f64 },

    #[error("cluster-head budget exceeded: K = {k} clusters still leave d_max = {d_max:.1} m > {d_th:.1} m")]
    BudgetExceeded { k: usize, d_max: f64, d_th: f64 },

    #[error("instance too large for exact solver: {chs} cluster heads, {uavs} UAVs (limit 10 and 3)")]
    InstanceTooLarge { chs: usize, uavs: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
