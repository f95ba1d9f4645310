//! Cluster-head placement and multi-UAV data-collection tour planning for
//! wireless sensor networks.
//!
//! The crate is split along the planning pipeline:
//!
//! * [`channel`]: sensor-to-cluster-head SNR, air-to-ground path loss and the
//!   coverage radius a UAV may hover within at a given altitude;
//! * [`clustering`]: k-means placement of the fewest cluster heads that keep
//!   every sensor within range;
//! * [`routing`]: exact, nearest-neighbor and genetic multi-UAV tour solvers,
//!   the hover-point adjustment and plan validation;
//! * [`harness`]: seeded experiments producing CSV tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod clustering;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod rng;
pub mod routing;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::Point3;
pub use scenario::{EnvironmentProfile, RadioConfig, Scenario, ScenarioSpec};
