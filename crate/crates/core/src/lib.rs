//! Library for studying cell switch-off in pixelized cellular networks.
//!
//! The target area is discretized into pixels with constant average received
//! power. Given a channel gain matrix, per-cell power vectors, and a spatial
//! demand distribution, the crate computes coverage, SINR, cell loads (under
//! full-load or load-coupled interference), and six network-level objectives,
//! then searches the space of on/off patterns with an elitist genetic
//! algorithm or a greedy minimum-distance chain. A Monte-Carlo system-level
//! simulator validates selected patterns against four switch-off heuristics
//! from the literature.

pub mod config;
pub mod coupling;
pub mod demand;
pub mod error;
pub mod io;
pub mod mda;
pub mod metrics;
pub mod moea;
pub mod net;
pub mod problem;
pub mod sim;

pub use config::ScenarioConfig;
pub use coupling::{LoadVector, VolumeScale, VolumeTarget};
pub use demand::DemandProfile;
pub use error::{Error, Result};
pub use metrics::{ObjectiveVector, PowerModel};
pub use moea::{Individual, MoeaConfig, ParetoSet};
pub use net::{CoverageResult, NetworkModel, Topology};
pub use problem::{CsoProblem, ObjectivePair};
