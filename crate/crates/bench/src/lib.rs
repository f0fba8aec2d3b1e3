//! Shared fixtures for the pipeline benchmarks.

use cso_core::config::ScenarioConfig;
use cso_core::demand::DemandProfile;
use cso_core::net::{self, NetworkModel};

/// The default 37-cell scenario at a 10 m pixel resolution, small enough for
/// repeated benchmark iterations.
pub fn desk_scenario() -> (NetworkModel, DemandProfile) {
    let mut config = ScenarioConfig::default();
    config.geometry.pixel_size_m = 10.0;
    let model = net::generate_scenario(&config).expect("scenario builds");
    let profile = config.build_demand(&model).expect("demand builds");
    (model, profile)
}
