//! Scenario configuration: schema, defaults, and model/demand construction.
//!
//! The configuration is strict TOML: unknown keys are rejected so typos fail
//! loudly instead of silently falling back to defaults.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::demand::{self, DemandProfile};
use crate::error::{Error, Result};
use crate::metrics::PowerModel;
use crate::net::NetworkModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    pub channel: ChannelConfig,
    pub radio: RadioConfig,
    pub demand: DemandConfig,
    pub optimization: OptimizationConfig,
    pub simulation: SimulationConfig,
    pub power: PowerConfig,
    pub constraint: ConstraintConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            geometry: GeometryConfig::default(),
            channel: ChannelConfig::default(),
            radio: RadioConfig::default(),
            demand: DemandConfig::default(),
            optimization: OptimizationConfig::default(),
            simulation: SimulationConfig::default(),
            power: PowerConfig::default(),
            constraint: ConstraintConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub num_cells: usize,
    /// `"hexagonal"` or `"explicit"`.
    pub layout: String,
    /// Used when `layout = "explicit"`: one `[x, y]` pair per cell, meters.
    pub cell_positions: Vec<[f64; 2]>,
    /// Hexagon center-to-vertex radius, meters; inter-site distance is sqrt(3) times this.
    pub cell_radius_m: f64,
    pub pixel_size_m: f64,
    pub area_width_m: f64,
    pub area_height_m: f64,
    /// Toroidal wraparound for distance computations (removes border effects).
    pub wraparound: bool,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            num_cells: 37,
            layout: "hexagonal".into(),
            cell_positions: Vec::new(),
            cell_radius_m: 100.0,
            pixel_size_m: 5.0,
            area_width_m: 1000.0,
            area_height_m: 1000.0,
            wraparound: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    /// `"log-distance"` or `"file"`.
    pub model: String,
    /// Gain matrix file (dB) used when `model = "file"`.
    pub gain_file: Option<String>,
    pub path_loss_exponent: f64,
    /// Path loss at the reference distance, dB.
    pub path_loss_intercept_db: f64,
    pub reference_distance_m: f64,
    /// Log-normal shadowing standard deviation, dB. Sampled once per
    /// (pixel, cell) at generation time and frozen.
    pub shadowing_sigma_db: f64,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            model: "log-distance".into(),
            gain_file: None,
            path_loss_exponent: 3.67,
            // Calibrated so a single 30 dBm cell covers roughly a third of
            // the default 1 km^2 area, matching small-cell dimensioning.
            path_loss_intercept_db: 52.0,
            reference_distance_m: 1.0,
            shadowing_sigma_db: 4.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioConfig {
    pub bandwidth_hz: f64,
    pub pilot_power_dbm: f64,
    pub data_power_dbm: f64,
    pub noise_dbm_per_hz: f64,
    pub min_rx_power_dbm: f64,
    pub min_sinr_db: f64,
    pub max_path_loss_db: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            bandwidth_hz: 5e6,
            pilot_power_dbm: 30.0,
            data_power_dbm: 30.0,
            noise_dbm_per_hz: -174.0,
            min_rx_power_dbm: -123.0,
            min_sinr_db: -7.0,
            max_path_loss_db: 163.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemandConfig {
    /// `"hotspots"`, `"uniform"`, or `"file"`.
    pub source: String,
    pub grid_file: Option<String>,
    /// Reject grid files whose weights do not already sum to one.
    pub strict_normalization: bool,
    pub hotspots: usize,
    pub hotspot_sigma_m: f64,
    /// Uniform background weight relative to a hotspot peak.
    pub hotspot_floor: f64,
    pub seed: u64,
    pub mean_interarrival_s: f64,
    pub mean_session_s: f64,
    pub min_rate_bps: f64,
}

impl Default for DemandConfig {
    fn default() -> Self {
        DemandConfig {
            source: "hotspots".into(),
            grid_file: None,
            strict_normalization: false,
            hotspots: 3,
            hotspot_sigma_m: 120.0,
            hotspot_floor: 0.05,
            seed: 7,
            mean_interarrival_s: 0.115,
            mean_session_s: 119.2,
            min_rate_bps: 400e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizationConfig {
    /// `"cells-capacity"`, `"cells-edge"`, `"cells-uplink"`, or `"power-dispersion"`.
    pub objective_pair: String,
    pub population_size: usize,
    pub crossover_prob: f64,
    /// Per-gene bit-flip probability; defaults to 1/L when absent.
    pub mutation_prob: Option<f64>,
    /// Relative hypervolume improvement below which a generation counts as stalled.
    pub hv_threshold: f64,
    /// Consecutive stalled generations before termination.
    pub hv_patience: usize,
    pub max_generations: usize,
    pub seed: u64,
    /// Inject the greedy minimum-distance chain into the initial population.
    pub mda_seed: bool,
    /// Operating demand volume for load-coupled runs, as a fraction of the
    /// all-on network capacity.
    pub volume_fraction_of_capacity: f64,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            objective_pair: "cells-capacity".into(),
            population_size: 100,
            crossover_prob: 1.0,
            mutation_prob: None,
            hv_threshold: 1e-5,
            hv_patience: 20,
            max_generations: 500,
            seed: 11,
            mda_seed: true,
            volume_fraction_of_capacity: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub duration_s: f64,
    pub num_experiments: usize,
    pub qos_check_interval_s: f64,
    pub target_qos: f64,
    pub seed: u64,
    /// `"fl"` or `"lc"`.
    pub ici: String,
    /// Demand volumes to evaluate, as fractions of the all-on network capacity.
    pub volume_multipliers: Vec<f64>,
    /// Load threshold for the load-and-interference-aware baseline.
    pub lia_load_threshold: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            duration_s: 5400.0,
            num_experiments: 100,
            qos_check_interval_s: 1.0,
            target_qos: 0.975,
            seed: 23,
            ici: "fl".into(),
            volume_multipliers: vec![0.2, 0.4, 0.6, 0.8, 1.0, 1.2],
            lia_load_threshold: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerConfig {
    /// Fixed consumption of an active base station, watts.
    pub fixed_w: f64,
    /// Consumption in sleep mode, watts.
    pub sleep_w: f64,
    /// Load-dependent slope, watts at full load.
    pub slope_w: f64,
    /// Uplink open-loop base level (same domain as the compensation term).
    pub uplink_p0: f64,
    /// Fractional path-loss compensation factor in [0, 1].
    pub uplink_kappa: f64,
    /// `"linear"` or `"db"`: domain in which the uplink estimate is summed.
    pub uplink_domain: String,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            fixed_w: 6.8,
            sleep_w: 4.3,
            slope_w: 4.0,
            uplink_p0: 0.0,
            uplink_kappa: 1.0,
            uplink_domain: "linear".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstraintConfig {
    /// Maximum tolerated fraction of outage pixels.
    pub kappa_cov: f64,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        ConstraintConfig { kappa_cov: 0.02 }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path)?;
        Self::from_toml_str(&text).map_err(|e| Error::format(path, e.to_string()))
    }

    /// Hash of the canonical serialized form; embedded in every output file
    /// so results can be traced back to their exact inputs.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml_string().as_bytes());
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if g.num_cells == 0 {
            return Err(Error::Config("geometry.num_cells must be positive".into()));
        }
        if g.pixel_size_m <= 0.0 || g.area_width_m <= 0.0 || g.area_height_m <= 0.0 {
            return Err(Error::Config("geometry sizes must be positive".into()));
        }
        if (g.area_width_m / g.pixel_size_m) < 1.0 || (g.area_height_m / g.pixel_size_m) < 1.0 {
            return Err(Error::Config("pixel grid has zero size".into()));
        }
        match g.layout.as_str() {
            "hexagonal" => {}
            "explicit" => {
                if g.cell_positions.len() != g.num_cells {
                    return Err(Error::Config(format!(
                        "explicit layout needs {} cell positions, got {}",
                        g.num_cells,
                        g.cell_positions.len()
                    )));
                }
            }
            other => return Err(Error::Config(format!("unknown layout '{other}'"))),
        }
        if self.radio.bandwidth_hz <= 0.0 {
            return Err(Error::Config("radio.bandwidth_hz must be positive".into()));
        }
        if self.channel.shadowing_sigma_db < 0.0 {
            return Err(Error::Config(
                "channel.shadowing_sigma_db must be >= 0".into(),
            ));
        }
        match self.channel.model.as_str() {
            "log-distance" => {}
            "file" if self.channel.gain_file.is_some() => {}
            "file" => {
                return Err(Error::Config(
                    "channel.model = \"file\" needs gain_file".into(),
                ))
            }
            other => return Err(Error::Config(format!("unknown channel model '{other}'"))),
        }
        let d = &self.demand;
        if d.mean_interarrival_s <= 0.0 || d.mean_session_s <= 0.0 || d.min_rate_bps <= 0.0 {
            return Err(Error::Config("demand parameters must be positive".into()));
        }
        let o = &self.optimization;
        if o.population_size < 4 || o.population_size % 2 != 0 {
            return Err(Error::Config(
                "population_size must be even and >= 4".into(),
            ));
        }
        if !(0.0..=1.0).contains(&o.crossover_prob) {
            return Err(Error::Config("crossover_prob must be in [0, 1]".into()));
        }
        if let Some(m) = o.mutation_prob {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::Config("mutation_prob must be in [0, 1]".into()));
            }
        }
        let s = &self.simulation;
        if s.duration_s <= 0.0 || s.qos_check_interval_s <= 0.0 || s.num_experiments == 0 {
            return Err(Error::Config(
                "simulation durations must be positive".into(),
            ));
        }
        if !(0.0 < s.target_qos && s.target_qos <= 1.0) {
            return Err(Error::Config("target_qos must be in (0, 1]".into()));
        }
        let p = &self.power;
        if !(p.sleep_w <= p.fixed_w) {
            return Err(Error::Config(
                "power.sleep_w must not exceed power.fixed_w".into(),
            ));
        }
        if !(0.0..=1.0).contains(&p.uplink_kappa) {
            return Err(Error::Config("uplink_kappa must be in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.constraint.kappa_cov) {
            return Err(Error::Config("kappa_cov must be in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn power_model(&self) -> PowerModel {
        PowerModel {
            fixed_w: self.power.fixed_w,
            sleep_w: self.power.sleep_w,
            slope_w: self.power.slope_w,
            max_total_w: self.power.fixed_w + self.power.slope_w,
        }
    }
}

/// Positions of a hexagonal layout: center first, then rings walked in a
/// deterministic order. Extra ring positions beyond `count` are dropped.
pub fn hexagonal_layout(count: usize, radius_m: f64, center: [f64; 2]) -> Vec<[f64; 2]> {
    // Inter-site distance for touching hexagons of the given radius.
    let d = radius_m * 3f64.sqrt();
    let mut positions = vec![center];
    // Axial direction vectors of a pointy-top hexagonal lattice.
    let dirs: [(f64, f64); 6] = [
        (1.0, 0.0),
        (1.0, -1.0),
        (0.0, -1.0),
        (-1.0, 0.0),
        (-1.0, 1.0),
        (0.0, 1.0),
    ];
    let to_xy = |q: f64, r: f64| -> [f64; 2] {
        [
            center[0] + d * (q + r / 2.0),
            center[1] + d * (r * 3f64.sqrt() / 2.0),
        ]
    };
    let mut ring = 1;
    while positions.len() < count {
        // Start each ring at axial (-ring, ring) and walk the six edges.
        let (mut q, mut r) = (-(ring as f64), ring as f64);
        for &(dq, dr) in &dirs {
            for _ in 0..ring {
                positions.push(to_xy(q, r));
                q += dq;
                r += dr;
            }
        }
        ring += 1;
    }
    positions.truncate(count);
    positions
}

fn wrapped_distance(a: [f64; 2], b: [f64; 2], width: f64, height: f64, wrap: bool) -> f64 {
    let mut dx = (a[0] - b[0]).abs();
    let mut dy = (a[1] - b[1]).abs();
    if wrap {
        dx = dx.min(width - dx);
        dy = dy.min(height - dy);
    }
    (dx * dx + dy * dy).sqrt()
}

pub(crate) fn build_model(config: &ScenarioConfig) -> Result<NetworkModel> {
    config.validate()?;
    let g = &config.geometry;
    let rows = (g.area_height_m / g.pixel_size_m).round() as usize;
    let cols = (g.area_width_m / g.pixel_size_m).round() as usize;
    let num_pixels = rows * cols;
    let num_cells = g.num_cells;

    let cell_positions = match g.layout.as_str() {
        "explicit" => g.cell_positions.clone(),
        _ => hexagonal_layout(
            num_cells,
            g.cell_radius_m,
            [g.area_width_m / 2.0, g.area_height_m / 2.0],
        ),
    };

    let gain = match config.channel.model.as_str() {
        "file" => {
            let path = config.channel.gain_file.as_ref().unwrap();
            let loaded = crate::io::load_gain_matrix(path)?;
            if loaded.gain_db.nrows() != num_pixels || loaded.gain_db.ncols() != num_cells {
                return Err(Error::Dimension(format!(
                    "gain file is {}x{}, scenario needs {}x{}",
                    loaded.gain_db.nrows(),
                    loaded.gain_db.ncols(),
                    num_pixels,
                    num_cells
                )));
            }
            loaded.gain_db.mapv(db_to_linear)
        }
        _ => {
            let ch = &config.channel;
            let mut rng = ChaCha8Rng::seed_from_u64(ch.seed);
            let shadow = Normal::new(0.0, ch.shadowing_sigma_db.max(f64::EPSILON)).unwrap();
            let mut gain = Array2::zeros((num_pixels, num_cells));
            for a in 0..num_pixels {
                let row = a / cols;
                let col = a % cols;
                let p = [
                    (col as f64 + 0.5) * g.pixel_size_m,
                    (row as f64 + 0.5) * g.pixel_size_m,
                ];
                for (l, &c) in cell_positions.iter().enumerate() {
                    let dist =
                        wrapped_distance(p, c, g.area_width_m, g.area_height_m, g.wraparound)
                            .max(ch.reference_distance_m);
                    let mut pl_db = ch.path_loss_intercept_db
                        + 10.0 * ch.path_loss_exponent * (dist / ch.reference_distance_m).log10();
                    if ch.shadowing_sigma_db > 0.0 {
                        pl_db += shadow.sample(&mut rng);
                    }
                    gain[[a, l]] = db_to_linear(-pl_db);
                }
            }
            gain
        }
    };

    let r = &config.radio;
    let model = NetworkModel {
        num_cells,
        num_pixels,
        pixel_size_m: g.pixel_size_m,
        grid_rows: rows,
        grid_cols: cols,
        cell_positions,
        gain,
        p_pilot: vec![dbm_to_watts(r.pilot_power_dbm); num_cells],
        p_data: vec![dbm_to_watts(r.data_power_dbm); num_cells],
        noise_w: dbm_to_watts(r.noise_dbm_per_hz) * r.bandwidth_hz,
        bandwidth_hz: r.bandwidth_hz,
        min_rx_power_w: dbm_to_watts(r.min_rx_power_dbm),
        min_sinr: db_to_linear(r.min_sinr_db),
        max_ul_attenuation: db_to_linear(r.max_path_loss_db),
    };
    model.validate()?;
    Ok(model)
}

impl ScenarioConfig {
    /// Builds the demand profile configured for this scenario; the grid must
    /// match the model's pixel layout.
    pub fn build_demand(&self, model: &NetworkModel) -> Result<DemandProfile> {
        let d = &self.demand;
        let gamma = match d.source.as_str() {
            "uniform" => vec![1.0 / model.num_pixels as f64; model.num_pixels],
            "hotspots" => demand::hotspot_distribution(
                model.grid_rows,
                model.grid_cols,
                model.pixel_size_m,
                d.hotspots,
                d.hotspot_sigma_m,
                d.hotspot_floor,
                d.seed,
            ),
            "file" => {
                let path = d.grid_file.as_ref().ok_or_else(|| {
                    Error::Config("demand.source = \"file\" needs grid_file".into())
                })?;
                let grid = demand::load_demand_grid(path, !d.strict_normalization)?;
                if grid.rows != model.grid_rows || grid.cols != model.grid_cols {
                    return Err(Error::Dimension(format!(
                        "demand grid is {}x{}, scenario needs {}x{}",
                        grid.rows, grid.cols, model.grid_rows, model.grid_cols
                    )));
                }
                grid.gamma
            }
            other => return Err(Error::Config(format!("unknown demand source '{other}'"))),
        };
        DemandProfile::new(
            gamma,
            d.mean_interarrival_s,
            d.mean_session_s,
            d.min_rate_bps,
        )
    }
}
