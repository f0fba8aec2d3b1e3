//! Network geometry, received power, cell selection, coverage, and SINR.
//!
//! The target area is a row-major grid of square pixels. Within a pixel the
//! average received power is constant, so the whole radio picture reduces to
//! a dense pixels-by-cells gain matrix plus per-cell power vectors.

use ndarray::Array2;

use crate::config::ScenarioConfig;
use crate::coupling::LoadVector;
use crate::error::{Error, Result};

/// Binary on/off pattern over the base stations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Topology {
    bits: Vec<bool>,
}

impl Topology {
    pub fn new(bits: Vec<bool>) -> Self {
        Topology { bits }
    }

    /// All cells switched on.
    pub fn all_on(num_cells: usize) -> Self {
        Topology {
            bits: vec![true; num_cells],
        }
    }

    /// All cells switched off. Not a valid candidate solution, but useful
    /// as a starting point for switch-on heuristics.
    pub fn all_off(num_cells: usize) -> Self {
        Topology {
            bits: vec![false; num_cells],
        }
    }

    /// Single active cell.
    pub fn single(num_cells: usize, cell: usize) -> Self {
        let mut bits = vec![false; num_cells];
        bits[cell] = true;
        Topology { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_active(&self, cell: usize) -> bool {
        self.bits[cell]
    }

    pub fn set(&mut self, cell: usize, active: bool) {
        self.bits[cell] = active;
    }

    /// Number of active cells.
    pub fn active_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn active_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(l, &b)| b.then_some(l))
    }

    /// Number of positions in which two patterns differ.
    pub fn hamming_distance(&self, other: &Topology) -> usize {
        assert_eq!(self.bits.len(), other.bits.len());
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Pattern as a string of `0`/`1`, cell 0 first.
    pub fn to_bitstring(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::Config(format!(
                        "invalid character '{c}' in topology bitstring"
                    )))
                }
            }
        }
        if bits.is_empty() {
            return Err(Error::Config("empty topology bitstring".into()));
        }
        Ok(Topology { bits })
    }
}

/// Immutable radio picture of one scenario.
///
/// `gain` holds linear channel gains (path loss, antenna gain, and shadowing
/// folded together), so received power is simply gain times transmit power.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    pub num_cells: usize,
    pub num_pixels: usize,
    pub pixel_size_m: f64,
    pub grid_rows: usize,
    pub grid_cols: usize,
    /// Cell coordinates in meters.
    pub cell_positions: Vec<[f64; 2]>,
    /// Pixels-by-cells linear gain matrix.
    pub gain: Array2<f64>,
    /// Pilot transmit power per cell, watts.
    pub p_pilot: Vec<f64>,
    /// Data transmit power per cell, watts.
    pub p_data: Vec<f64>,
    /// Noise power over the system bandwidth, watts.
    pub noise_w: f64,
    pub bandwidth_hz: f64,
    /// Minimum pilot received power for coverage, watts.
    pub min_rx_power_w: f64,
    /// Minimum SINR for coverage, linear.
    pub min_sinr: f64,
    /// Maximum allowed attenuation (linear) from the uplink link budget.
    pub max_ul_attenuation: f64,
}

impl NetworkModel {
    /// Checks the structural invariants of the model.
    pub fn validate(&self) -> Result<()> {
        if self.num_cells == 0 || self.num_pixels == 0 {
            return Err(Error::Config("model must have cells and pixels".into()));
        }
        if self.gain.nrows() != self.num_pixels || self.gain.ncols() != self.num_cells {
            return Err(Error::Dimension(format!(
                "gain matrix is {}x{}, expected {}x{}",
                self.gain.nrows(),
                self.gain.ncols(),
                self.num_pixels,
                self.num_cells
            )));
        }
        if self.p_pilot.len() != self.num_cells || self.p_data.len() != self.num_cells {
            return Err(Error::Dimension("power vector length != num_cells".into()));
        }
        if self.gain.iter().any(|&g| g <= 0.0 || !g.is_finite()) {
            return Err(Error::Config(
                "gain entries must be strictly positive".into(),
            ));
        }
        let positive = |v: &[f64]| v.iter().all(|&p| p > 0.0 && p.is_finite());
        if !positive(&self.p_pilot) || !positive(&self.p_data) {
            return Err(Error::Config(
                "transmit powers must be strictly positive".into(),
            ));
        }
        if self.noise_w <= 0.0 || self.bandwidth_hz <= 0.0 {
            return Err(Error::Config(
                "noise power and bandwidth must be positive".into(),
            ));
        }
        Ok(())
    }

    fn check_topology(&self, topo: &Topology) -> Result<()> {
        if topo.len() != self.num_cells {
            return Err(Error::Dimension(format!(
                "topology has {} cells, model has {}",
                topo.len(),
                self.num_cells
            )));
        }
        Ok(())
    }

    /// Center coordinates of a pixel, meters.
    pub fn pixel_position(&self, pixel: usize) -> [f64; 2] {
        let row = pixel / self.grid_cols;
        let col = pixel % self.grid_cols;
        [
            (col as f64 + 0.5) * self.pixel_size_m,
            (row as f64 + 0.5) * self.pixel_size_m,
        ]
    }
}

/// Serving assignment, outage flags, and per-cell size factors for one topology.
///
/// `serving` keeps the best-server index even for outage pixels (bookkeeping);
/// the binary coverage matrix excludes them, see [`CoverageResult::served_by`].
#[derive(Debug, Clone)]
pub struct CoverageResult {
    /// Best active server per pixel (`None` only when no cell is active).
    pub serving: Vec<Option<usize>>,
    /// Outage flag per pixel (`true` = out of coverage).
    pub outage: Vec<bool>,
    /// Inverse of the number of pixels each cell serves; 0 for cells serving none.
    pub inv_cell_size: Vec<f64>,
    /// Fraction of pixels in outage.
    pub outage_fraction: f64,
}

impl CoverageResult {
    /// Row of the binary coverage matrix: the serving cell of a covered pixel.
    /// Outage pixels have an all-zero row.
    pub fn served_by(&self, pixel: usize) -> Option<usize> {
        if self.outage[pixel] {
            None
        } else {
            self.serving[pixel]
        }
    }

    /// Entry of the binary coverage matrix.
    pub fn s(&self, pixel: usize, cell: usize) -> bool {
        self.served_by(pixel) == Some(cell)
    }

    /// Entry of the complement coverage matrix.
    pub fn s_complement(&self, pixel: usize, cell: usize) -> bool {
        !self.s(pixel, cell)
    }

    /// Number of pixels served by a cell.
    pub fn cell_pixel_count(&self, cell: usize) -> usize {
        let n = self.inv_cell_size[cell];
        if n == 0.0 {
            0
        } else {
            (1.0 / n).round() as usize
        }
    }

    /// Pixels served by each cell, as index lists.
    pub fn cell_pixels(&self, num_cells: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); num_cells];
        for (a, _) in self.outage.iter().enumerate() {
            if let Some(l) = self.served_by(a) {
                out[l].push(a);
            }
        }
        out
    }
}

/// Pilot received power for every (pixel, cell) pair, watts.
///
/// Columns of switched-off cells are exactly zero.
pub fn received_power(model: &NetworkModel, topo: &Topology) -> Result<Array2<f64>> {
    model.check_topology(topo)?;
    let mut r = Array2::zeros((model.num_pixels, model.num_cells));
    for l in topo.active_cells() {
        let p = model.p_pilot[l];
        for a in 0..model.num_pixels {
            r[[a, l]] = model.gain[[a, l]] * p;
        }
    }
    Ok(r)
}

/// Average SINR at one pixel given its serving cell and the interferers'
/// loads. Interference terms are accumulated in cell-index order so that two
/// load vectors with `a <= b` elementwise give exactly ordered SINR values.
fn sinr_at(
    model: &NetworkModel,
    topo: &Topology,
    loads: &[f64],
    pixel: usize,
    serving: usize,
) -> f64 {
    let mut interference = 0.0;
    for j in 0..model.num_cells {
        if j != serving && topo.is_active(j) {
            interference += loads[j] * model.p_data[j] * model.gain[[pixel, j]];
        }
    }
    model.p_data[serving] * model.gain[[pixel, serving]] / (interference + model.noise_w)
}

fn coverage_impl(model: &NetworkModel, topo: &Topology, loads: &[f64]) -> Result<CoverageResult> {
    model.check_topology(topo)?;
    let a_total = model.num_pixels;
    let mut serving = vec![None; a_total];
    let mut outage = vec![false; a_total];
    let mut pixel_counts = vec![0usize; model.num_cells];

    for a in 0..a_total {
        // Cell selection: highest pilot received power, ties to the lowest index.
        let mut best: Option<(usize, f64)> = None;
        for l in topo.active_cells() {
            let rx = model.gain[[a, l]] * model.p_pilot[l];
            match best {
                Some((_, p)) if rx <= p => {}
                _ => best = Some((l, rx)),
            }
        }
        match best {
            None => {
                outage[a] = true;
            }
            Some((l, rx)) => {
                serving[a] = Some(l);
                let weak_pilot = rx <= model.min_rx_power_w;
                let ul_budget = 1.0 / model.gain[[a, l]] >= model.max_ul_attenuation;
                let low_sinr = sinr_at(model, topo, loads, a, l) <= model.min_sinr;
                if weak_pilot || ul_budget || low_sinr {
                    outage[a] = true;
                } else {
                    pixel_counts[l] += 1;
                }
            }
        }
    }

    let inv_cell_size = pixel_counts
        .iter()
        .map(|&c| if c == 0 { 0.0 } else { 1.0 / c as f64 })
        .collect();
    let outage_count = outage.iter().filter(|&&v| v).count();
    Ok(CoverageResult {
        serving,
        outage,
        inv_cell_size,
        outage_fraction: outage_count as f64 / a_total as f64,
    })
}

/// Serving cells, outage vector, and cell sizes for a topology.
///
/// The SINR outage criterion is evaluated under the full-load interference
/// model (every active cell interferes at its data power).
pub fn coverage(model: &NetworkModel, topo: &Topology) -> Result<CoverageResult> {
    let full: Vec<f64> = (0..model.num_cells)
        .map(|l| if topo.is_active(l) { 1.0 } else { 0.0 })
        .collect();
    coverage_impl(model, topo, &full)
}

/// Outage fraction from the pilot-power and uplink-budget criteria alone
/// (no SINR term). Both criteria only improve when cells are added, so the
/// all-on value is a lower bound on any topology's outage fraction.
pub fn power_limited_outage_fraction(model: &NetworkModel, topo: &Topology) -> Result<f64> {
    model.check_topology(topo)?;
    let mut outage = 0usize;
    for a in 0..model.num_pixels {
        let mut covered = false;
        for l in topo.active_cells() {
            let rx = model.gain[[a, l]] * model.p_pilot[l];
            if rx > model.min_rx_power_w && 1.0 / model.gain[[a, l]] < model.max_ul_attenuation {
                covered = true;
                break;
            }
        }
        if !covered {
            outage += 1;
        }
    }
    Ok(outage as f64 / model.num_pixels as f64)
}

/// Like [`coverage`], but the SINR outage criterion uses the given average
/// loads as interference weights (load-coupled sessions).
pub fn coverage_with_loads(
    model: &NetworkModel,
    topo: &Topology,
    loads: &LoadVector,
) -> Result<CoverageResult> {
    if loads.average.len() != model.num_cells {
        return Err(Error::Dimension("load vector length != num_cells".into()));
    }
    coverage_impl(model, topo, &loads.average)
}

/// Average SINR per pixel, linear scale. Interference from each active cell
/// is weighted by its average load; outage pixels get 0 by convention.
pub fn sinr(
    model: &NetworkModel,
    topo: &Topology,
    loads: &LoadVector,
    cov: &CoverageResult,
) -> Result<Vec<f64>> {
    model.check_topology(topo)?;
    if loads.average.len() != model.num_cells {
        return Err(Error::Dimension("load vector length != num_cells".into()));
    }
    let mut psi = vec![0.0; model.num_pixels];
    for a in 0..model.num_pixels {
        if let Some(l) = cov.served_by(a) {
            psi[a] = sinr_at(model, topo, &loads.average, a, l);
        }
    }
    Ok(psi)
}

/// Spectral efficiency per pixel via the Shannon link model; outage pixels
/// contribute zero so coverage holes are penalized downstream.
pub fn spectral_efficiency(psi: &[f64], outage: &[bool]) -> Vec<f64> {
    psi.iter()
        .zip(outage)
        .map(|(&s, &v)| if v { 0.0 } else { (1.0 + s).log2() })
        .collect()
}

/// Shannon link model: bits per second per hertz at a given linear SINR.
pub fn link_efficiency(psi: f64) -> f64 {
    (1.0 + psi).log2()
}

/// Builds a model from a scenario configuration: hexagonal or explicit cell
/// layout, log-distance path loss with per-(pixel, cell) shadowing frozen at
/// generation time, or a gain matrix loaded from file.
pub fn generate_scenario(config: &ScenarioConfig) -> Result<NetworkModel> {
    crate::config::build_model(config)
}
