//! Network-level objective functions and the coverage constraint.
//!
//! Six metrics are evaluated per topology: active-cell count, demand-weighted
//! network capacity, cell-edge (5th percentile) pixel rate, an open-loop
//! uplink power estimate, load-dependent power consumption, and load
//! dispersion. Transition/handover accounting compares two topologies.

use serde::{Deserialize, Serialize};

use crate::coupling::LoadVector;
use crate::error::{Error, Result};
use crate::net::{CoverageResult, NetworkModel, Topology};

/// Objective values for one topology, plus the coverage-constraint verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector {
    /// Number of active cells.
    pub active_cells: usize,
    /// Average network capacity, bps.
    pub capacity_bps: f64,
    /// 5th percentile of the pixel rate, bps.
    pub edge_rate_bps: f64,
    /// Open-loop uplink power estimate (linear or dB domain).
    pub uplink_power: f64,
    /// Network power consumption, watts.
    pub power_w: f64,
    /// Coefficient of variation of the active cells' loads.
    pub load_dispersion: f64,
    /// Coverage constraint satisfied.
    pub feasible: bool,
    pub outage_fraction: f64,
}

/// Parameterized base-station power model: fixed part, deeper sleep level,
/// and a linear load-dependent part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    pub fixed_w: f64,
    pub sleep_w: f64,
    pub slope_w: f64,
    pub max_total_w: f64,
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.sleep_w <= self.fixed_w && self.fixed_w <= self.max_total_w) {
            return Err(Error::Config(
                "power model must satisfy sleep <= fixed <= max".into(),
            ));
        }
        Ok(())
    }
}

/// Domain in which the uplink open-loop estimate is accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UplinkDomain {
    /// Attenuation as linear power ratios (1/gain).
    Linear,
    /// Attenuation in dB; only cross-topology ordering matters.
    Decibel,
}

/// Number of active cells.
pub fn f1_active_cells(topo: &Topology) -> usize {
    topo.active_count()
}

/// Average network capacity in bps: each cell's bandwidth share spread evenly
/// over its pixels, weighted by the demand each pixel attracts.
pub fn f2_avg_capacity(
    model: &NetworkModel,
    cov: &CoverageResult,
    efficiency: &[f64],
    gamma: &[f64],
) -> f64 {
    let mut per_cell = vec![0.0; model.num_cells];
    for a in 0..model.num_pixels {
        if let Some(l) = cov.served_by(a) {
            per_cell[l] += efficiency[a] * gamma[a];
        }
    }
    let sum: f64 = per_cell
        .iter()
        .zip(&cov.inv_cell_size)
        .map(|(&w, &n)| w * n)
        .sum();
    model.bandwidth_hz * model.num_pixels as f64 * sum
}

/// Weighted average rate of each pixel, bps.
pub fn pixel_rates(
    model: &NetworkModel,
    cov: &CoverageResult,
    efficiency: &[f64],
    gamma: &[f64],
) -> Vec<f64> {
    let a_total = model.num_pixels as f64;
    (0..model.num_pixels)
        .map(|a| match cov.served_by(a) {
            Some(l) => {
                a_total * efficiency[a] * gamma[a] * model.bandwidth_hz * cov.inv_cell_size[l]
            }
            None => 0.0,
        })
        .collect()
}

/// Cell-edge performance: 5th percentile of the pixel rate over covered
/// pixels. With fewer than 20 covered pixels this degenerates to the minimum.
pub fn f3_cell_edge(
    model: &NetworkModel,
    cov: &CoverageResult,
    efficiency: &[f64],
    gamma: &[f64],
) -> f64 {
    let rates = pixel_rates(model, cov, efficiency, gamma);
    let mut covered: Vec<f64> = (0..model.num_pixels)
        .filter(|&a| cov.served_by(a).is_some())
        .map(|a| rates[a])
        .collect();
    if covered.is_empty() {
        return 0.0;
    }
    covered.sort_by(f64::total_cmp);
    // 5th percentile as the k-th smallest (1-based), no interpolation.
    let k = ((0.05 * covered.len() as f64).floor() as usize).max(1);
    covered[k - 1]
}

/// Open-loop uplink power estimate: fractional path-loss compensation
/// aggregated over the demand each cell serves, normalized by the covered
/// demand mass. Errors when no demand mass is covered.
pub fn f4_uplink_power(
    model: &NetworkModel,
    cov: &CoverageResult,
    gamma: &[f64],
    p0: f64,
    kappa_ul: f64,
    domain: UplinkDomain,
) -> Result<f64> {
    let mut covered_mass = 0.0;
    let mut sum = 0.0;
    for a in 0..model.num_pixels {
        if let Some(l) = cov.served_by(a) {
            covered_mass += gamma[a];
            let attenuation = match domain {
                UplinkDomain::Linear => 1.0 / model.gain[[a, l]],
                UplinkDomain::Decibel => -10.0 * model.gain[[a, l]].log10(),
            };
            sum += gamma[a] * (p0 + kappa_ul * attenuation);
        }
    }
    if covered_mass <= 0.0 {
        return Err(Error::Empty(
            "no covered demand mass for uplink estimate".into(),
        ));
    }
    Ok(sum / covered_mass)
}

/// Load-dependent network power consumption in watts: active cells pay a
/// fixed part plus a linear load term, switched-off cells the sleep level.
pub fn f5_power_consumption(loads: &LoadVector, topo: &Topology, pm: &PowerModel) -> f64 {
    (0..topo.len())
        .map(|l| {
            if topo.is_active(l) {
                pm.fixed_w + pm.slope_w * loads.average[l]
            } else {
                pm.sleep_w
            }
        })
        .sum()
}

/// Load dispersion: coefficient of variation (population) of the active
/// cells' loads. Zero mean load yields zero by convention.
pub fn f6_load_dispersion(loads: &LoadVector, topo: &Topology) -> f64 {
    let active: Vec<f64> = topo.active_cells().map(|l| loads.average[l]).collect();
    if active.is_empty() {
        return 0.0;
    }
    let mean = active.iter().sum::<f64>() / active.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    let var = active.iter().map(|&a| (a - mean).powi(2)).sum::<f64>() / active.len() as f64;
    var.sqrt() / mean
}

/// On/off transitions and demand mass forced to change serving cell when
/// moving between two topologies. The mass counts pixels covered in both.
pub fn transition_cost(
    from: &Topology,
    to: &Topology,
    cov_from: &CoverageResult,
    cov_to: &CoverageResult,
    gamma: &[f64],
) -> (usize, f64) {
    let transitions = from.hamming_distance(to);
    let mut mass = 0.0;
    for (a, &g) in gamma.iter().enumerate() {
        if let (Some(old), Some(new)) = (cov_from.served_by(a), cov_to.served_by(a)) {
            if old != new {
                mass += g;
            }
        }
    }
    (transitions, mass)
}

/// Coverage constraint: at most a fraction `kappa_cov` of pixels in outage.
pub fn coverage_constraint(cov: &CoverageResult, kappa_cov: f64) -> bool {
    cov.outage_fraction <= kappa_cov
}
