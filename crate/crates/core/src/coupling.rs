//! Average cell loads under load-coupled interference.
//!
//! Each cell's load depends on its users' bandwidth needs, which depend on
//! SINR, which depends on the other cells' loads. The resulting nonlinear
//! system is solved by Gauss-Seidel sweeps with in-place updates and a [0, 1]
//! clamp; unclamped loads are kept separately for saturation analysis.

use crate::demand::DemandProfile;
use crate::error::{Error, Result};
use crate::net::{self, CoverageResult, NetworkModel, Topology};

/// Default relative termination tolerance for the load iteration.
pub const DEFAULT_EPSILON: f64 = 1e-4;
/// Sweep cap guarding pathological inputs.
pub const MAX_SWEEPS: usize = 100;

/// Average loads per cell after the fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector {
    /// Clamped loads in [0, 1]; exactly 0 for switched-off cells.
    pub average: Vec<f64>,
    /// Unclamped demand loads at the fixed point; entries above 1 indicate
    /// saturated cells.
    pub raw: Vec<f64>,
    /// Gauss-Seidel sweeps performed.
    pub sweeps: usize,
}

impl LoadVector {
    /// The full-load interference model: every active cell loaded at 1.
    pub fn full_load(topo: &Topology) -> Self {
        let loads: Vec<f64> = (0..topo.len())
            .map(|l| if topo.is_active(l) { 1.0 } else { 0.0 })
            .collect();
        LoadVector {
            average: loads.clone(),
            raw: loads,
            sweeps: 0,
        }
    }
}

/// Volume multiplier located by [`find_volume`].
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeScale {
    /// Multiplier on the base demand volume.
    pub multiplier: f64,
    /// Mean inter-arrival time realizing that volume, seconds.
    pub scaled_interarrival_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeTarget {
    /// Largest volume with every unclamped load at most 1.
    Capacity,
    /// Smallest volume with every serving cell's unclamped load at least 1.
    Saturation,
}

/// Unclamped demand load of every cell given the other cells' average loads.
///
/// For each active cell: the mean number of users drawn into its area times
/// the demand-weighted mean per-user bandwidth, over the system bandwidth.
/// Pixels whose spectral efficiency vanishes are capped at one full carrier
/// per user so the result stays finite.
pub fn cell_load(
    model: &NetworkModel,
    topo: &Topology,
    cov: &CoverageResult,
    profile: &DemandProfile,
    alpha: &[f64],
) -> Vec<f64> {
    let mut raw = vec![0.0; model.num_cells];
    let users_per_mass = profile.mean_concurrent_users();
    let cells = cov.cell_pixels(model.num_cells);
    for l in topo.active_cells() {
        raw[l] = cell_load_single(model, topo, profile, alpha, l, &cells[l], users_per_mass);
    }
    raw
}

fn cell_load_single(
    model: &NetworkModel,
    topo: &Topology,
    profile: &DemandProfile,
    alpha: &[f64],
    cell: usize,
    pixels: &[usize],
    users_per_mass: f64,
) -> f64 {
    let mass: f64 = pixels.iter().map(|&a| profile.pixel_probability[a]).sum();
    if mass <= 0.0 {
        return 0.0;
    }
    let mut mean_bandwidth = 0.0;
    for &a in pixels {
        let mut interference = 0.0;
        for j in 0..model.num_cells {
            if j != cell && topo.is_active(j) {
                interference += alpha[j] * model.p_data[j] * model.gain[[a, j]];
            }
        }
        let psi = model.p_data[cell] * model.gain[[a, cell]] / (interference + model.noise_w);
        let efficiency = net::link_efficiency(psi);
        let per_user = if efficiency > 0.0 {
            (profile.min_rate_bps / efficiency).min(model.bandwidth_hz)
        } else {
            model.bandwidth_hz
        };
        mean_bandwidth += profile.pixel_probability[a] / mass * per_user;
    }
    let users = mass * users_per_mass;
    users * mean_bandwidth / model.bandwidth_hz
}

/// Solves the load coupling for a topology. Serving sets come from the given
/// coverage; sweeps run in cell-index order with in-place (fast) updates from
/// the all-ones starting point. Terminates when the relative change of a
/// sweep and the fixed-point residual both drop to `epsilon`.
pub fn solve_loads_with_coverage(
    model: &NetworkModel,
    topo: &Topology,
    cov: &CoverageResult,
    profile: &DemandProfile,
    epsilon: f64,
) -> Result<LoadVector> {
    assert!(epsilon > 0.0, "epsilon must be positive");
    if topo.active_count() == 0 {
        return Err(Error::Config(
            "load solve needs at least one active cell".into(),
        ));
    }
    let users_per_mass = profile.mean_concurrent_users();
    let cells = cov.cell_pixels(model.num_cells);

    let mut alpha: Vec<f64> = (0..model.num_cells)
        .map(|l| if topo.is_active(l) { 1.0 } else { 0.0 })
        .collect();
    let mut raw = alpha.clone();

    for sweep in 1..=MAX_SWEEPS {
        let previous = alpha.clone();
        for l in topo.active_cells() {
            let load = cell_load_single(model, topo, profile, &alpha, l, &cells[l], users_per_mass);
            raw[l] = load;
            alpha[l] = load.min(1.0);
        }
        let change = relative_change(&alpha, &previous);
        if change <= epsilon {
            // Confirm against a simultaneous re-evaluation of every cell at
            // the candidate point before declaring the fixed point reached.
            let residual =
                fixed_point_residual(model, topo, profile, &alpha, &cells, users_per_mass);
            let norm = alpha
                .iter()
                .cloned()
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
            if residual <= epsilon * norm {
                return Ok(LoadVector {
                    average: alpha,
                    raw,
                    sweeps: sweep,
                });
            }
        }
    }
    let residual = fixed_point_residual(model, topo, profile, &alpha, &cells, users_per_mass);
    Err(Error::NonConvergence {
        sweeps: MAX_SWEEPS,
        residual,
        last: alpha,
    })
}

/// Convenience wrapper computing coverage (full-load outage criterion) first.
pub fn solve_loads(
    model: &NetworkModel,
    topo: &Topology,
    profile: &DemandProfile,
    epsilon: f64,
) -> Result<LoadVector> {
    let cov = net::coverage(model, topo)?;
    solve_loads_with_coverage(model, topo, &cov, profile, epsilon)
}

fn relative_change(current: &[f64], previous: &[f64]) -> f64 {
    current
        .iter()
        .zip(previous)
        .map(|(&c, &p)| {
            if p == 0.0 {
                if c == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (c - p).abs() / p
            }
        })
        .fold(0.0, f64::max)
}

fn fixed_point_residual(
    model: &NetworkModel,
    topo: &Topology,
    profile: &DemandProfile,
    alpha: &[f64],
    cells: &[Vec<usize>],
    users_per_mass: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for l in topo.active_cells() {
        let load =
            cell_load_single(model, topo, profile, alpha, l, &cells[l], users_per_mass).min(1.0);
        worst = worst.max((alpha[l] - load).abs());
    }
    worst
}

/// Relative tolerance of the volume bisection.
const VOLUME_TOL: f64 = 1e-3;
const BRACKET_LIMIT: f64 = 1e12;

/// Locates the demand volume multiplier at which the network reaches its
/// capacity (all unclamped loads at most 1) or its saturation point (all
/// serving cells' unclamped loads at least 1), by geometric bracketing and
/// bisection on the monotone load-vs-volume map.
pub fn find_volume(
    model: &NetworkModel,
    topo: &Topology,
    profile: &DemandProfile,
    target: VolumeTarget,
) -> Result<VolumeScale> {
    let cov = net::coverage(model, topo)?;
    let cells = cov.cell_pixels(model.num_cells);

    // Saturation is unreachable if some active cell serves no demand mass.
    if target == VolumeTarget::Saturation {
        for l in topo.active_cells() {
            let mass: f64 = cells[l].iter().map(|&a| profile.pixel_probability[a]).sum();
            if mass <= 0.0 {
                return Err(Error::VolumeUnreachable {
                    cell: l,
                    reason: "cell serves no demand mass, its load never reaches 1".into(),
                });
            }
        }
    }

    let satisfied = |multiplier: f64| -> Result<bool> {
        let scaled = profile.scaled(multiplier);
        let loads = solve_loads_with_coverage(model, topo, &cov, &scaled, DEFAULT_EPSILON)?;
        Ok(match target {
            VolumeTarget::Capacity => topo.active_cells().all(|l| loads.raw[l] <= 1.0),
            VolumeTarget::Saturation => topo.active_cells().all(|l| loads.raw[l] >= 1.0),
        })
    };

    // Find a bracket [lo, hi] with the condition flipping in between. For
    // capacity the condition holds at small volumes; for saturation at large.
    let (mut lo, mut hi);
    match target {
        VolumeTarget::Capacity => {
            let mut good = 1.0;
            while !satisfied(good)? {
                good /= 2.0;
                if good < 1.0 / BRACKET_LIMIT {
                    return Err(Error::VolumeUnreachable {
                        cell: worst_cell(model, topo, &cov, profile, good)?,
                        reason: "loads exceed 1 at vanishing volume".into(),
                    });
                }
            }
            let mut bad = good * 2.0;
            while satisfied(bad)? {
                bad *= 2.0;
                if bad > BRACKET_LIMIT {
                    return Err(Error::VolumeUnreachable {
                        cell: worst_cell(model, topo, &cov, profile, bad)?,
                        reason: "loads never exceed 1 within bracket bounds".into(),
                    });
                }
            }
            lo = bad / 2.0;
            hi = bad;
        }
        VolumeTarget::Saturation => {
            let mut good = 1.0;
            while !satisfied(good)? {
                good *= 2.0;
                if good > BRACKET_LIMIT {
                    return Err(Error::VolumeUnreachable {
                        cell: least_loaded_cell(model, topo, &cov, profile, good)?,
                        reason: "some load stays below 1 within bracket bounds".into(),
                    });
                }
            }
            let mut bad = good / 2.0;
            while satisfied(bad)? {
                bad /= 2.0;
                if bad < 1.0 / BRACKET_LIMIT {
                    return Err(Error::VolumeUnreachable {
                        cell: least_loaded_cell(model, topo, &cov, profile, bad)?,
                        reason: "loads stay above 1 at vanishing volume".into(),
                    });
                }
            }
            lo = bad;
            hi = bad * 2.0;
        }
    }

    // Bisect to relative tolerance. The "satisfied" side is kept consistent
    // with the target: capacity keeps lo feasible, saturation keeps hi.
    while (hi - lo) / hi > VOLUME_TOL {
        let mid = 0.5 * (lo + hi);
        let ok = satisfied(mid)?;
        match target {
            VolumeTarget::Capacity => {
                if ok {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            VolumeTarget::Saturation => {
                if ok {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
    }
    let multiplier = match target {
        VolumeTarget::Capacity => lo,
        VolumeTarget::Saturation => hi,
    };
    Ok(VolumeScale {
        multiplier,
        scaled_interarrival_s: profile.mean_interarrival_s / multiplier,
    })
}

fn worst_cell(
    model: &NetworkModel,
    topo: &Topology,
    cov: &CoverageResult,
    profile: &DemandProfile,
    multiplier: f64,
) -> Result<usize> {
    let scaled = profile.scaled(multiplier);
    let loads = solve_loads_with_coverage(model, topo, cov, &scaled, DEFAULT_EPSILON)?;
    Ok(topo
        .active_cells()
        .max_by(|&a, &b| loads.raw[a].total_cmp(&loads.raw[b]))
        .unwrap_or(0))
}

fn least_loaded_cell(
    model: &NetworkModel,
    topo: &Topology,
    cov: &CoverageResult,
    profile: &DemandProfile,
    multiplier: f64,
) -> Result<usize> {
    let scaled = profile.scaled(multiplier);
    let loads = solve_loads_with_coverage(model, topo, cov, &scaled, DEFAULT_EPSILON)?;
    Ok(topo
        .active_cells()
        .min_by(|&a, &b| loads.raw[a].total_cmp(&loads.raw[b]))
        .unwrap_or(0))
}
