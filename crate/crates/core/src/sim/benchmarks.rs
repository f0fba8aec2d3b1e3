//! Snapshot cell switch-off baselines.
//!
//! Four published heuristic families, all operating on a user snapshot under
//! full-load interference and all bounded below by the coverage constraint:
//! greedy switch-off from the lowest-loaded cell (two termination variants),
//! a load-and-interference ranking with a load threshold, and greedy
//! switch-on set covering.

use crate::metrics;
use crate::net::{self, CoverageResult, NetworkModel, Topology};
use crate::sim::{schedule_cell, SnapshotPolicy};

/// Shared parameters of the snapshot heuristics.
#[derive(Debug, Clone, Copy)]
pub struct SnapshotParams {
    pub min_rate_bps: f64,
    pub kappa_cov: f64,
}

struct SnapshotEval {
    cov: CoverageResult,
    /// Fraction of the carrier each cell needs for its snapshot users.
    loads: Vec<f64>,
    all_satisfied: bool,
    feasible: bool,
}

/// Full-load evaluation of one candidate topology against a user snapshot.
fn evaluate_snapshot(
    model: &NetworkModel,
    topo: &Topology,
    users: &[usize],
    params: &SnapshotParams,
) -> SnapshotEval {
    let cov = net::coverage(model, topo).expect("dimensions agree");
    let loads_fl = crate::coupling::LoadVector::full_load(topo);
    let psi = net::sinr(model, topo, &loads_fl, &cov).expect("dimensions agree");
    let efficiency = net::spectral_efficiency(&psi, &cov.outage);

    let mut per_cell: Vec<Vec<f64>> = vec![Vec::new(); model.num_cells];
    let mut dropped = false;
    for &pixel in users {
        match cov.served_by(pixel) {
            Some(cell) => per_cell[cell].push(efficiency[pixel]),
            None => dropped = true,
        }
    }
    let mut loads = vec![0.0; model.num_cells];
    let mut all_satisfied = !dropped;
    for (cell, eff) in per_cell.iter().enumerate() {
        if eff.is_empty() {
            continue;
        }
        let outcome = schedule_cell(eff, model.bandwidth_hz, params.min_rate_bps);
        loads[cell] = outcome.allocated_hz.iter().sum::<f64>() / model.bandwidth_hz;
        if outcome.satisfied.iter().any(|&s| !s) {
            all_satisfied = false;
        }
    }
    let feasible = metrics::coverage_constraint(&cov, params.kappa_cov);
    SnapshotEval {
        cov,
        loads,
        all_satisfied,
        feasible,
    }
}

/// Active cells ordered by ascending snapshot load, ties to the lowest index.
fn by_ascending_load(topo: &Topology, loads: &[f64]) -> Vec<usize> {
    let mut cells: Vec<usize> = topo.active_cells().collect();
    cells.sort_by(|&a, &b| loads[a].total_cmp(&loads[b]).then(a.cmp(&b)));
    cells
}

/// Greedy switch-off from the lowest-loaded cell; stops at the first cell
/// whose removal leaves a user unserved or breaks the coverage floor.
pub fn benchmark_cell_zooming(
    model: &NetworkModel,
    users: &[usize],
    params: &SnapshotParams,
) -> Topology {
    let mut topo = Topology::all_on(model.num_cells);
    let mut eval = evaluate_snapshot(model, &topo, users, params);
    loop {
        if topo.active_count() <= 1 {
            return topo;
        }
        let candidate = by_ascending_load(&topo, &eval.loads)[0];
        let mut trial = topo.clone();
        trial.set(candidate, false);
        let trial_eval = evaluate_snapshot(model, &trial, users, params);
        if trial_eval.all_satisfied && trial_eval.feasible {
            topo = trial;
            eval = trial_eval;
        } else {
            return topo;
        }
    }
}

/// Like [`benchmark_cell_zooming`] but a failed candidate does not terminate
/// the scan: the next-lowest-loaded cell is tried instead, until a whole pass
/// makes no progress.
pub fn benchmark_improved_cell_zooming(
    model: &NetworkModel,
    users: &[usize],
    params: &SnapshotParams,
) -> Topology {
    let mut topo = Topology::all_on(model.num_cells);
    let mut eval = evaluate_snapshot(model, &topo, users, params);
    let mut failed: Vec<usize> = Vec::new();
    loop {
        if topo.active_count() <= 1 {
            return topo;
        }
        let candidate = by_ascending_load(&topo, &eval.loads)
            .into_iter()
            .find(|c| !failed.contains(c));
        let Some(candidate) = candidate else {
            return topo;
        };
        let mut trial = topo.clone();
        trial.set(candidate, false);
        let trial_eval = evaluate_snapshot(model, &trial, users, params);
        if trial_eval.all_satisfied && trial_eval.feasible {
            topo = trial;
            eval = trial_eval;
            failed.clear();
        } else {
            failed.push(candidate);
        }
    }
}

/// Ranks active cells by load (ascending) and received interference
/// (descending) and switches off every cell below the load threshold in rank
/// order, keeping only the coverage floor; users may be dropped.
pub fn benchmark_load_interference_aware(
    model: &NetworkModel,
    users: &[usize],
    params: &SnapshotParams,
    load_threshold: f64,
) -> Topology {
    let mut topo = Topology::all_on(model.num_cells);
    let eval = evaluate_snapshot(model, &topo, users, params);

    // Mean interference seen across each cell's served pixels.
    let mut interference = vec![0.0; model.num_cells];
    let cells = eval.cov.cell_pixels(model.num_cells);
    for (l, pixels) in cells.iter().enumerate() {
        if pixels.is_empty() {
            continue;
        }
        let mut sum = 0.0;
        for &a in pixels {
            for j in 0..model.num_cells {
                if j != l {
                    sum += model.p_data[j] * model.gain[[a, j]];
                }
            }
        }
        interference[l] = sum / pixels.len() as f64;
    }

    let mut ranked: Vec<usize> = topo
        .active_cells()
        .filter(|&l| eval.loads[l] < load_threshold)
        .collect();
    ranked.sort_by(|&a, &b| {
        eval.loads[a]
            .total_cmp(&eval.loads[b])
            .then(interference[b].total_cmp(&interference[a]))
            .then(a.cmp(&b))
    });

    for cell in ranked {
        if topo.active_count() <= 1 {
            break;
        }
        let mut trial = topo.clone();
        trial.set(cell, false);
        let trial_eval = evaluate_snapshot(model, &trial, users, params);
        if trial_eval.feasible {
            topo = trial;
        }
    }
    topo
}

/// A pixel a cell can serve on signal-to-noise alone (interference-free
/// regime): pilot above threshold, SNR above the minimum, attenuation within
/// the uplink budget.
fn snr_acceptable(model: &NetworkModel, pixel: usize, cell: usize) -> bool {
    let gain = model.gain[[pixel, cell]];
    model.p_pilot[cell] * gain > model.min_rx_power_w
        && model.p_data[cell] * gain / model.noise_w > model.min_sinr
        && 1.0 / gain < model.max_ul_attenuation
}

/// Greedy switch-on set covering: repeatedly activates the cell able to serve
/// the most not-yet-served users in the SNR regime, then pads the result up
/// to the coverage floor.
pub fn benchmark_set_cover(
    model: &NetworkModel,
    users: &[usize],
    params: &SnapshotParams,
) -> Topology {
    let mut topo = Topology::all_off(model.num_cells);
    let mut remaining: Vec<usize> = users.to_vec();
    while !remaining.is_empty() {
        let mut best: Option<(usize, usize)> = None; // (cell, served)
        for cell in 0..model.num_cells {
            if topo.is_active(cell) {
                continue;
            }
            let served = remaining
                .iter()
                .filter(|&&pixel| snr_acceptable(model, pixel, cell))
                .count();
            let better = match best {
                Some((_, s)) => served > s,
                None => served > 0,
            };
            if better {
                best = Some((cell, served));
            }
        }
        let Some((cell, _)) = best else {
            break; // nobody can serve the rest
        };
        topo.set(cell, true);
        remaining.retain(|&pixel| !snr_acceptable(model, pixel, cell));
    }

    // Coverage floor: pad with the cells that reduce outage the most.
    loop {
        if topo.active_count() > 0 {
            let cov = net::coverage(model, &topo).expect("dimensions agree");
            if metrics::coverage_constraint(&cov, params.kappa_cov) {
                return topo;
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for cell in 0..model.num_cells {
            if topo.is_active(cell) {
                continue;
            }
            let mut trial = topo.clone();
            trial.set(cell, true);
            let cov = net::coverage(model, &trial).expect("dimensions agree");
            let better = match best {
                Some((_, outage)) => cov.outage_fraction < outage,
                None => true,
            };
            if better {
                best = Some((cell, cov.outage_fraction));
            }
        }
        match best {
            Some((cell, _)) => topo.set(cell, true),
            None => return topo, // everything already on
        }
    }
}

macro_rules! snapshot_policy {
    ($name:ident, $label:literal, $decide:expr) => {
        /// Policy wrapper for use with the simulator's snapshot mode.
        pub struct $name {
            pub params: SnapshotParams,
        }

        impl SnapshotPolicy for $name {
            fn name(&self) -> &'static str {
                $label
            }
            fn decide(
                &self,
                model: &NetworkModel,
                users: &[usize],
                _current: &Topology,
            ) -> Topology {
                let f: fn(&NetworkModel, &[usize], &SnapshotParams) -> Topology = $decide;
                f(model, users, &self.params)
            }
        }
    };
}

snapshot_policy!(CellZooming, "cell-zooming", benchmark_cell_zooming);
snapshot_policy!(
    ImprovedCellZooming,
    "improved-cell-zooming",
    benchmark_improved_cell_zooming
);
snapshot_policy!(SetCover, "set-cover", benchmark_set_cover);

/// Policy wrapper for the load-and-interference-aware scheme.
pub struct LoadInterferenceAware {
    pub params: SnapshotParams,
    pub load_threshold: f64,
}

impl SnapshotPolicy for LoadInterferenceAware {
    fn name(&self) -> &'static str {
        "load-interference-aware"
    }
    fn decide(&self, model: &NetworkModel, users: &[usize], _current: &Topology) -> Topology {
        benchmark_load_interference_aware(model, users, &self.params, self.load_threshold)
    }
}
