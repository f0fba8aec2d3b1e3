//! Objective-pair evaluation wiring the network model, demand, load solver,
//! and metrics into the optimizer interfaces.
//!
//! Full-load pairs (active cells vs capacity, edge rate, or uplink power) use
//! full-load interference; the power/dispersion pair solves the load coupling
//! inside each evaluation and refreshes the outage vector with the resulting
//! load-weighted SINR.

use serde::{Deserialize, Serialize};

use crate::coupling::{self, LoadVector};
use crate::demand::DemandProfile;
use crate::error::{Error, Result};
use crate::metrics::{self, PowerModel, UplinkDomain};
use crate::moea::{BinaryProblem, Evaluation, Sense};
use crate::net::{self, NetworkModel, Topology};

/// Which two metrics are optimized simultaneously.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectivePair {
    /// Minimize active cells, maximize average capacity (full load).
    CellsCapacity,
    /// Minimize active cells, maximize the 5th percentile pixel rate (full load).
    CellsEdgeRate,
    /// Minimize active cells, minimize the uplink power estimate (full load).
    CellsUplinkPower,
    /// Minimize power consumption, minimize load dispersion (load coupling).
    PowerDispersion,
}

impl ObjectivePair {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "cells-capacity" => Ok(ObjectivePair::CellsCapacity),
            "cells-edge" => Ok(ObjectivePair::CellsEdgeRate),
            "cells-uplink" => Ok(ObjectivePair::CellsUplinkPower),
            "power-dispersion" => Ok(ObjectivePair::PowerDispersion),
            other => Err(Error::Config(format!("unknown objective pair '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObjectivePair::CellsCapacity => "cells-capacity",
            ObjectivePair::CellsEdgeRate => "cells-edge",
            ObjectivePair::CellsUplinkPower => "cells-uplink",
            ObjectivePair::PowerDispersion => "power-dispersion",
        }
    }

    pub fn objective_names(&self) -> [&'static str; 2] {
        match self {
            ObjectivePair::CellsCapacity => ["active_cells", "capacity_bps"],
            ObjectivePair::CellsEdgeRate => ["active_cells", "edge_rate_bps"],
            ObjectivePair::CellsUplinkPower => ["active_cells", "uplink_power"],
            ObjectivePair::PowerDispersion => ["power_w", "load_dispersion"],
        }
    }

    pub fn senses(&self) -> [Sense; 2] {
        match self {
            ObjectivePair::CellsCapacity | ObjectivePair::CellsEdgeRate => {
                [Sense::Minimize, Sense::Maximize]
            }
            ObjectivePair::CellsUplinkPower | ObjectivePair::PowerDispersion => {
                [Sense::Minimize, Sense::Minimize]
            }
        }
    }

    /// Whether evaluation runs under load coupling.
    pub fn load_coupled(&self) -> bool {
        matches!(self, ObjectivePair::PowerDispersion)
    }
}

/// Uplink open-loop parameters.
#[derive(Debug, Clone, Copy)]
pub struct UplinkParams {
    pub p0: f64,
    pub kappa: f64,
    pub domain: UplinkDomain,
}

impl Default for UplinkParams {
    fn default() -> Self {
        UplinkParams {
            p0: 0.0,
            kappa: 1.0,
            domain: UplinkDomain::Linear,
        }
    }
}

/// Evaluation context for one scenario and objective pair.
pub struct CsoProblem<'a> {
    pub model: &'a NetworkModel,
    pub profile: &'a DemandProfile,
    pub power: PowerModel,
    pub uplink: UplinkParams,
    pub kappa_cov: f64,
    pub pair: ObjectivePair,
    pub load_epsilon: f64,
}

impl<'a> CsoProblem<'a> {
    pub fn new(
        model: &'a NetworkModel,
        profile: &'a DemandProfile,
        power: PowerModel,
        uplink: UplinkParams,
        kappa_cov: f64,
        pair: ObjectivePair,
    ) -> Self {
        CsoProblem {
            model,
            profile,
            power,
            uplink,
            kappa_cov,
            pair,
            load_epsilon: coupling::DEFAULT_EPSILON,
        }
    }

    /// Full-load average capacity of a topology; the metric the greedy chain
    /// maximizes.
    pub fn capacity(&self, topo: &Topology) -> f64 {
        let Ok(cov) = net::coverage(self.model, topo) else {
            return 0.0;
        };
        let loads = LoadVector::full_load(topo);
        let psi = net::sinr(self.model, topo, &loads, &cov).expect("dimensions agree");
        let h = net::spectral_efficiency(&psi, &cov.outage);
        metrics::f2_avg_capacity(self.model, &cov, &h, &self.profile.pixel_probability)
    }

    fn evaluate_full_load(&self, topo: &Topology) -> Evaluation {
        let cov = net::coverage(self.model, topo).expect("dimensions agree");
        let loads = LoadVector::full_load(topo);
        let psi = net::sinr(self.model, topo, &loads, &cov).expect("dimensions agree");
        let h = net::spectral_efficiency(&psi, &cov.outage);
        let gamma = &self.profile.pixel_probability;
        let second = match self.pair {
            ObjectivePair::CellsCapacity => metrics::f2_avg_capacity(self.model, &cov, &h, gamma),
            ObjectivePair::CellsEdgeRate => metrics::f3_cell_edge(self.model, &cov, &h, gamma),
            ObjectivePair::CellsUplinkPower => metrics::f4_uplink_power(
                self.model,
                &cov,
                gamma,
                self.uplink.p0,
                self.uplink.kappa,
                self.uplink.domain,
            )
            .unwrap_or(f64::INFINITY),
            ObjectivePair::PowerDispersion => unreachable!(),
        };
        Evaluation {
            objectives: [topo.active_count() as f64, second],
            feasible: metrics::coverage_constraint(&cov, self.kappa_cov),
            outage_fraction: cov.outage_fraction,
        }
    }

    fn evaluate_load_coupled(&self, topo: &Topology) -> Evaluation {
        let cov_fl = net::coverage(self.model, topo).expect("dimensions agree");
        let loads = match coupling::solve_loads_with_coverage(
            self.model,
            topo,
            &cov_fl,
            self.profile,
            self.load_epsilon,
        ) {
            Ok(loads) => loads,
            // A non-converged iterate still carries the last loads; treat the
            // topology as saturated rather than aborting the whole search.
            Err(Error::NonConvergence { last, sweeps, .. }) => LoadVector {
                raw: last.clone(),
                average: last,
                sweeps,
            },
            Err(e) => panic!("load solve failed: {e}"),
        };
        // Outage refreshed with load-weighted interference; milder than the
        // full-load criterion, so feasibility can only improve.
        let cov = net::coverage_with_loads(self.model, topo, &loads).expect("dimensions agree");
        let f5 = metrics::f5_power_consumption(&loads, topo, &self.power);
        let f6 = metrics::f6_load_dispersion(&loads, topo);
        Evaluation {
            objectives: [f5, f6],
            feasible: metrics::coverage_constraint(&cov, self.kappa_cov),
            outage_fraction: cov.outage_fraction,
        }
    }

    /// All six metrics for one topology under the given interference model,
    /// as exported by the command-line tools.
    pub fn objective_vector(
        &self,
        topo: &Topology,
        load_coupled: bool,
    ) -> Result<metrics::ObjectiveVector> {
        let cov_fl = net::coverage(self.model, topo)?;
        let loads = if load_coupled {
            coupling::solve_loads_with_coverage(
                self.model,
                topo,
                &cov_fl,
                self.profile,
                self.load_epsilon,
            )?
        } else {
            LoadVector::full_load(topo)
        };
        let cov = if load_coupled {
            net::coverage_with_loads(self.model, topo, &loads)?
        } else {
            cov_fl
        };
        let psi = net::sinr(self.model, topo, &loads, &cov)?;
        let h = net::spectral_efficiency(&psi, &cov.outage);
        let gamma = &self.profile.pixel_probability;
        Ok(metrics::ObjectiveVector {
            active_cells: topo.active_count(),
            capacity_bps: metrics::f2_avg_capacity(self.model, &cov, &h, gamma),
            edge_rate_bps: metrics::f3_cell_edge(self.model, &cov, &h, gamma),
            uplink_power: metrics::f4_uplink_power(
                self.model,
                &cov,
                gamma,
                self.uplink.p0,
                self.uplink.kappa,
                self.uplink.domain,
            )
            .unwrap_or(f64::INFINITY),
            power_w: metrics::f5_power_consumption(&loads, topo, &self.power),
            load_dispersion: metrics::f6_load_dispersion(&loads, topo),
            feasible: metrics::coverage_constraint(&cov, self.kappa_cov),
            outage_fraction: cov.outage_fraction,
        })
    }
}

impl BinaryProblem for CsoProblem<'_> {
    fn genome_len(&self) -> usize {
        self.model.num_cells
    }

    fn evaluate(&self, topo: &Topology) -> Evaluation {
        if self.pair.load_coupled() {
            self.evaluate_load_coupled(topo)
        } else {
            self.evaluate_full_load(topo)
        }
    }

    fn senses(&self) -> [Sense; 2] {
        self.pair.senses()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn grid_model(pixels: usize, cells: usize) -> NetworkModel {
        let mut gain = Array2::zeros((pixels, cells));
        for a in 0..pixels {
            for l in 0..cells {
                // Cell l strongest on pixels congruent to l.
                let near = a % cells == l;
                gain[[a, l]] = if near { 1e-9 } else { 2e-11 };
            }
        }
        NetworkModel {
            num_cells: cells,
            num_pixels: pixels,
            pixel_size_m: 5.0,
            grid_rows: pixels,
            grid_cols: 1,
            cell_positions: vec![[0.0, 0.0]; cells],
            gain,
            p_pilot: vec![1.0; cells],
            p_data: vec![1.0; cells],
            noise_w: 1e-13,
            bandwidth_hz: 5e6,
            min_rx_power_w: 1e-14,
            min_sinr: 1e-3,
            max_ul_attenuation: 1e30,
        }
    }

    fn default_power() -> PowerModel {
        PowerModel {
            fixed_w: 6.8,
            sleep_w: 4.3,
            slope_w: 4.0,
            max_total_w: 10.8,
        }
    }

    #[test]
    fn full_load_pair_counts_cells() {
        let model = grid_model(12, 3);
        let profile = DemandProfile::new(vec![1.0 / 12.0; 12], 0.115, 119.2, 400e3).unwrap();
        let problem = CsoProblem::new(
            &model,
            &profile,
            default_power(),
            UplinkParams::default(),
            0.02,
            ObjectivePair::CellsCapacity,
        );
        let eval = problem.evaluate(&Topology::all_on(3));
        assert_eq!(eval.objectives[0], 3.0);
        assert!(eval.objectives[1] > 0.0);
        assert!(eval.feasible);
    }

    #[test]
    fn load_coupled_pair_reports_power_and_dispersion() {
        let model = grid_model(12, 3);
        let profile = DemandProfile::new(vec![1.0 / 12.0; 12], 1.0, 20.0, 400e3).unwrap();
        let problem = CsoProblem::new(
            &model,
            &profile,
            default_power(),
            UplinkParams::default(),
            1.0,
            ObjectivePair::PowerDispersion,
        );
        let eval = problem.evaluate(&Topology::all_on(3));
        // Power between sleep-everything and max-everything.
        assert!(eval.objectives[0] >= 3.0 * 4.3 && eval.objectives[0] <= 3.0 * 10.8);
        assert!(eval.objectives[1] >= 0.0);
    }

    #[test]
    fn negligible_gain_cell_leaves_capacity_unchanged() {
        // A cell nobody can hear neither serves pixels nor interferes, so
        // switching it on cannot move the capacity metric.
        let mut model = grid_model(12, 3);
        for a in 0..12 {
            model.gain[[a, 2]] = 1e-30;
        }
        let profile = DemandProfile::new(vec![1.0 / 12.0; 12], 0.115, 119.2, 400e3).unwrap();
        let problem = CsoProblem::new(
            &model,
            &profile,
            default_power(),
            UplinkParams::default(),
            0.02,
            ObjectivePair::CellsCapacity,
        );
        let without = problem.capacity(&Topology::from_bitstring("110").unwrap());
        let with = problem.capacity(&Topology::from_bitstring("111").unwrap());
        assert!((with - without).abs() / without < 1e-9);
    }

    #[test]
    fn objective_vector_is_consistent_with_pair_evaluation() {
        let model = grid_model(12, 3);
        let profile = DemandProfile::new(vec![1.0 / 12.0; 12], 0.115, 119.2, 400e3).unwrap();
        let problem = CsoProblem::new(
            &model,
            &profile,
            default_power(),
            UplinkParams::default(),
            0.02,
            ObjectivePair::CellsCapacity,
        );
        let topo = Topology::from_bitstring("110").unwrap();
        let vector = problem.objective_vector(&topo, false).unwrap();
        let eval = problem.evaluate(&topo);
        assert_eq!(vector.active_cells as f64, eval.objectives[0]);
        assert_eq!(vector.capacity_bps, eval.objectives[1]);
        assert_eq!(vector.feasible, eval.feasible);
    }
}
