//! Greedy minimum-distance chain of topologies.
//!
//! Builds one topology per active-cell count, each obtained from the previous
//! by switching on the single cell that most increases the capacity metric.
//! Consecutive chain members therefore differ in exactly one position, which
//! keeps topology changes down to one transition when moving along the chain.

use rayon::prelude::*;

use crate::net::Topology;

/// Ordered chain x_1 .. x_L with the capacity metric of each member.
#[derive(Debug, Clone)]
pub struct MdaChain {
    pub topologies: Vec<Topology>,
    pub capacity: Vec<f64>,
}

impl MdaChain {
    /// Chain member with exactly `active` cells on.
    pub fn at_active_count(&self, active: usize) -> Option<(&Topology, f64)> {
        if active == 0 || active > self.topologies.len() {
            return None;
        }
        Some((&self.topologies[active - 1], self.capacity[active - 1]))
    }
}

/// Runs the greedy chain construction for `num_cells` cells, evaluating
/// candidates with the supplied capacity metric. Candidate evaluations within
/// one step run in parallel; ties break to the lowest cell index. The total
/// number of evaluations is L(L+1)/2.
pub fn run_mda<F>(num_cells: usize, capacity: F) -> MdaChain
where
    F: Fn(&Topology) -> f64 + Sync,
{
    assert!(num_cells >= 1);
    let mut topologies = Vec::with_capacity(num_cells);
    let mut capacities = Vec::with_capacity(num_cells);

    let mut current = Topology::all_off(num_cells);
    for _ in 0..num_cells {
        let candidates: Vec<usize> = (0..num_cells).filter(|&l| !current.is_active(l)).collect();
        let scored: Vec<(usize, f64)> = candidates
            .into_par_iter()
            .map(|l| {
                let mut candidate = current.clone();
                candidate.set(l, true);
                (l, capacity(&candidate))
            })
            .collect();
        // Strictly-greater comparison over ascending indices keeps the
        // lowest index on ties.
        let (best_cell, best_value) = scored
            .into_iter()
            .fold(None::<(usize, f64)>, |acc, (l, v)| match acc {
                Some((_, bv)) if v <= bv => acc,
                _ => Some((l, v)),
            })
            .expect("at least one candidate per step");
        current.set(best_cell, true);
        topologies.push(current.clone());
        capacities.push(best_value);
    }

    MdaChain {
        topologies,
        capacity: capacities,
    }
}
