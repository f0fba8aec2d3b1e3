//! Elitist multiobjective search over binary topologies.
//!
//! Nondominated sorting with crowding distance, binary tournaments, uniform
//! crossover, per-gene bit-flip mutation, and mu+lambda survival. Feasible
//! rank-0 individuals accumulate in an external archive whose hypervolume
//! drives termination. Constraint handling follows constrained domination:
//! feasible beats infeasible, infeasibles compare by outage fraction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::net::Topology;

/// Optimization direction of one objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Raw objective values and constraint status for one genome.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objectives: [f64; 2],
    pub feasible: bool,
    pub outage_fraction: f64,
}

/// A two-objective problem over fixed-length binary genomes.
pub trait BinaryProblem: Sync {
    fn genome_len(&self) -> usize;
    fn evaluate(&self, topo: &Topology) -> Evaluation;
    fn senses(&self) -> [Sense; 2];
}

/// Population member with its evaluation and NSGA bookkeeping.
#[derive(Debug, Clone)]
pub struct Individual {
    pub genome: Topology,
    pub objectives: [f64; 2],
    pub feasible: bool,
    pub outage_fraction: f64,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    fn from_evaluation(genome: Topology, eval: Evaluation) -> Self {
        Individual {
            genome,
            objectives: eval.objectives,
            feasible: eval.feasible,
            outage_fraction: eval.outage_fraction,
            rank: 0,
            crowding: 0.0,
        }
    }

    /// Objectives mapped to minimization space.
    pub fn key(&self, senses: [Sense; 2]) -> [f64; 2] {
        let mut k = self.objectives;
        for (v, s) in k.iter_mut().zip(senses) {
            if s == Sense::Maximize {
                *v = -*v;
            }
        }
        k
    }
}

/// Search parameters. Probabilities follow the discrete-genome calibration:
/// always crossover, one expected mutation per genome.
#[derive(Debug, Clone)]
pub struct MoeaConfig {
    pub population_size: usize,
    pub crossover_prob: f64,
    /// Per-gene flip probability; `None` means 1/L.
    pub mutation_prob: Option<f64>,
    /// Relative hypervolume gain under which a generation counts as stalled.
    pub hv_threshold: f64,
    /// Consecutive stalled generations before stopping.
    pub hv_patience: usize,
    /// Hard generation cap.
    pub max_generations: usize,
    pub seed: u64,
}

impl Default for MoeaConfig {
    fn default() -> Self {
        MoeaConfig {
            population_size: 100,
            crossover_prob: 1.0,
            mutation_prob: None,
            hv_threshold: 1e-5,
            hv_patience: 20,
            max_generations: 500,
            seed: 0,
        }
    }
}

/// Final nondominated set plus run statistics.
#[derive(Debug, Clone)]
pub struct ParetoSet {
    /// Feasible, mutually nondominated, deduplicated by genome, sorted by
    /// the first objective in minimization order.
    pub members: Vec<Individual>,
    pub generations: usize,
    pub evaluations: usize,
    pub final_hypervolume: f64,
    /// Hypervolume reference point in minimization space.
    pub reference: Option<[f64; 2]>,
}

/// True when `a` constrained-dominates `b` in minimization space.
fn dominates(a: &Individual, b: &Individual, senses: [Sense; 2]) -> bool {
    match (a.feasible, b.feasible) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.outage_fraction < b.outage_fraction,
        (true, true) => {
            let ka = a.key(senses);
            let kb = b.key(senses);
            ka[0] <= kb[0] && ka[1] <= kb[1] && (ka[0] < kb[0] || ka[1] < kb[1])
        }
    }
}

/// Partitions a population into fronts F0, F1, ... such that nobody in a
/// front is dominated by a member of the same or a later front.
pub fn nondominated_sort(population: &[Individual], senses: [Sense; 2]) -> Vec<Vec<usize>> {
    let n = population.len();
    let mut dominated_by: Vec<usize> = vec![0; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&population[i], &population[j], senses) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&population[j], &population[i], senses) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// Crowding distance of each front member: per-objective normalized cuboid
/// side sums, boundaries at infinity.
pub fn crowding_distance(objectives: &[[f64; 2]]) -> Vec<f64> {
    let n = objectives.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut distance = vec![0.0; n];
    for m in 0..2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| objectives[a][m].total_cmp(&objectives[b][m]));
        let min = objectives[order[0]][m];
        let max = objectives[order[n - 1]][m];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = max - min;
        if range <= 0.0 {
            continue;
        }
        for w in 1..(n - 1) {
            let spread = objectives[order[w + 1]][m] - objectives[order[w - 1]][m];
            distance[order[w]] += spread / range;
        }
    }
    distance
}

/// Exact dominated area of a 2-D front (minimization) against a reference
/// point. Points at or beyond the reference in any coordinate are clipped out.
pub fn hypervolume_2d(points: &[[f64; 2]], reference: [f64; 2]) -> f64 {
    let mut inside: Vec<[f64; 2]> = points
        .iter()
        .copied()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .collect();
    if inside.is_empty() {
        return 0.0;
    }
    inside.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut volume = 0.0;
    let mut ceiling = reference[1];
    for p in inside {
        if p[1] < ceiling {
            volume += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    volume
}

fn assign_rank_and_crowding(population: &mut [Individual], senses: [Sense; 2]) {
    let fronts = nondominated_sort(population, senses);
    for (rank, front) in fronts.iter().enumerate() {
        let objs: Vec<[f64; 2]> = front.iter().map(|&i| population[i].key(senses)).collect();
        let crowd = crowding_distance(&objs);
        for (&i, &c) in front.iter().zip(&crowd) {
            population[i].rank = rank;
            population[i].crowding = c;
        }
    }
}

/// Crowded-comparison winner of a binary tournament.
fn tournament<'a>(rng: &mut ChaCha8Rng, population: &'a [Individual]) -> &'a Individual {
    let a = &population[rng.gen_range(0..population.len())];
    let b = &population[rng.gen_range(0..population.len())];
    if a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding) {
        a
    } else {
        b
    }
}

/// Activates one uniformly random cell in an all-zero genome.
fn repair(genome: &mut Topology, rng: &mut ChaCha8Rng) {
    if genome.active_count() == 0 {
        let cell = rng.gen_range(0..genome.len());
        genome.set(cell, true);
    }
}

fn evaluate_all(problem: &impl BinaryProblem, genomes: Vec<Topology>) -> Vec<Individual> {
    genomes
        .into_par_iter()
        .map(|g| {
            let eval = problem.evaluate(&g);
            Individual::from_evaluation(g, eval)
        })
        .collect()
}

/// Merges feasible candidates into the nondominated archive, deduplicating by
/// genome and pruning anything dominated.
fn merge_archive(archive: &mut Vec<Individual>, candidates: &[Individual], senses: [Sense; 2]) {
    for cand in candidates.iter().filter(|c| c.feasible) {
        if archive.iter().any(|m| m.genome == cand.genome) {
            continue;
        }
        if archive.iter().any(|m| dominates(m, cand, senses)) {
            continue;
        }
        archive.retain(|m| !dominates(cand, m, senses));
        archive.push(cand.clone());
    }
}

/// Runs the evolutionary search. `initial` genomes are injected into the
/// first population (truncated to the population size); the rest is sampled
/// uniformly at random. Returns the archive of feasible nondominated
/// solutions.
pub fn evolve(
    problem: &impl BinaryProblem,
    config: &MoeaConfig,
    initial: &[Topology],
) -> Result<ParetoSet> {
    let genome_len = problem.genome_len();
    let pop_size = config.population_size;
    if pop_size < 4 || pop_size % 2 != 0 {
        return Err(Error::Config(
            "population size must be even and >= 4".into(),
        ));
    }
    let senses = problem.senses();
    let mutation_prob = config.mutation_prob.unwrap_or(1.0 / genome_len as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut genomes: Vec<Topology> = initial.iter().take(pop_size).cloned().collect();
    while genomes.len() < pop_size {
        let mut g = Topology::new((0..genome_len).map(|_| rng.gen_bool(0.5)).collect());
        repair(&mut g, &mut rng);
        genomes.push(g);
    }
    for g in &genomes {
        if g.len() != genome_len {
            return Err(Error::Dimension(
                "seed genome length != problem genome length".into(),
            ));
        }
        if g.active_count() == 0 {
            return Err(Error::Config("seed genome is all zero".into()));
        }
    }

    let mut population = evaluate_all(problem, genomes);
    let mut evaluations = pop_size;
    assign_rank_and_crowding(&mut population, senses);

    let mut archive: Vec<Individual> = Vec::new();
    merge_archive(&mut archive, &population, senses);

    // The reference point is the nadir of the first feasible generation,
    // fixed for the rest of the run so relative gains stay comparable.
    let mut reference: Option<[f64; 2]> = nadir(&population, senses);
    let mut hypervolume = current_hypervolume(&archive, reference, senses);
    let mut stalled = 0;
    let mut generations = 0;

    while generations < config.max_generations {
        generations += 1;

        let mut offspring_genomes = Vec::with_capacity(pop_size);
        while offspring_genomes.len() < pop_size {
            let p1 = tournament(&mut rng, &population).genome.clone();
            let p2 = tournament(&mut rng, &population).genome.clone();
            let (mut c1, mut c2) = (p1, p2);
            if rng.gen_bool(config.crossover_prob) {
                // Uniform crossover: each gene swaps sides with probability 1/2.
                for l in 0..genome_len {
                    if rng.gen_bool(0.5) {
                        let (a, b) = (c1.is_active(l), c2.is_active(l));
                        c1.set(l, b);
                        c2.set(l, a);
                    }
                }
            }
            for c in [&mut c1, &mut c2] {
                for l in 0..genome_len {
                    if rng.gen_bool(mutation_prob) {
                        c.set(l, !c.is_active(l));
                    }
                }
                repair(c, &mut rng);
            }
            offspring_genomes.push(c1);
            if offspring_genomes.len() < pop_size {
                offspring_genomes.push(c2);
            }
        }

        let offspring = evaluate_all(problem, offspring_genomes);
        evaluations += pop_size;

        let mut combined = population;
        combined.extend(offspring);
        assign_rank_and_crowding(&mut combined, senses);
        merge_archive(&mut archive, &combined, senses);

        // mu+lambda survival: whole fronts, last one by crowding.
        let fronts = nondominated_sort(&combined, senses);
        let mut survivors: Vec<Individual> = Vec::with_capacity(pop_size);
        for front in fronts {
            if survivors.len() == pop_size {
                break;
            }
            let mut members: Vec<Individual> = front.iter().map(|&i| combined[i].clone()).collect();
            if survivors.len() + members.len() <= pop_size {
                survivors.extend(members);
            } else {
                members.sort_by(|a, b| b.crowding.total_cmp(&a.crowding));
                let take = pop_size - survivors.len();
                survivors.extend(members.into_iter().take(take));
            }
        }
        population = survivors;

        if reference.is_none() {
            reference = nadir(&population, senses);
        }
        let hv = current_hypervolume(&archive, reference, senses);
        let gain = if hypervolume > 0.0 {
            (hv - hypervolume) / hypervolume
        } else if hv > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        hypervolume = hv;
        if gain < config.hv_threshold {
            stalled += 1;
            if stalled >= config.hv_patience {
                break;
            }
        } else {
            stalled = 0;
        }
    }

    archive.sort_by(|a, b| {
        let ka = a.key(senses);
        let kb = b.key(senses);
        ka[0].total_cmp(&kb[0]).then(ka[1].total_cmp(&kb[1]))
    });
    for m in &mut archive {
        m.rank = 0;
    }
    Ok(ParetoSet {
        members: archive,
        generations,
        evaluations,
        final_hypervolume: hypervolume,
        reference,
    })
}

fn nadir(population: &[Individual], senses: [Sense; 2]) -> Option<[f64; 2]> {
    let feasible: Vec<[f64; 2]> = population
        .iter()
        .filter(|i| i.feasible)
        .map(|i| i.key(senses))
        .collect();
    if feasible.is_empty() {
        return None;
    }
    let mut ref_point = [f64::NEG_INFINITY; 2];
    for k in feasible {
        ref_point[0] = ref_point[0].max(k[0]);
        ref_point[1] = ref_point[1].max(k[1]);
    }
    Some(ref_point)
}

fn current_hypervolume(
    archive: &[Individual],
    reference: Option<[f64; 2]>,
    senses: [Sense; 2],
) -> f64 {
    match reference {
        None => 0.0,
        Some(r) => {
            let points: Vec<[f64; 2]> = archive.iter().map(|i| i.key(senses)).collect();
            hypervolume_2d(&points, r)
        }
    }
}

/// Exhaustively evaluates every nonzero topology and returns the feasible
/// nondominated set. Intended for small instances; the CLI guards L <= 20.
pub fn enumerate_front(problem: &impl BinaryProblem) -> Vec<Individual> {
    let genome_len = problem.genome_len();
    assert!(
        genome_len < usize::BITS as usize,
        "genome too long to enumerate"
    );
    let senses = problem.senses();
    let all: Vec<Individual> = (1u64..(1u64 << genome_len))
        .into_par_iter()
        .map(|mask| {
            let genome = Topology::new((0..genome_len).map(|l| mask & (1 << l) != 0).collect());
            let eval = problem.evaluate(&genome);
            Individual::from_evaluation(genome, eval)
        })
        .collect();
    let mut front: Vec<Individual> = Vec::new();
    merge_archive(&mut front, &all, senses);
    front.sort_by(|a, b| {
        let ka = a.key(senses);
        let kb = b.key(senses);
        ka[0].total_cmp(&kb[0]).then(ka[1].total_cmp(&kb[1]))
    });
    front
}
