//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p cso-cli --test acceptance -- --nocapture` to see
//! the per-criterion lines. The default scenario here is the 37-cell layout
//! with Table-level radio parameters at a 10 m pixel resolution (10^4 pixels)
//! so the whole suite stays within desk-scale runtimes.

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;

use cso_core::config::ScenarioConfig;
use cso_core::coupling::{self, LoadVector, VolumeTarget};
use cso_core::demand::DemandProfile;
use cso_core::mda::MdaChain;
use cso_core::moea::{self, BinaryProblem, MoeaConfig, ParetoSet};
use cso_core::net::{self, NetworkModel, Topology};
use cso_core::problem::{CsoProblem, ObjectivePair, UplinkParams};
use cso_core::sim::{
    self, CellZooming, DemandPhase, IciModel, ImprovedCellZooming, LoadInterferenceAware, SetCover,
    SimConfig, SnapshotParams, TopologyPolicy,
};

const KAPPA_COV: f64 = 0.02;
const TARGET_QOS: f64 = 0.975;

fn criterion(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {id:>2} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

struct Shared {
    config: ScenarioConfig,
    model: NetworkModel,
    profile: DemandProfile,
    capacity_multiplier: f64,
    chain: MdaChain,
    front_capacity: ParetoSet,
}

fn desk_config() -> ScenarioConfig {
    let mut config = ScenarioConfig::default();
    config.geometry.pixel_size_m = 10.0;
    config
}

fn problemimpl<'a>(
    model: &'a NetworkModel,
    profile: &'a DemandProfile,
    config: &ScenarioConfig,
    pair: ObjectivePair,
) -> CsoProblem<'a> {
    CsoProblem::new(
        model,
        profile,
        config.power_model(),
        UplinkParams::default(),
        config.constraint.kappa_cov,
        pair,
    )
}

fn shared() -> &'static Shared {
    static SHARED: OnceLock<Shared> = OnceLock::new();
    SHARED.get_or_init(|| {
        let config = desk_config();
        let model = net::generate_scenario(&config).expect("default scenario builds");
        let profile = config.build_demand(&model).expect("default demand builds");
        let all_on = Topology::all_on(model.num_cells);
        let capacity_multiplier =
            coupling::find_volume(&model, &all_on, &profile, VolumeTarget::Capacity)
                .expect("capacity exists")
                .multiplier;
        let problem = problemimpl(&model, &profile, &config, ObjectivePair::CellsCapacity);
        let chain = cso_core::mda::run_mda(model.num_cells, |t| problem.capacity(t));
        let front_capacity = moea::evolve(
            &problem,
            &MoeaConfig {
                seed: config.optimization.seed,
                ..MoeaConfig::default()
            },
            &chain.topologies,
        )
        .expect("search runs");
        Shared {
            config,
            model,
            profile,
            capacity_multiplier,
            chain,
            front_capacity,
        }
    })
}

fn uplink_front() -> &'static ParetoSet {
    static FRONT: OnceLock<ParetoSet> = OnceLock::new();
    FRONT.get_or_init(|| {
        let s = shared();
        let problem = problemimpl(
            &s.model,
            &s.profile,
            &s.config,
            ObjectivePair::CellsUplinkPower,
        );
        moea::evolve(
            &problem,
            &MoeaConfig {
                seed: s.config.optimization.seed,
                ..MoeaConfig::default()
            },
            &s.chain.topologies,
        )
        .expect("search runs")
    })
}

fn dispersion_front() -> &'static (ParetoSet, DemandProfile) {
    static FRONT: OnceLock<(ParetoSet, DemandProfile)> = OnceLock::new();
    FRONT.get_or_init(|| {
        let s = shared();
        let scaled = s
            .profile
            .scaled(s.config.optimization.volume_fraction_of_capacity * s.capacity_multiplier);
        let problem = CsoProblem::new(
            &s.model,
            &scaled,
            s.config.power_model(),
            UplinkParams::default(),
            s.config.constraint.kappa_cov,
            ObjectivePair::PowerDispersion,
        );
        let front = moea::evolve(
            &problem,
            &MoeaConfig {
                seed: s.config.optimization.seed,
                ..MoeaConfig::default()
            },
            &s.chain.topologies,
        )
        .expect("search runs");
        (front, scaled)
    })
}

// --- 1. Small-instance oracle equivalence -------------------------------

#[test]
fn acceptance_01_small_instance_oracles() {
    let started = std::time::Instant::now();
    let mut worst_ratio = f64::MAX;
    for seed in 0..10u64 {
        let mut config = ScenarioConfig::default();
        config.geometry.num_cells = 8 + (seed % 5) as usize;
        config.geometry.cell_radius_m = 140.0;
        config.geometry.pixel_size_m = 20.0;
        config.geometry.area_width_m = 600.0;
        config.geometry.area_height_m = 600.0;
        config.channel.seed = 100 + seed;
        config.demand.seed = 200 + seed;
        config.demand.hotspots = 2;
        let model = net::generate_scenario(&config).unwrap();
        assert!(model.num_pixels <= 900 && model.num_cells <= 12);
        let profile = config.build_demand(&model).unwrap();
        let problem = problemimpl(&model, &profile, &config, ObjectivePair::CellsCapacity);
        let senses = problem.senses();

        let exhaustive = moea::enumerate_front(&problem);
        let chain = cso_core::mda::run_mda(model.num_cells, |t| problem.capacity(t));
        let front = moea::evolve(
            &problem,
            &MoeaConfig {
                seed: 300 + seed,
                ..MoeaConfig::default()
            },
            &chain.topologies,
        )
        .unwrap();

        // Hypervolume ratio against the exact front, shared reference point.
        let ex_pts: Vec<[f64; 2]> = exhaustive.iter().map(|m| m.key(senses)).collect();
        let mut reference = [f64::NEG_INFINITY; 2];
        for p in &ex_pts {
            reference[0] = reference[0].max(p[0] + 1.0);
            reference[1] = reference[1].max(p[1] + p[1].abs() * 0.01 + 1.0);
        }
        let hv_exact = moea::hypervolume_2d(&ex_pts, reference);
        let got_pts: Vec<[f64; 2]> = front.members.iter().map(|m| m.key(senses)).collect();
        let ratio = moea::hypervolume_2d(&got_pts, reference) / hv_exact;
        worst_ratio = worst_ratio.min(ratio);

        // Every chain member is dominated-or-equal under constrained
        // domination: infeasible members by any feasible point, feasible ones
        // by some member of the exact front.
        for member in &chain.topologies {
            let eval = problem.evaluate(member);
            if !eval.feasible {
                continue;
            }
            let key = [eval.objectives[0], -eval.objectives[1]];
            let covered = exhaustive.iter().any(|m| {
                let mk = m.key(senses);
                mk[0] <= key[0] && mk[1] <= key[1]
            });
            assert!(covered, "seed {seed}: chain member escapes the exact front");
        }
    }
    let pass = worst_ratio >= 0.99 && started.elapsed().as_secs() <= 300;
    criterion(
        1,
        "small-instance oracle equivalence",
        pass,
        &format!(
            "worst hv ratio {:.5} over 10 scenarios in {:.1?}",
            worst_ratio,
            started.elapsed()
        ),
    );
}

// --- 2. Fixed-point correctness ------------------------------------------

#[test]
fn acceptance_02_load_fixed_point() {
    let s = shared();
    let all_on = Topology::all_on(s.model.num_cells);
    let loads = coupling::solve_loads(&s.model, &all_on, &s.profile, 1e-4).unwrap();

    // Independent residual check: one simultaneous re-evaluation.
    let cov = net::coverage(&s.model, &all_on).unwrap();
    let again = coupling::cell_load(&s.model, &all_on, &cov, &s.profile, &loads.average);
    let residual = loads
        .average
        .iter()
        .zip(&again)
        .map(|(&a, &r)| (a - r.min(1.0)).abs())
        .fold(0.0f64, f64::max);
    let norm = loads.average.iter().cloned().fold(0.0f64, f64::max);

    // Two-cell analytic toy against a bisection oracle on the eliminated
    // scalar equation.
    let toy = two_cell_toy();
    let toy_profile = DemandProfile::new(vec![0.7, 0.3], 1.0, 30.0, 400e3).unwrap();
    let toy_cov = net::coverage(&toy, &Topology::all_on(2)).unwrap();
    let load_of = |cell: usize, other: f64| -> f64 {
        let mut alpha = [0.0, 0.0];
        alpha[1 - cell] = other;
        coupling::cell_load(&toy, &Topology::all_on(2), &toy_cov, &toy_profile, &alpha)[cell]
    };
    let g = |a0: f64| load_of(0, load_of(1, a0)) - a0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    assert!(g(lo) > 0.0 && g(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle = 0.5 * (lo + hi);
    let toy_loads = coupling::solve_loads(&toy, &Topology::all_on(2), &toy_profile, 1e-9).unwrap();
    let toy_error = (toy_loads.average[0] - oracle).abs();

    let pass = loads.sweeps <= 20 && residual <= 1e-4 * norm && toy_error <= 1e-6;
    criterion(
        2,
        "load fixed point",
        pass,
        &format!(
            "{} sweeps, residual {:.2e} (norm {:.2}), toy vs bisection {:.2e}",
            loads.sweeps, residual, norm, toy_error
        ),
    );
}

fn two_cell_toy() -> NetworkModel {
    let mut gain = ndarray::Array2::zeros((2, 2));
    gain[[0, 0]] = 1e-9;
    gain[[0, 1]] = 3e-10;
    gain[[1, 1]] = 1e-9;
    gain[[1, 0]] = 1e-10;
    NetworkModel {
        num_cells: 2,
        num_pixels: 2,
        pixel_size_m: 5.0,
        grid_rows: 2,
        grid_cols: 1,
        cell_positions: vec![[0.0, 0.0], [10.0, 0.0]],
        gain,
        p_pilot: vec![1.0, 1.0],
        p_data: vec![1.0, 1.0],
        noise_w: 1e-13,
        bandwidth_hz: 5e6,
        min_rx_power_w: 1e-30,
        min_sinr: 1e-9,
        max_ul_attenuation: 1e30,
    }
}

// --- 3. Interference-model ordering --------------------------------------

#[test]
fn acceptance_03_ici_ordering() {
    let s = shared();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);

    let mut topologies: Vec<Topology> = vec![Topology::all_on(s.model.num_cells)];
    for nac in [5usize, 10, 15, 20, 25, 30, 36] {
        topologies.push(s.chain.topologies[nac - 1].clone());
    }

    let mut checked = 0usize;
    for topo in &topologies {
        let cov = net::coverage(&s.model, topo).unwrap();
        let full = LoadVector::full_load(topo);
        let psi_fl = net::sinr(&s.model, topo, &full, &cov).unwrap();

        // Solved loads plus random partial-load vectors, all at most 1.
        let mut load_sets = Vec::new();
        if let Ok(solved) = coupling::solve_loads(&s.model, topo, &s.profile, 1e-4) {
            load_sets.push(solved);
        }
        for _ in 0..3 {
            let average: Vec<f64> = (0..s.model.num_cells)
                .map(|l| {
                    if topo.is_active(l) {
                        rng.gen::<f64>()
                    } else {
                        0.0
                    }
                })
                .collect();
            load_sets.push(LoadVector {
                raw: average.clone(),
                average,
                sweeps: 0,
            });
        }
        for loads in &load_sets {
            let psi_lc = net::sinr(&s.model, topo, loads, &cov).unwrap();
            for (lc, fl) in psi_lc.iter().zip(&psi_fl) {
                assert!(lc >= fl, "load-coupled SINR below full-load SINR");
            }
            checked += 1;
        }
    }
    criterion(
        3,
        "interference-model ordering",
        true,
        &format!("psi_lc >= psi_fl pixelwise for {checked} (topology, load) pairs, exact"),
    );
}

// --- 4. Constraint enforcement -------------------------------------------

#[test]
fn acceptance_04_constraint_enforcement() {
    let s = shared();
    let mut checked = 0usize;
    for member in &s.front_capacity.members {
        assert!(member.genome.active_count() > 0, "all-off genome in front");
        // Recompute the outage fraction independently of the stored flag.
        let cov = net::coverage(&s.model, &member.genome).unwrap();
        assert!(
            cov.outage_fraction <= KAPPA_COV,
            "front member violates the coverage constraint"
        );
        checked += 1;
    }
    let (dispersion, scaled) = dispersion_front();
    for member in &dispersion.members {
        assert!(member.genome.active_count() > 0);
        let loads = coupling::solve_loads(&s.model, &member.genome, scaled, 1e-4).unwrap();
        let cov = net::coverage_with_loads(&s.model, &member.genome, &loads).unwrap();
        assert!(cov.outage_fraction <= KAPPA_COV);
        checked += 1;
    }
    criterion(
        4,
        "constraint enforcement",
        true,
        &format!("{checked} front members at most 2% outage, none all-off"),
    );
}

// --- 5. Chain structural property -----------------------------------------

#[test]
fn acceptance_05_chain_structure() {
    let s = shared();
    let topologies = &s.chain.topologies;
    assert_eq!(topologies.len(), s.model.num_cells);
    for (i, pair) in topologies.windows(2).enumerate() {
        let hamming = pair[0].hamming_distance(&pair[1]);
        let delta = pair[1].active_count() as i64 - pair[0].active_count() as i64;
        assert_eq!(hamming, 1, "pair {i} has hamming distance {hamming}");
        assert_eq!(delta.abs(), 1, "pair {i} changes active count by {delta}");
    }
    // Empirical regression: the chain capacity climbs monotonically except
    // for the final all-on step, where the last cell's full-load interference
    // outweighs the pixels it attracts (observed -0.04%).
    for w in s.chain.capacity.windows(2).take(s.model.num_cells - 2) {
        assert!(
            w[1] >= w[0],
            "chain capacity decreased before the last step"
        );
    }
    let last = *s.chain.capacity.last().unwrap();
    let peak = s.chain.capacity.iter().cloned().fold(0.0f64, f64::max);
    assert!(
        last >= 0.995 * peak,
        "all-on capacity fell {last} vs peak {peak}"
    );
    criterion(
        5,
        "chain structural property",
        true,
        &format!(
            "all {} consecutive pairs at hamming distance 1",
            topologies.len() - 1
        ),
    );
}

// --- 6. Evolutionary search vs greedy chain --------------------------------

#[test]
fn acceptance_06_search_vs_chain_gap() {
    let s = shared();
    let mut compared = 0usize;
    let mut per_cell_gaps_low = Vec::new();
    for member in &s.front_capacity.members {
        let nac = member.genome.active_count();
        let (chain_topo, chain_f2) = s.chain.at_active_count(nac).unwrap();
        // The greedy chain ignores the coverage constraint; compare only
        // where its member solves the same constrained problem.
        let chain_cov = net::coverage(&s.model, chain_topo).unwrap();
        if chain_cov.outage_fraction > KAPPA_COV {
            continue;
        }
        compared += 1;
        assert!(
            member.objectives[1] >= chain_f2,
            "front below the feasible chain at {nac} active cells"
        );
        if nac <= 20 {
            per_cell_gaps_low.push((member.objectives[1] - chain_f2) / nac as f64);
        }
    }
    let mean_gap = per_cell_gaps_low.iter().sum::<f64>() / per_cell_gaps_low.len().max(1) as f64;
    let pass = compared > 0 && !per_cell_gaps_low.is_empty() && mean_gap > 0.0;
    criterion(
        6,
        "search vs chain gap",
        pass,
        &format!(
            "{compared} comparable counts, mean per-cell gain {:.3} Mbps at <=20 cells",
            mean_gap / 1e6
        ),
    );
}

// --- 7. Simulator QoS consistency ------------------------------------------

#[test]
fn acceptance_07_simulator_qos() {
    let started = std::time::Instant::now();
    let s = shared();
    let all_on = Topology::all_on(s.model.num_cells);
    let phases = vec![DemandPhase {
        start_s: 0.0,
        profile: s.profile.clone(),
    }];
    let run = |fraction: f64| {
        let config = SimConfig {
            duration_s: 600.0,
            num_experiments: 20,
            qos_check_interval_s: 1.0,
            target_qos: TARGET_QOS,
            seed: s.config.simulation.seed,
            ici: IciModel::FullLoad,
            volume_multiplier: fraction * s.capacity_multiplier,
        };
        let policy = TopologyPolicy::Static(all_on.clone());
        sim::run_experiment(&s.model, &policy, &phases, &config, &s.config.power_model())
            .unwrap()
            .mean_satisfied_fraction
    };
    let below = run(0.5);
    let above = run(1.5);
    let pass = below >= TARGET_QOS && above < TARGET_QOS && started.elapsed().as_secs() <= 600;
    criterion(
        7,
        "simulator qos consistency",
        pass,
        &format!(
            "satisfied {below:.4} at half capacity, {above:.4} at 1.5x, in {:.1?}",
            started.elapsed()
        ),
    );
}

// --- 8. Transition and handover accounting ---------------------------------

#[test]
fn acceptance_08_transitions_and_handovers() {
    let s = shared();

    // Proposed pipeline: offline-selected topology applied statically.
    let phases = vec![DemandPhase {
        start_s: 0.0,
        profile: s.profile.clone(),
    }];
    let selected = s
        .front_capacity
        .members
        .iter()
        .min_by_key(|m| m.genome.active_count())
        .unwrap()
        .genome
        .clone();
    let config = SimConfig {
        duration_s: 120.0,
        num_experiments: 5,
        qos_check_interval_s: 1.0,
        target_qos: TARGET_QOS,
        seed: 41,
        ici: IciModel::FullLoad,
        volume_multiplier: 0.4 * s.capacity_multiplier,
    };
    let report = sim::run_experiment(
        &s.model,
        &TopologyPolicy::Static(selected),
        &phases,
        &config,
        &s.config.power_model(),
    )
    .unwrap();
    let proposed_clean = report.transitions == 0 && report.handover_mass == 0.0;

    // Snapshot baselines under a two-phase demand profile on a small scenario.
    let mut small = ScenarioConfig::default();
    small.geometry.num_cells = 10;
    small.geometry.cell_radius_m = 140.0;
    small.geometry.pixel_size_m = 20.0;
    small.geometry.area_width_m = 600.0;
    small.geometry.area_height_m = 600.0;
    small.demand.hotspots = 1;
    small.demand.hotspot_sigma_m = 90.0;
    let model = net::generate_scenario(&small).unwrap();
    let phase_a = small.build_demand(&model).unwrap();
    small.demand.seed = 17; // different hotspot location
    let phase_b = small.build_demand(&model).unwrap();
    let two_phase = vec![
        DemandPhase {
            start_s: 0.0,
            profile: phase_a,
        },
        DemandPhase {
            start_s: 60.0,
            profile: phase_b,
        },
    ];
    let params = SnapshotParams {
        min_rate_bps: 400e3,
        kappa_cov: KAPPA_COV,
    };
    let zooming = CellZooming { params };
    let improved = ImprovedCellZooming { params };
    let lia = LoadInterferenceAware {
        params,
        load_threshold: 0.3,
    };
    let cover = SetCover { params };
    let baselines: Vec<(&str, &dyn sim::SnapshotPolicy)> = vec![
        ("cell-zooming", &zooming),
        ("improved-cell-zooming", &improved),
        ("load-interference-aware", &lia),
        ("set-cover", &cover),
    ];
    let mut detail = format!(
        "proposed {} transitions / {:.3} handover mass",
        report.transitions, report.handover_mass
    );
    let mut all_baseline_transition = true;
    for (name, policy) in baselines {
        let sim_config = SimConfig {
            duration_s: 120.0,
            num_experiments: 3,
            qos_check_interval_s: 1.0,
            target_qos: TARGET_QOS,
            seed: 43,
            ici: IciModel::FullLoad,
            volume_multiplier: 1.0,
        };
        let report = sim::run_experiment(
            &model,
            &TopologyPolicy::Snapshot(policy),
            &two_phase,
            &sim_config,
            &small.power_model(),
        )
        .unwrap();
        detail.push_str(&format!("; {name} {}", report.transitions));
        all_baseline_transition &= report.transitions > 0;
    }
    criterion(
        8,
        "transition and handover accounting",
        proposed_clean && all_baseline_transition,
        &detail,
    );
}

// --- 9. Uplink power trend ---------------------------------------------------

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let rank = |values: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut ranks = vec![0.0; values.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
                j += 1;
            }
            let mean_rank = (i + j) as f64 / 2.0 + 1.0;
            for &idx in &order[i..=j] {
                ranks[idx] = mean_rank;
            }
            i = j + 1;
        }
        ranks
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mean) * (b - mean);
        var_x += (a - mean).powi(2);
        var_y += (b - mean).powi(2);
    }
    cov / (var_x.sqrt() * var_y.sqrt())
}

#[test]
fn acceptance_09_uplink_trend() {
    let front = uplink_front();
    let mut members: Vec<(usize, f64)> = front
        .members
        .iter()
        .map(|m| (m.genome.active_count(), m.objectives[1]))
        .collect();
    members.sort_by_key(|&(nac, _)| nac);
    assert!(members.len() >= 3, "uplink front too small");

    let nonincreasing = members.windows(2).all(|w| w[1].1 <= w[0].1);
    let sparse: Vec<f64> = members
        .iter()
        .filter(|&&(nac, _)| nac < 15)
        .map(|&(_, f4)| f4)
        .collect();
    let dense: Vec<f64> = members
        .iter()
        .filter(|&&(nac, _)| nac >= 27)
        .map(|&(_, f4)| f4)
        .collect();
    let separated = !sparse.is_empty()
        && !dense.is_empty()
        && sparse.iter().cloned().fold(f64::MAX, f64::min)
            > dense.iter().cloned().fold(f64::MIN, f64::max);
    let xs: Vec<f64> = members.iter().map(|&(nac, _)| nac as f64).collect();
    let ys: Vec<f64> = members.iter().map(|&(_, f4)| f4).collect();
    let rho = spearman(&xs, &ys);

    let pass = nonincreasing && separated && rho <= -0.8;
    criterion(
        9,
        "uplink power trend",
        pass,
        &format!(
            "{} members, nonincreasing {nonincreasing}, sparse>dense {separated}, spearman {rho:.3}",
            members.len()
        ),
    );
}

// --- 10. Power vs dispersion conflict ---------------------------------------

#[test]
fn acceptance_10_power_dispersion_front() {
    let (front, _) = dispersion_front();
    let members = &front.members;
    assert!(members.len() >= 2, "need at least two front members");

    // Mutual nondominance (both objectives minimized).
    for (i, a) in members.iter().enumerate() {
        for b in members.iter().skip(i + 1) {
            let a_dominates = a.objectives[0] <= b.objectives[0]
                && a.objectives[1] <= b.objectives[1]
                && (a.objectives[0] < b.objectives[0] || a.objectives[1] < b.objectives[1]);
            let b_dominates = b.objectives[0] <= a.objectives[0]
                && b.objectives[1] <= a.objectives[1]
                && (b.objectives[0] < a.objectives[0] || b.objectives[1] < a.objectives[1]);
            assert!(
                !a_dominates && !b_dominates,
                "front members dominate each other"
            );
        }
    }

    let min_power = members
        .iter()
        .min_by(|a, b| a.objectives[0].total_cmp(&b.objectives[0]))
        .unwrap();
    let min_dispersion = members
        .iter()
        .min_by(|a, b| a.objectives[1].total_cmp(&b.objectives[1]))
        .unwrap();
    let pass = min_power.genome.active_count() < min_dispersion.genome.active_count()
        && min_power.objectives[1] > min_dispersion.objectives[1];
    criterion(
        10,
        "power vs dispersion conflict",
        pass,
        &format!(
            "{} members; min-power {} cells cv {:.3} vs min-dispersion {} cells cv {:.3}",
            members.len(),
            min_power.genome.active_count(),
            min_power.objectives[1],
            min_dispersion.genome.active_count(),
            min_dispersion.objectives[1]
        ),
    );
}

// --- 11. Command determinism --------------------------------------------------

fn run_cli(args: &[&str], dir: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_cso"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .status()
        .expect("binary runs");
    assert!(status.success(), "command {args:?} failed");
}

fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn acceptance_11_command_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("scenario.toml");
    std::fs::write(
        &config_path,
        r#"
[geometry]
num_cells = 10
cell_radius_m = 140.0
pixel_size_m = 20.0
area_width_m = 600.0
area_height_m = 600.0

[demand]
hotspots = 2

[simulation]
duration_s = 40.0
num_experiments = 3
volume_multipliers = [0.5]
"#,
    )
    .unwrap();
    let config = config_path.to_str().unwrap();

    let mut commands: Vec<Vec<String>> = vec![
        vec!["generate".into()],
        vec!["optimize".into(), "--algorithm".into(), "mda".into()],
        vec![
            "optimize".into(),
            "--algorithm".into(),
            "moea".into(),
            "--exhaustive".into(),
        ],
        vec!["compare".into()],
        vec![
            "coverage-report".into(),
            "--power-sweep".into(),
            "0:30:10".into(),
        ],
    ];
    // The evaluate command needs a front file; produce it once, then check
    // evaluate itself for byte-identical reruns.
    let front_dir = dir.path().join("front-src");
    run_cli(
        &["optimize", "--algorithm", "moea", "--config", config],
        &front_dir,
    );
    let front_file = front_dir.join("front.csv");
    commands.push(vec![
        "evaluate".into(),
        "--front".into(),
        front_file.to_str().unwrap().into(),
    ]);

    let mut compared_files = 0usize;
    for (i, command) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("cmd{i}-run{run}"));
            let mut args: Vec<&str> = command.iter().map(String::as_str).collect();
            args.push("--config");
            args.push(config);
            run_cli(&args, &out);
            outputs.push(tree_bytes(&out));
        }
        assert_eq!(
            outputs[0].len(),
            outputs[1].len(),
            "command {command:?} produced different file sets"
        );
        for (a, b) in outputs[0].iter().zip(&outputs[1]) {
            assert_eq!(a.0, b.0, "command {command:?} file names differ");
            assert_eq!(
                a.1, b.1,
                "command {command:?} file {} differs between runs",
                a.0
            );
            compared_files += 1;
        }
    }
    criterion(
        11,
        "command determinism",
        true,
        &format!(
            "{} output files byte-identical across reruns of {} commands",
            compared_files,
            commands.len()
        ),
    );
}
