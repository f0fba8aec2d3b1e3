//! Subcommand implementations.

use std::io::Write;
use std::path::Path;

use serde_json::json;

use cso_core::config::{dbm_to_watts, ScenarioConfig};
use cso_core::coupling::{self, VolumeTarget};
use cso_core::demand::{self, DemandProfile};
use cso_core::error::{Error, Result};
use cso_core::io::{self, FrontRow, RunMetadata};
use cso_core::mda::MdaChain;
use cso_core::moea::{self, MoeaConfig};
use cso_core::net::{self, NetworkModel, Topology};
use cso_core::problem::{CsoProblem, ObjectivePair, UplinkParams};
use cso_core::sim::{
    self, CellZooming, DemandPhase, IciModel, ImprovedCellZooming, LoadInterferenceAware, SetCover,
    SimConfig, SimReport, SnapshotParams, TopologyPolicy, TopologyQos,
};

use crate::{Algorithm, IciArg};

fn build_scenario(config: &ScenarioConfig) -> Result<(NetworkModel, DemandProfile)> {
    let model = net::generate_scenario(config)?;
    let profile = config.build_demand(&model)?;
    Ok((model, profile))
}

fn uplink_params(config: &ScenarioConfig) -> Result<UplinkParams> {
    let domain = match config.power.uplink_domain.as_str() {
        "linear" => cso_core::metrics::UplinkDomain::Linear,
        "db" => cso_core::metrics::UplinkDomain::Decibel,
        other => return Err(Error::Config(format!("unknown uplink domain '{other}'"))),
    };
    Ok(UplinkParams {
        p0: config.power.uplink_p0,
        kappa: config.power.uplink_kappa,
        domain,
    })
}

fn parse_volume_list(arg: Option<&str>, config: &ScenarioConfig) -> Result<Vec<f64>> {
    let volumes = match arg {
        Some(list) => list
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad volume multiplier '{t}'")))
            })
            .collect::<Result<Vec<f64>>>()?,
        None => config.simulation.volume_multipliers.clone(),
    };
    if volumes.is_empty() || volumes.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Config(
            "volume multipliers must be nonnegative".into(),
        ));
    }
    Ok(volumes)
}

fn ici_model(arg: Option<IciArg>, config: &ScenarioConfig) -> Result<IciModel> {
    match arg {
        Some(IciArg::Fl) => Ok(IciModel::FullLoad),
        Some(IciArg::Lc) => Ok(IciModel::LoadCoupling),
        None => match config.simulation.ici.as_str() {
            "fl" => Ok(IciModel::FullLoad),
            "lc" => Ok(IciModel::LoadCoupling),
            other => Err(Error::Config(format!("unknown ici model '{other}'"))),
        },
    }
}

/// Demand multiplier at which the all-on network reaches capacity; used to
/// express command-line volumes as fractions of it.
fn capacity_multiplier(model: &NetworkModel, profile: &DemandProfile) -> Result<f64> {
    let all_on = Topology::all_on(model.num_cells);
    let cap = coupling::find_volume(model, &all_on, profile, VolumeTarget::Capacity)?;
    Ok(cap.multiplier)
}

/// No topology can cover what the all-on pattern cannot reach on pilot power
/// and uplink budget alone.
fn ensure_coverable(model: &NetworkModel, kappa_cov: f64) -> Result<()> {
    let all_on = Topology::all_on(model.num_cells);
    let floor = net::power_limited_outage_fraction(model, &all_on)?;
    if floor > kappa_cov {
        return Err(Error::Infeasible(format!(
            "even with every cell active, {:.2}% of pixels are power-limited \
             (allowed outage {:.2}%)",
            floor * 100.0,
            kappa_cov * 100.0
        )));
    }
    Ok(())
}

pub fn generate(config: &ScenarioConfig, out: &Path) -> Result<()> {
    let (model, profile) = build_scenario(config)?;
    io::save_gain_matrix(out.join("gain.txt"), &model)?;
    demand::save_demand_grid(
        out.join("demand.txt"),
        model.grid_rows,
        model.grid_cols,
        &profile.pixel_probability,
    )?;

    let all_on = Topology::all_on(model.num_cells);
    let cov = net::coverage(&model, &all_on)?;
    let summary = json!({
        "config_hash": config.hash(),
        "seed": config.channel.seed,
        "num_cells": model.num_cells,
        "num_pixels": model.num_pixels,
        "grid_rows": model.grid_rows,
        "grid_cols": model.grid_cols,
        "pixel_size_m": model.pixel_size_m,
        "demand_kl_from_uniform": demand::kl_from_uniform(&profile.pixel_probability),
        "all_on_outage_fraction": cov.outage_fraction,
        "power_limited_outage_fraction": net::power_limited_outage_fraction(&model, &all_on)?,
    });
    std::fs::write(
        out.join("scenario.json"),
        serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
    )?;
    println!(
        "scenario: {} cells, {} pixels ({}x{}), all-on outage {:.4}",
        model.num_cells, model.num_pixels, model.grid_rows, model.grid_cols, cov.outage_fraction
    );
    Ok(())
}

/// Effective objective pair after the optional interference override.
fn select_pair(config: &ScenarioConfig, ici: Option<IciArg>) -> Result<ObjectivePair> {
    let configured = ObjectivePair::parse(&config.optimization.objective_pair)?;
    Ok(match ici {
        Some(IciArg::Lc) => ObjectivePair::PowerDispersion,
        Some(IciArg::Fl) if configured.load_coupled() => ObjectivePair::CellsCapacity,
        _ => configured,
    })
}

/// Full six-metric vectors for a set of topologies under the problem's
/// interference model.
fn objective_rows(
    problem: &CsoProblem,
    topologies: impl Iterator<Item = Topology>,
) -> Result<Vec<(Topology, cso_core::metrics::ObjectiveVector)>> {
    let load_coupled = problem.pair.load_coupled();
    topologies
        .map(|topo| {
            let vector = problem.objective_vector(&topo, load_coupled)?;
            Ok((topo, vector))
        })
        .collect()
}

fn chain_rows(chain: &MdaChain, problem: &CsoProblem) -> Vec<FrontRow> {
    chain
        .topologies
        .iter()
        .zip(&chain.capacity)
        .enumerate()
        .map(|(i, (topo, &f2))| {
            let cov = net::coverage(problem.model, topo).expect("dimensions agree");
            FrontRow {
                order: i + 1,
                topology: topo.clone(),
                active_cells: topo.active_count(),
                objectives: [topo.active_count() as f64, f2],
                feasible: cso_core::metrics::coverage_constraint(&cov, problem.kappa_cov),
                outage_fraction: cov.outage_fraction,
            }
        })
        .collect()
}

pub fn optimize(
    config: &ScenarioConfig,
    out: &Path,
    algorithm: Algorithm,
    ici: Option<IciArg>,
    exhaustive: bool,
) -> Result<()> {
    let (model, base_profile) = build_scenario(config)?;
    ensure_coverable(&model, config.constraint.kappa_cov)?;
    let pair = select_pair(config, ici)?;

    // Load-coupled searches run at a fixed fraction of the all-on capacity.
    let mut lc_multiplier = None;
    let profile = if pair.load_coupled() {
        let cap = capacity_multiplier(&model, &base_profile)?;
        let multiplier = config.optimization.volume_fraction_of_capacity * cap;
        lc_multiplier = Some(multiplier);
        base_profile.scaled(multiplier)
    } else {
        base_profile.clone()
    };

    let problem = CsoProblem::new(
        &model,
        &profile,
        config.power_model(),
        uplink_params(config)?,
        config.constraint.kappa_cov,
        pair,
    );
    // The greedy chain always optimizes the capacity tradeoff; it doubles as
    // the seed population for the evolutionary search.
    let chain = cso_core::mda::run_mda(model.num_cells, |t| problem.capacity(t));

    let seed = config.optimization.seed;
    let hash = config.hash();
    match algorithm {
        Algorithm::Mda => {
            let rows = chain_rows(&chain, &problem);
            io::write_front_csv(
                out.join("chain.csv"),
                &rows,
                ["active_cells", "capacity_bps"],
                &hash,
                seed,
            )?;
            let objectives = objective_rows(&problem, chain.topologies.iter().cloned())?;
            io::write_objectives_csv(out.join("chain_objectives.csv"), &objectives, &hash, seed)?;
            io::write_metadata(
                out.join("chain_metadata.json"),
                &RunMetadata {
                    command: "optimize".into(),
                    config_hash: hash.clone(),
                    seed,
                    objective_pair: Some("cells-capacity".into()),
                    generations: None,
                    evaluations: Some(model.num_cells * (model.num_cells + 1) / 2),
                    final_hypervolume: None,
                    extra: Some(json!({ "algorithm": "mda" })),
                },
            )?;
            println!(
                "chain: {} topologies -> {}",
                rows.len(),
                out.join("chain.csv").display()
            );
        }
        Algorithm::Moea => {
            let moea_config = MoeaConfig {
                population_size: config.optimization.population_size,
                crossover_prob: config.optimization.crossover_prob,
                mutation_prob: config.optimization.mutation_prob,
                hv_threshold: config.optimization.hv_threshold,
                hv_patience: config.optimization.hv_patience,
                max_generations: config.optimization.max_generations,
                seed,
            };
            let seeds: &[Topology] = if config.optimization.mda_seed {
                &chain.topologies
            } else {
                &[]
            };
            let front = moea::evolve(&problem, &moea_config, seeds)?;
            if front.members.is_empty() {
                return Err(Error::Infeasible(
                    "no feasible topology found for the coverage constraint".into(),
                ));
            }
            let rows = io::front_rows_from_members(&front.members);
            io::write_front_csv(
                out.join("front.csv"),
                &rows,
                pair.objective_names(),
                &hash,
                seed,
            )?;
            let objectives =
                objective_rows(&problem, front.members.iter().map(|m| m.genome.clone()))?;
            io::write_objectives_csv(out.join("front_objectives.csv"), &objectives, &hash, seed)?;
            io::write_metadata(
                out.join("front_metadata.json"),
                &RunMetadata {
                    command: "optimize".into(),
                    config_hash: hash.clone(),
                    seed,
                    objective_pair: Some(pair.name().into()),
                    generations: Some(front.generations),
                    evaluations: Some(front.evaluations),
                    final_hypervolume: Some(front.final_hypervolume),
                    extra: Some(json!({
                        "algorithm": "moea",
                        "lc_volume_multiplier": lc_multiplier,
                    })),
                },
            )?;
            println!(
                "front: {} members after {} generations -> {}",
                rows.len(),
                front.generations,
                out.join("front.csv").display()
            );
        }
    }

    if exhaustive {
        if model.num_cells > 20 {
            return Err(Error::Config(format!(
                "--exhaustive enumerates 2^L topologies; L = {} exceeds the limit of 20",
                model.num_cells
            )));
        }
        let front = moea::enumerate_front(&problem);
        let rows = io::front_rows_from_members(&front);
        io::write_front_csv(
            out.join("exhaustive.csv"),
            &rows,
            pair.objective_names(),
            &hash,
            seed,
        )?;
        println!("exhaustive front: {} members", rows.len());
    }
    Ok(())
}

struct EvaluatedMember {
    row: FrontRow,
    qos_pass_fraction: f64,
    mean_satisfied: f64,
    mean_power_w: f64,
}

fn simulate_member(
    model: &NetworkModel,
    profile: &DemandProfile,
    config: &ScenarioConfig,
    topo: &Topology,
    ici: IciModel,
    volume_multiplier: f64,
) -> Result<SimReport> {
    let sim_config = SimConfig {
        duration_s: config.simulation.duration_s,
        num_experiments: config.simulation.num_experiments,
        qos_check_interval_s: config.simulation.qos_check_interval_s,
        target_qos: config.simulation.target_qos,
        seed: config.simulation.seed,
        ici,
        volume_multiplier,
    };
    let phases = vec![DemandPhase {
        start_s: 0.0,
        profile: profile.clone(),
    }];
    let policy = TopologyPolicy::Static(topo.clone());
    sim::run_experiment(model, &policy, &phases, &sim_config, &config.power_model())
}

pub fn evaluate(
    config: &ScenarioConfig,
    out: &Path,
    front_path: &Path,
    volumes_arg: Option<&str>,
    ici_arg: Option<IciArg>,
) -> Result<()> {
    let (model, profile) = build_scenario(config)?;
    let rows = io::read_front_csv(front_path)?;
    if rows.is_empty() {
        return Err(Error::Empty(format!(
            "front file {} has no members",
            front_path.display()
        )));
    }
    for row in &rows {
        if row.topology.len() != model.num_cells {
            return Err(Error::Dimension(format!(
                "front topology has {} cells, scenario has {}",
                row.topology.len(),
                model.num_cells
            )));
        }
    }
    let volumes = parse_volume_list(volumes_arg, config)?;
    let ici = ici_model(ici_arg, config)?;
    let cap = capacity_multiplier(&model, &profile)?;

    let mut file = std::io::BufWriter::new(std::fs::File::create(out.join("selection.csv"))?);
    writeln!(
        file,
        "# config_hash={} seed={}",
        config.hash(),
        config.simulation.seed
    )?;
    writeln!(
        file,
        "volume,topology,active_cells,rank_value,qos_pass_fraction,mean_satisfied_fraction,mean_power_w,selected"
    )?;

    let mut selections = Vec::new();
    for &volume in &volumes {
        let mut evaluated = Vec::new();
        for row in &rows {
            let report =
                simulate_member(&model, &profile, config, &row.topology, ici, volume * cap)?;
            evaluated.push(EvaluatedMember {
                row: row.clone(),
                qos_pass_fraction: report.qos_check_pass_fraction,
                mean_satisfied: report.mean_satisfied_fraction,
                mean_power_w: report.mean_power_w,
            });
        }
        let candidates: Vec<TopologyQos> = evaluated
            .iter()
            .map(|m| TopologyQos {
                topology: m.row.topology.clone(),
                qos_pass_fraction: m.qos_pass_fraction,
                rank_value: m.row.objectives[0],
            })
            .collect();
        let selected =
            sim::select_topology(&candidates, config.simulation.target_qos, model.num_cells)?;
        for m in &evaluated {
            writeln!(
                file,
                "{},{},{},{},{},{},{},{}",
                volume,
                m.row.topology.to_bitstring(),
                m.row.active_cells,
                m.row.objectives[0],
                m.qos_pass_fraction,
                m.mean_satisfied,
                m.mean_power_w,
                m.row.topology == selected
            )?;
        }
        // Time series of the operating point picked for this volume.
        let report = simulate_member(&model, &profile, config, &selected, ici, volume * cap)?;
        sim::write_report_csv(
            out.join(format!("timeseries_v{volume}.csv")),
            &report,
            config.simulation.qos_check_interval_s,
        )?;
        selections.push(json!({
            "volume": volume,
            "selected": selected.to_bitstring(),
            "active_cells": selected.active_count(),
            "summary": report.summary(),
        }));
    }
    drop(file);

    io::write_metadata(
        out.join("selection_metadata.json"),
        &RunMetadata {
            command: "evaluate".into(),
            config_hash: config.hash(),
            seed: config.simulation.seed,
            objective_pair: None,
            generations: None,
            evaluations: None,
            final_hypervolume: None,
            extra: Some(json!({
                "front_file": front_path.display().to_string(),
                "capacity_multiplier": cap,
                "selections": selections,
            })),
        },
    )?;
    println!("selection table -> {}", out.join("selection.csv").display());
    Ok(())
}

pub fn compare(config: &ScenarioConfig, out: &Path, volumes_arg: Option<&str>) -> Result<()> {
    let (model, profile) = build_scenario(config)?;
    ensure_coverable(&model, config.constraint.kappa_cov)?;
    let volumes = parse_volume_list(volumes_arg, config)?;
    let cap = capacity_multiplier(&model, &profile)?;

    // Proposed pipeline: offline front, then per-volume selection.
    let pair = ObjectivePair::CellsCapacity;
    let problem = CsoProblem::new(
        &model,
        &profile,
        config.power_model(),
        uplink_params(config)?,
        config.constraint.kappa_cov,
        pair,
    );
    let chain = cso_core::mda::run_mda(model.num_cells, |t| problem.capacity(t));
    let moea_config = MoeaConfig {
        population_size: config.optimization.population_size,
        crossover_prob: config.optimization.crossover_prob,
        mutation_prob: config.optimization.mutation_prob,
        hv_threshold: config.optimization.hv_threshold,
        hv_patience: config.optimization.hv_patience,
        max_generations: config.optimization.max_generations,
        seed: config.optimization.seed,
    };
    let seeds: &[Topology] = if config.optimization.mda_seed {
        &chain.topologies
    } else {
        &[]
    };
    let front = moea::evolve(&problem, &moea_config, seeds)?;
    if front.members.is_empty() {
        return Err(Error::Infeasible(
            "no feasible topology found for the coverage constraint".into(),
        ));
    }

    let params = SnapshotParams {
        min_rate_bps: profile.min_rate_bps,
        kappa_cov: config.constraint.kappa_cov,
    };
    let zooming = CellZooming { params };
    let improved = ImprovedCellZooming { params };
    let lia = LoadInterferenceAware {
        params,
        load_threshold: config.simulation.lia_load_threshold,
    };
    let set_cover = SetCover { params };
    let benchmarks: Vec<&dyn sim::SnapshotPolicy> = vec![&zooming, &improved, &lia, &set_cover];

    let mut file = std::io::BufWriter::new(std::fs::File::create(out.join("comparison.csv"))?);
    writeln!(
        file,
        "# config_hash={} seed={}",
        config.hash(),
        config.simulation.seed
    )?;
    writeln!(
        file,
        "scheme,volume,mean_active_cells,qos_pass_fraction,mean_satisfied_fraction,transitions_per_experiment,handover_mass_per_experiment,mean_power_w"
    )?;
    let experiments = config.simulation.num_experiments as f64;

    for &volume in &volumes {
        // Select the smallest front member that holds the QoS target.
        let mut candidates = Vec::new();
        for member in &front.members {
            let report = simulate_member(
                &model,
                &profile,
                config,
                &member.genome,
                IciModel::FullLoad,
                volume * cap,
            )?;
            candidates.push((member.genome.clone(), report));
        }
        let qos: Vec<TopologyQos> = candidates
            .iter()
            .map(|(topo, report)| TopologyQos {
                topology: topo.clone(),
                qos_pass_fraction: report.qos_check_pass_fraction,
                rank_value: topo.active_count() as f64,
            })
            .collect();
        let selected = sim::select_topology(&qos, config.simulation.target_qos, model.num_cells)?;
        let selected_report = candidates
            .iter()
            .find(|(topo, _)| *topo == selected)
            .map(|(_, report)| report.clone());
        let report = match selected_report {
            Some(r) => r,
            None => simulate_member(
                &model,
                &profile,
                config,
                &selected,
                IciModel::FullLoad,
                volume * cap,
            )?,
        };
        writeln!(
            file,
            "mo-cso,{},{},{},{},{},{},{}",
            volume,
            report.mean_active_cells,
            report.qos_check_pass_fraction,
            report.mean_satisfied_fraction,
            report.transitions as f64 / experiments,
            report.handover_mass / experiments,
            report.mean_power_w
        )?;

        for policy in &benchmarks {
            let sim_config = SimConfig {
                duration_s: config.simulation.duration_s,
                num_experiments: config.simulation.num_experiments,
                qos_check_interval_s: config.simulation.qos_check_interval_s,
                target_qos: config.simulation.target_qos,
                seed: config.simulation.seed,
                ici: IciModel::FullLoad,
                volume_multiplier: volume * cap,
            };
            let phases = vec![DemandPhase {
                start_s: 0.0,
                profile: profile.clone(),
            }];
            let wrapped = TopologyPolicy::Snapshot(*policy);
            let report = sim::run_experiment(
                &model,
                &wrapped,
                &phases,
                &sim_config,
                &config.power_model(),
            )?;
            writeln!(
                file,
                "{},{},{},{},{},{},{},{}",
                policy.name(),
                volume,
                report.mean_active_cells,
                report.qos_check_pass_fraction,
                report.mean_satisfied_fraction,
                report.transitions as f64 / experiments,
                report.handover_mass / experiments,
                report.mean_power_w
            )?;
        }
    }
    drop(file);

    io::write_metadata(
        out.join("comparison_metadata.json"),
        &RunMetadata {
            command: "compare".into(),
            config_hash: config.hash(),
            seed: config.simulation.seed,
            objective_pair: Some(pair.name().into()),
            generations: Some(front.generations),
            evaluations: Some(front.evaluations),
            final_hypervolume: Some(front.final_hypervolume),
            extra: Some(json!({ "capacity_multiplier": cap })),
        },
    )?;
    println!(
        "comparison table -> {}",
        out.join("comparison.csv").display()
    );
    Ok(())
}

fn parse_power_sweep(sweep: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = sweep.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(Error::Config(format!(
            "power sweep '{sweep}' must be LO:HI:STEP"
        )));
    };
    let lo: f64 = lo
        .parse()
        .map_err(|_| Error::Config("bad sweep start".into()))?;
    let hi: f64 = hi
        .parse()
        .map_err(|_| Error::Config("bad sweep end".into()))?;
    let step: f64 = step
        .parse()
        .map_err(|_| Error::Config("bad sweep step".into()))?;
    if step <= 0.0 || hi < lo {
        return Err(Error::Config("sweep needs hi >= lo and step > 0".into()));
    }
    let mut points = Vec::new();
    let mut p = lo;
    while p <= hi + 1e-9 {
        points.push(p);
        p += step;
    }
    Ok(points)
}

pub fn coverage_report(
    config: &ScenarioConfig,
    out: &Path,
    power_sweep: &str,
    candidate_window_db: f64,
) -> Result<()> {
    let (model, _) = build_scenario(config)?;
    let points = parse_power_sweep(power_sweep)?;
    let window = 10f64.powf(-candidate_window_db / 10.0);
    const MAX_BUCKET: usize = 8;

    let mut file = std::io::BufWriter::new(std::fs::File::create(out.join("coverage.csv"))?);
    writeln!(
        file,
        "# config_hash={} seed={}",
        config.hash(),
        config.channel.seed
    )?;
    let buckets: Vec<String> = (1..MAX_BUCKET)
        .map(|k| format!("candidates_{k}"))
        .chain(std::iter::once(format!("candidates_{MAX_BUCKET}_plus")))
        .collect();
    writeln!(
        file,
        "power_dbm,covered_fraction,mean_detectable_cells,{}",
        buckets.join(",")
    )?;

    for &dbm in &points {
        let p = dbm_to_watts(dbm);
        let mut covered = 0usize;
        let mut detectable_sum = 0usize;
        let mut histogram = vec![0usize; MAX_BUCKET + 1];
        for a in 0..model.num_pixels {
            let mut best = 0.0f64;
            let mut best_gain = 0.0f64;
            let mut detectable = 0usize;
            for l in 0..model.num_cells {
                let rx = model.gain[[a, l]] * p;
                if rx > model.min_rx_power_w {
                    detectable += 1;
                }
                if rx > best {
                    best = rx;
                    best_gain = model.gain[[a, l]];
                }
            }
            detectable_sum += detectable;
            let in_coverage = best > model.min_rx_power_w
                && best_gain > 0.0
                && 1.0 / best_gain < model.max_ul_attenuation;
            if in_coverage {
                covered += 1;
                let mut candidates = 0usize;
                for l in 0..model.num_cells {
                    if model.gain[[a, l]] * p >= best * window {
                        candidates += 1;
                    }
                }
                histogram[candidates.min(MAX_BUCKET)] += 1;
            }
        }
        let denom = covered.max(1) as f64;
        let cells: Vec<String> = (1..=MAX_BUCKET)
            .map(|k| format!("{}", histogram[k] as f64 / denom))
            .collect();
        writeln!(
            file,
            "{},{},{},{}",
            dbm,
            covered as f64 / model.num_pixels as f64,
            detectable_sum as f64 / model.num_pixels as f64,
            cells.join(",")
        )?;
    }
    drop(file);
    println!("coverage table -> {}", out.join("coverage.csv").display());
    Ok(())
}
