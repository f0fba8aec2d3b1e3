//! Command-line behavior: exit codes, file guards, and round trips.

use std::path::Path;
use std::process::{Command, Output};

use cso_core::config::ScenarioConfig;

fn cso(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cso"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
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
duration_s = 30.0
num_experiments = 2
volume_multipliers = [0.5]
"#,
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_round_trip_is_identity() {
    let config = ScenarioConfig::default();
    let text = config.to_toml_string();
    let parsed = ScenarioConfig::from_toml_str(&text).unwrap();
    assert_eq!(config, parsed);
    assert_eq!(config.hash(), parsed.hash());
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[geometry]\nnum_cells = 10\nnot_a_key = 1\n").unwrap();
    let out = cso(
        &["generate", "--config", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&path, "[radio]\nbandwidth_hz = -1.0\n").unwrap();
    let out = cso(
        &["generate", "--config", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn uncoverable_scenario_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dark.toml");
    // Pilot power far too weak to reach the detection threshold anywhere.
    std::fs::write(
        &path,
        r#"
[geometry]
num_cells = 4
cell_radius_m = 140.0
pixel_size_m = 20.0
area_width_m = 600.0
area_height_m = 600.0

[radio]
pilot_power_dbm = -80.0
data_power_dbm = -80.0
"#,
    )
    .unwrap();
    let out = cso(
        &[
            "optimize",
            "--algorithm",
            "moea",
            "--config",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("infeasible"), "{stderr}");
}

#[test]
fn exhaustive_guard_rejects_large_networks() {
    let dir = tempfile::tempdir().unwrap();
    // Default scenario has 37 cells; shrink pixels stay untouched since the
    // guard fires before any heavy work.
    let path = dir.path().join("default37.toml");
    std::fs::write(&path, "[geometry]\npixel_size_m = 50.0\n").unwrap();
    let out = cso(
        &[
            "optimize",
            "--algorithm",
            "moea",
            "--exhaustive",
            "--config",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the limit"));
}

#[test]
fn chain_has_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let out_dir = dir.path().join("mda");
    let out = cso(
        &["optimize", "--algorithm", "mda", "--config", &config],
        &out_dir,
    );
    assert!(out.status.success());
    let rows = cso_core::io::read_front_csv(out_dir.join("chain.csv")).unwrap();
    assert_eq!(rows.len(), 10);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.order, i + 1);
        assert_eq!(row.active_cells, i + 1);
    }
    assert_eq!(rows.last().unwrap().topology.to_bitstring(), "1111111111");
}

#[test]
fn evaluate_rejects_bad_front_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());

    // Empty front (header only).
    let front = dir.path().join("empty.csv");
    std::fs::write(&front, "order,topology,nac,a,b,feasible,outage_fraction\n").unwrap();
    let out = cso(
        &[
            "evaluate",
            "--front",
            front.to_str().unwrap(),
            "--config",
            &config,
        ],
        &dir.path().join("eval1"),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no members"));

    // Malformed row: the error names it.
    std::fs::write(
        &front,
        "order,topology,nac,a,b,feasible,outage_fraction\n0,1111111111,10,1.0,oops,true,0.0\n",
    )
    .unwrap();
    let out = cso(
        &[
            "evaluate",
            "--front",
            front.to_str().unwrap(),
            "--config",
            &config,
        ],
        &dir.path().join("eval2"),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));
}

#[test]
fn seed_flag_changes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    assert!(
        cso(&["generate", "--config", &config, "--seed", "1"], &out_a)
            .status
            .success()
    );
    assert!(
        cso(&["generate", "--config", &config, "--seed", "2"], &out_b)
            .status
            .success()
    );
    let a = std::fs::read(out_a.join("gain.txt")).unwrap();
    let b = std::fs::read(out_b.join("gain.txt")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn coverage_report_is_monotone_in_power() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let out_dir = dir.path().join("cov");
    let out = cso(
        &[
            "coverage-report",
            "--power-sweep",
            "-40:40:5",
            "--config",
            &config,
        ],
        &out_dir,
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(out_dir.join("coverage.csv")).unwrap();
    let covered: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("power_dbm"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(covered.len() > 5);
    assert!(covered.windows(2).all(|w| w[1] >= w[0]), "{covered:?}");
    assert!(
        covered[0] < 0.01,
        "near-zero power must leave the area dark"
    );
}

#[test]
fn generated_scenario_can_be_reloaded_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let gen_dir = dir.path().join("gen");
    assert!(cso(&["generate", "--config", &config], &gen_dir)
        .status
        .success());

    // Feed the exported gain matrix and demand grid back in.
    let reload = dir.path().join("reload.toml");
    std::fs::write(
        &reload,
        format!(
            r#"
[geometry]
num_cells = 10
cell_radius_m = 140.0
pixel_size_m = 20.0
area_width_m = 600.0
area_height_m = 600.0

[channel]
model = "file"
gain_file = "{gain}"

[demand]
source = "file"
grid_file = "{grid}"

[simulation]
duration_s = 30.0
num_experiments = 2
volume_multipliers = [0.5]
"#,
            gain = gen_dir.join("gain.txt").display(),
            grid = gen_dir.join("demand.txt").display(),
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("reload-out");
    let out = cso(
        &[
            "optimize",
            "--algorithm",
            "mda",
            "--config",
            reload.to_str().unwrap(),
        ],
        &out_dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = cso_core::io::read_front_csv(out_dir.join("chain.csv")).unwrap();
    assert_eq!(rows.len(), 10);
}
