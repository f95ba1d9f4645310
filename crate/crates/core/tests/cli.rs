use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn skyharvest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skyharvest"))
        .args(args)
        .env("SKYHARVEST_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn scenario_cluster_route_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    let clustering = dir.path().join("c.json");
    let plan = dir.path().join("plan.json");
    let legs = dir.path().join("legs.csv");

    let out = skyharvest(&["scenario", "--sensors", "200", "--seed", "4", "--out", p(&scenario)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = skyharvest(&["cluster", "--scenario", p(&scenario), "--d-th", "2500", "--out", p(&clustering)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let c: serde_json::Value = serde_json::from_str(&fs::read_to_string(&clustering).unwrap()).unwrap();
    for key in ["ch_positions", "assignment", "k_prime", "d_max"] {
        assert!(c.get(key).is_some(), "missing {key}");
    }
    assert!(c["d_max"].as_f64().unwrap() <= 2500.0);

    let ga = dir.path().join("ga.json");
    fs::write(&ga, r#"{"population_size": 40, "max_generations": 50}"#).unwrap();
    let out = skyharvest(&[
        "route",
        "--clustering",
        p(&clustering),
        "--scenario",
        p(&scenario),
        "--uavs",
        "2",
        "--solver",
        "ga",
        "--ga",
        p(&ga),
        "--tspn-radius",
        "auto",
        "--out",
        p(&plan),
        "--legs",
        p(&legs),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!String::from_utf8_lossy(&out.stderr).contains("warning"));
    let plan: serde_json::Value = serde_json::from_str(&fs::read_to_string(&plan).unwrap()).unwrap();
    assert_eq!(plan["routes"].as_array().unwrap().len(), 2);
    let legs = fs::read_to_string(&legs).unwrap();
    assert!(legs.starts_with("uav,leg,x0,y0,z0,x1,y1,z1,length_m\r\n"));
}

#[test]
fn cluster_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    let sweep = dir.path().join("sweep.csv");
    assert!(skyharvest(&["scenario", "--sensors", "100", "--out", p(&scenario)]).status.success());
    let out = skyharvest(&[
        "cluster",
        "--scenario",
        p(&scenario),
        "--sweep",
        "1500,2500",
        "--runs",
        "3",
        "--sweep-out",
        p(&sweep),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&sweep).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d_th_m,run,k_prime");
    assert_eq!(lines.len(), 7);
}

#[test]
fn channel_table_on_stdout() {
    let out = skyharvest(&["channel", "--env", "suburban", "--z", "100,200,50000"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "z_m,theta_star_rad,radius_m");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3], "50000,,");
}

#[test]
fn channel_reads_registry() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("envs.json");
    fs::write(
        &reg,
        r#"[{"name": "lab", "a": 5.0, "b": 0.4, "nu_los": 0.5, "nu_nlos": 18.0}]"#,
    )
    .unwrap();
    let out = skyharvest(&["channel", "--registry", p(&reg), "--env", "lab", "--z", "300"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = skyharvest(&["channel", "--registry", p(&reg), "--env", "urban", "--z", "300"]);
    assert_eq!(out.status.code(), Some(1));
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let cfg = dir.join("cfg.json");
    fs::write(
        &cfg,
        r#"{
            "replications": 2,
            "ga": {"population_size": 30, "max_generations": 40},
            "sweep": {"compare_k_values": [5, 6], "tspn_chs": 6}
        }"#,
    )
    .unwrap();
    cfg
}

#[test]
fn experiment_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = skyharvest(&["experiment", "solver_compare", "--config", p(&cfg), "--out", p(out), "--trace"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["solver_compare.csv", "solver_compare_summary.csv", "solver_compare_trace.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("solver_compare.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["name"], "solver_compare");
    assert!(meta["code_version"].is_string());
    assert!(meta["wall_clock_s"].is_number());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let run = |seed: &str, out: &str| {
        let out = dir.path().join(out);
        assert!(skyharvest(&["experiment", "tspn_gain", "--config", p(&cfg), "--out", p(&out), "--seed", seed])
            .status
            .success());
        fs::read(out.join("tspn_gain.csv")).unwrap()
    };
    assert_ne!(run("1", "x"), run("2", "y"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(skyharvest(&["experiment", "fig9", "--out", p(&out)]).status.code(), Some(1));
    assert_eq!(skyharvest(&["route"]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(
        skyharvest(&["experiment", "tspn_gain", "--config", p(&missing), "--out", p(&out)])
            .status
            .code(),
        Some(1)
    );

    // more UAVs than cluster heads everywhere: every row fails
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"replications": 1, "sweep": {"multi_k_values": [2], "uav_values": [3]}}"#,
    )
    .unwrap();
    let o = skyharvest(&["experiment", "fairness", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));

    // sensor range too small for the cluster-head budget
    let scenario = dir.path().join("s.json");
    assert!(skyharvest(&["scenario", "--sensors", "50", "--max-chs", "2", "--out", p(&scenario)]).status.success());
    let o = skyharvest(&["cluster", "--scenario", p(&scenario), "--d-th", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(skyharvest(&["--help"]).status.success());
}
