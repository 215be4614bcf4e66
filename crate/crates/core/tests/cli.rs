use std::path::Path;
use std::process::{Command, Output};

use signal_horizon::cli::{output, ConfigFile, RunManifest};
use signal_horizon::harness::ExperimentConfig;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_signal-horizon"));
    c.env_remove("SIGNAL_HORIZON_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

const SMALL: &str = r#"{
    "encoding": {"kind": "entangling", "n": 3, "theta": 0.4},
    "k_values": [1, 2],
    "p_grid": {"start": 0.0, "stop": 0.6, "points": 4},
    "shots": {"search": 500, "eval": 800},
    "seed": 11
}"#;

#[test]
fn sweep_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = run(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8);
    assert_eq!(csv.lines().next().unwrap(), output::CSV_HEADER.join(","));
    let from_csv = output::read_results(&out.join("results.csv")).unwrap();
    let from_json = output::read_results(&out.join("results.json")).unwrap();
    assert_eq!(from_csv, from_json);
    assert_eq!(from_csv[0].n_eval, 800);
    assert!(from_csv.iter().all(|r| r.trace_norm.is_some()));

    let manifest: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.command, "sweep");
    assert_eq!(manifest.failures, 0);
    for path in &manifest.outputs {
        assert!(Path::new(path).exists(), "{path}");
    }
    let echoed = manifest.config.unwrap();
    let original = ConfigFile::parse(SMALL).unwrap();
    assert_eq!(echoed.to_experiment().unwrap(), original.to_experiment().unwrap());
    let reparsed = ConfigFile::parse(&echoed.to_json()).unwrap();
    assert_eq!(reparsed.to_experiment().unwrap(), original.to_experiment().unwrap());
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut files = Vec::new();
    for (i, workers) in ["1", "8"].iter().enumerate() {
        let out = dir.path().join(format!("o{i}"));
        assert_eq!(
            run(&[
                "sweep",
                "--config",
                &cfg,
                "--out",
                out.to_str().unwrap(),
                "--workers",
                workers
            ])
            .status
            .code(),
            Some(0)
        );
        files.push(std::fs::read(out.join("results.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn preset_fig2_has_48_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["sweep", "--preset", "fig2"])
        .env("SIGNAL_HORIZON_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let recs = output::read_results(&dir.path().join("results.csv")).unwrap();
    assert_eq!(recs.len(), 48);
    let ks: Vec<usize> = recs.iter().map(|r| r.k).collect();
    assert!(ks.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(recs[0].p, 0.0);
    assert_eq!(recs[15].p, 0.75);
}

#[test]
fn extended_noise_needs_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"encoding":{"kind":"product","n":2},"k_values":[1],"p_grid":{"start":0.0,"stop":0.9,"points":4},"shots":{"search":50,"eval":50}}"#,
    );
    let out = dir.path().join("out");
    let o = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside"));
    let o = run(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--allow-extended-p",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let recs = output::read_results(&out.join("results.json")).unwrap();
    assert_eq!(recs.last().unwrap().p, 0.9);
    assert!((recs.last().unwrap().a_k_exact - 0.4).abs() < 1e-12);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    assert_eq!(
        run(&["sweep", "--config", "/nonexistent/cfg.json", "--out", out])
            .status
            .code(),
        Some(4)
    );
    let bad = write_config(dir.path(), "{not json");
    assert_eq!(run(&["sweep", "--config", &bad, "--out", out]).status.code(), Some(2));
    let infeasible = write_config(dir.path(), r#"{"encoding":{"kind":"product","n":3},"k_values":[4]}"#);
    assert_eq!(
        run(&["sweep", "--config", &infeasible, "--out", out]).status.code(),
        Some(2)
    );
    let empty = write_config(dir.path(), r#"{"encoding":{"kind":"product","n":3},"k_values":[]}"#);
    assert_eq!(run(&["sweep", "--config", &empty, "--out", out]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--out", out]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--preset", "fig9"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn spectrum_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "spectrum",
        "--preset",
        "fig1",
        "--out",
        out.to_str().unwrap(),
        "--top",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let w: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(w.len(), 5);
    assert!(w[0] == 0.0 && w[2] == 0.0 && w[4] == 0.0);
    assert!(w[1] > 0.0 && w[3] > 0.0);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(json["top"].as_array().unwrap().len(), 3);

    let big = write_config(dir.path(), r#"{"encoding":{"kind":"product","n":13},"k_values":[1]}"#);
    assert_eq!(
        run(&["spectrum", "--config", &big, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn threshold_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["threshold", "--preset", "fig1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("threshold.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "product");
    assert_eq!(row[3], "1");
    let p_star: f64 = row[5].parse().unwrap();
    let closed: f64 = row[6].parse().unwrap();
    assert!((p_star - 0.747348350).abs() < 1e-6);
    assert!((p_star - closed).abs() < 1e-9);

    let cfg = write_config(
        dir.path(),
        r#"{"encoding":{"kind":"entangling","n":4},"k_values":[1],"shots":{"search":10,"eval":1}}"#,
    );
    let o = run(&["threshold", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("threshold.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",1.0,"));
}

#[test]
fn plot_command() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_out = dir.path().join("sweep");
    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(
        run(&["sweep", "--config", &cfg, "--out", sweep_out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let figs = dir.path().join("figs");
    for results in ["results.csv", "results.json"] {
        let o = run(&[
            "plot",
            "--results",
            sweep_out.join(results).to_str().unwrap(),
            "--out",
            figs.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let svg = std::fs::read_to_string(figs.join("entangling_n3_theta0.4000.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("k = 2: accuracy"));

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, output::CSV_HEADER.join(",") + "\n").unwrap();
    let o = run(&[
        "plot",
        "--results",
        empty.to_str().unwrap(),
        "--out",
        figs.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["plot", "--results", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn presets_match_library_configs() {
    assert_eq!(
        ConfigFile::preset("fig1").unwrap().to_experiment().unwrap(),
        ExperimentConfig::fig1()
    );
    assert_eq!(
        ConfigFile::preset("fig2").unwrap().to_experiment().unwrap(),
        ExperimentConfig::fig2()
    );
}
