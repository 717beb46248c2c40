use selfsim_cli::{emit_plot_data, run, Command, Format, PlotSource, RunConfig};
use selfsim_core::groups::{build_group, OracleSequence};
use selfsim_core::growth::enumerate_ball;
use std::process::{Command as Process, Output};

fn selfsim(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_selfsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn selfsim_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Process::new(env!("CARGO_BIN_EXE_selfsim"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn growth_csv_matches_library() {
    let out = selfsim(&[
        "growth", "--oracle", "(012)*", "--radius", "8", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = enumerate_ball(&build_group(&OracleSequence::xi(), 0), 8).unwrap();
    assert_eq!(stdout(&out), table.to_csv());
}

#[test]
fn growth_json_follows_schema() {
    let out = selfsim(&["growth", "--radius", "7"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema"], "growth/1");
    assert_eq!(doc["ball"].as_array().unwrap().len(), 8);
    assert_eq!(doc["sphere"][7], 68);
    assert!(doc["exponent_fit"]["diagnostic_only"].as_bool().unwrap());
}

#[test]
fn constants_json() {
    let out = selfsim(&["constants"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((doc["alpha0"].as_f64().unwrap() - 0.7674).abs() < 1e-4);
    assert!((doc["eta_plus"].as_f64().unwrap() - 2.4675).abs() < 1e-4);
}

#[test]
fn classify_constant_oracle() {
    let out = selfsim(&["classify", "--oracle", "(0)*"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for flag in ["in_omega0", "in_omega1", "in_theta"] {
        assert_eq!(doc[flag], false, "{flag}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        selfsim(&["growth", "--oracle", "(013)*"]).status.code(),
        Some(2)
    );
    assert_eq!(
        selfsim(&["growth", "--no-such-flag"]).status.code(),
        Some(2)
    );
    assert_eq!(
        selfsim(&["walk", "--measure", "a:1/2,b:1/2"]).status.code(),
        Some(2)
    );
    let capped = selfsim_env(
        &["growth", "--radius", "10"],
        &[("SELFSIM_MAX_ELEMENTS", "100")],
    );
    assert_eq!(capped.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("resource cap"));
    let flag_wins = selfsim_env(
        &["growth", "--radius", "10", "--max-elements", "1000"],
        &[("SELFSIM_MAX_ELEMENTS", "100")],
    );
    assert_eq!(flag_wins.status.code(), Some(0));
    let psi = selfsim(&[
        "psi",
        "--measure",
        "uniform",
        "--length-cap",
        "20",
        "--tol",
        "0.001",
    ]);
    assert_eq!(psi.status.code(), Some(4));
    let ok = selfsim(&["psi", "--length-cap", "30", "--tol", "0.001"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    let dumped = selfsim(&[
        "inverted-orbit",
        "--steps",
        "5",
        "--format",
        "csv",
        "--dump-config",
    ]);
    std::fs::write(&path, stdout(&dumped)).unwrap();
    let parsed = RunConfig::from_toml(&stdout(&dumped)).unwrap();
    assert_eq!(parsed.command, Command::InvertedOrbit);
    assert_eq!(parsed.to_toml(), stdout(&dumped));
    let from_file = selfsim(&["--config", path.to_str().unwrap()]);
    let from_flags = selfsim(&["inverted-orbit", "--steps", "5", "--format", "csv"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(stdout(&from_file), stdout(&from_flags));
    assert_eq!(stdout(&from_file).lines().count(), 7);
}

#[test]
fn json_is_byte_identical_across_thread_counts() {
    for args in [
        vec!["walk", "--steps", "8", "--samples", "20000", "--seed", "3"],
        vec!["growth", "--radius", "12", "--include-elements"],
        vec!["psi", "--samples", "20000", "--seed", "9"],
    ] {
        let mut one = args.clone();
        one.extend(["--threads", "1"]);
        let mut many = args.clone();
        many.extend(["--threads", "4"]);
        let (a, b) = (selfsim(&one), selfsim(&many));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let growth = dir.path().join("growth.csv");
    let walk = dir.path().join("walk.csv");
    selfsim(&[
        "growth",
        "--radius",
        "8",
        "--plot",
        growth.to_str().unwrap(),
    ]);
    let rows = std::fs::read_to_string(&growth).unwrap();
    assert_eq!(rows.lines().next(), Some("n,gamma,log_gamma,log_log_gamma"));
    assert_eq!(rows.lines().count(), 10);
    selfsim(&[
        "walk",
        "--steps",
        "10",
        "--samples",
        "0",
        "--plot",
        walk.to_str().unwrap(),
    ]);
    let rows = std::fs::read_to_string(&walk).unwrap();
    assert_eq!(rows.lines().next(), Some("n,P,H,L"));
    assert_eq!(rows.lines().count(), 12);
    assert!(rows.lines().all(|l| l.split(',').count() == 4));
    assert_eq!(emit_plot_data(PlotSource::Walk(&[])), "n,P,H,L\n");
}

#[test]
fn library_entry_point() {
    let cfg = RunConfig {
        command: Command::Relators,
        level: 2,
        format: Format::Text,
        ..Default::default()
    };
    let out = run(&cfg).unwrap();
    assert_eq!(out.output.lines().count(), 11);
    assert!(out.failure.is_none());
    let cfg = RunConfig {
        command: Command::Schreier,
        level: 5,
        ..Default::default()
    };
    let doc: serde_json::Value = serde_json::from_str(&run(&cfg).unwrap().output).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 32);
    assert_eq!(doc["connected"], true);
    let cfg = RunConfig {
        command: Command::Orbit,
        radius: 50,
        format: Format::Csv,
        ..Default::default()
    };
    assert_eq!(run(&cfg).unwrap().output.lines().last(), Some("50,101"));
    let cfg = RunConfig {
        command: Command::Contraction,
        radius: 6,
        ..Default::default()
    };
    assert!(run(&cfg).unwrap().failure.is_none());
    let cfg = RunConfig {
        command: Command::Growth,
        compare: Some("012012(0)*".into()),
        shared_prefix: Some(4),
        ..Default::default()
    };
    let doc: serde_json::Value = serde_json::from_str(&run(&cfg).unwrap().output).unwrap();
    assert_eq!(doc["comparison"]["agree"], true);
    assert_eq!(doc["comparison"]["compared_radius"], 8);
}
