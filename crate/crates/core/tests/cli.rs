use std::path::Path;
use std::process::Command;

fn spinbus(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spinbus"))
        .args(args)
        .env("SPINBUS_OUTPUT_DIR", dir)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn env_var_sets_output_dir_and_flag_beats_it() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let (code, _) = spinbus(env_dir.path(), &["feasibility"]);
    assert_eq!(code, 0);
    assert!(env_dir.path().join("feasibility_map.csv").exists());
    assert!(env_dir.path().join("resolved_config.toml").exists());

    let (code, _) = spinbus(env_dir.path(), &["--output-dir", flag_dir.path().to_str().unwrap(), "feasibility"]);
    assert_eq!(code, 0);
    assert!(flag_dir.path().join("feasibility_boundary.csv").exists());
}

#[test]
fn resolved_config_reproduces_outputs_byte_for_byte() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let args = [
        "transport",
        "--geometry",
        "nanowire",
        "--field",
        "0.063",
        "--t-end",
        "0.2",
        "--samples",
        "5",
        "--initial",
        "point",
        "--set",
        "sigma_cap=3",
    ];
    assert_eq!(spinbus(first.path(), &args).0, 0);
    let config = first.path().join("resolved_config.toml");
    let echoed = read(first.path(), "resolved_config.toml");
    assert!(echoed.contains("sigma_cap = 3.0"));
    assert!(echoed.contains("geometry = \"nanowire\""));

    let (code, _) = spinbus(
        second.path(),
        &["--config", config.to_str().unwrap(), "--output-dir", second.path().to_str().unwrap(), "transport"],
    );
    assert_eq!(code, 0);
    for name in ["trajectory.csv", "grid_initial.txt", "grid_final.txt"] {
        assert_eq!(read(first.path(), name), read(second.path(), name), "{name} differs");
    }
}

#[test]
fn transport_conservation_column_stays_small() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = spinbus(
        dir.path(),
        &["transport", "--geometry", "nanowire", "--field", "0.063", "--t-end", "0.3", "--capture", "true", "--initial", "gaussian", "--width", "0.05"],
    );
    assert_eq!(code, 0);
    let csv = read(dir.path(), "trajectory.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(spinbus::transport::TRAJECTORY_HEADER));
    for line in lines {
        let err: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(err.abs() < 1e-6, "{line}");
    }
}

#[test]
fn unstable_step_is_a_physics_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = spinbus(dir.path(), &["transport", "--geometry", "nanowire", "--field", "0.063", "--dt", "1"]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[scenario.transport]\nfeild = 0.1\n").unwrap();
    assert_eq!(spinbus(dir.path(), &["--config", cfg.to_str().unwrap(), "transport"]).0, 2);
    std::fs::write(&cfg, "[parameters]\nmu_n = -1\n").unwrap();
    assert_eq!(spinbus(dir.path(), &["--config", cfg.to_str().unwrap(), "feasibility"]).0, 2);
    assert_eq!(spinbus(dir.path(), &["feasibility", "--e-min", "0"]).0, 2);
    assert_eq!(spinbus(dir.path(), &["fidelity-curve", "--lambda-min", "700", "--lambda-max", "700"]).0, 2);
    assert_eq!(spinbus(dir.path(), &["fidelity-curve", "--ion-table", "/nonexistent/table.txt"]).0, 2);
    assert_eq!(spinbus(dir.path(), &["protocol", "inject-nv", "--alpha", "1", "--beta", "1"]).0, 2);
    assert_eq!(spinbus(dir.path(), &["bogus"]).0, 2);
}

#[test]
fn identical_tables_give_even_odds() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("same.txt");
    std::fs::write(
        &table,
        "kind=ionization units=relative normalization=x\n400 0.3\n500 0.7\n600 0.2\n",
    )
    .unwrap();
    let opt = dir.path().join("same_opt.txt");
    std::fs::write(
        &opt,
        "kind=optical-absorption units=relative normalization=x\n400 0.3\n500 0.7\n600 0.2\n",
    )
    .unwrap();
    let (code, _) = spinbus(
        dir.path(),
        &["fidelity-curve", "--ion-table", table.to_str().unwrap(), "--opt-table", opt.to_str().unwrap(), "--step-nm", "25"],
    );
    assert_eq!(code, 0);
    let csv = read(dir.path(), "fidelity_curve.csv");
    let rows: Vec<_> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.ends_with(",0.5")));
}

#[test]
fn bundled_fidelity_curve_rises_toward_blue() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(spinbus(dir.path(), &["fidelity-curve"]).0, 0);
    let csv = read(dir.path(), "fidelity_curve.csv");
    assert_eq!(csv.lines().next(), Some("lambda_nm,sigma_ion,sigma_opt,fidelity"));
    let f: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[3])
        })
        .collect();
    let at = |lambda: f64| f.iter().find(|p| p.0 == lambda).unwrap().1;
    assert!(at(440.0) > 0.9);
    assert!(at(440.0) > at(460.0) && at(460.0) > at(490.0));
    assert!(f.windows(2).all(|w| w[1].1 <= w[0].1));
}

#[test]
fn feasibility_rho_zero_has_no_boundary() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(spinbus(dir.path(), &["feasibility", "--rho-min", "0"]).0, 0);
    assert_eq!(read(dir.path(), "feasibility_boundary.csv").lines().count(), 1);
    let map = read(dir.path(), "feasibility_map.csv");
    assert!(map.lines().skip(1).all(|l| l.ends_with(",1")));
}

#[test]
fn protocol_outputs_and_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = spinbus(dir.path(), &["protocol", "entangle"]);
    assert_eq!(code, 0);
    assert!(out.contains("fidelity.total"));
    assert!(out.contains("verdict: PASS"));
    let timeline = dir.path().join("timeline.txt");
    assert!(read(dir.path(), "timeline.csv").starts_with(spinbus::protocol::TIMELINE_CSV_HEADER));

    let check_dir = tempfile::tempdir().unwrap();
    let (code, _) = spinbus(check_dir.path(), &["protocol", "check", timeline.to_str().unwrap()]);
    assert_eq!(code, 0);

    let (code, out) = spinbus(dir.path(), &["protocol", "inject-nv", "--alpha", "1", "--beta", "0", "--blue-ns", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("nv_injection: incoherent"));

    let (code, out) = spinbus(dir.path(), &["protocol", "detect", "--transport-ns", "120"]);
    assert_eq!(code, 1);
    assert!(out.contains("budget transport_capture: used 220 ns of 180 ns: FAIL"));
}

#[test]
fn swapped_tables_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let opt = dir.path().join("opt.txt");
    std::fs::write(&opt, "kind=optical-absorption units=relative normalization=x\n400 0.3\n500 0.7\n").unwrap();
    assert_eq!(spinbus(dir.path(), &["fidelity-curve", "--ion-table", opt.to_str().unwrap()]).0, 2);
}
