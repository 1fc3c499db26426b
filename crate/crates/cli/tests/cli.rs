use std::path::Path;
use std::process::{Command, Output};

fn qtraj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtraj"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_run(out: &Path, seed: &str) -> Output {
    qtraj(&[
        "--preset",
        "stabilize",
        "--theta-bar",
        "0.7",
        "--trajectories",
        "64",
        "--steps",
        "120",
        "--record-stride",
        "40",
        "--seed",
        seed,
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["--gamma-tau", "0.5"][..],
        &["--initial", "0,0,2"],
        &["--alpha2", "50"],
        &["--theta-bar", "-1"],
        &["--no-such-flag"],
        &["--steps", "20000"],
    ] {
        let out = qtraj(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_exits_1() {
    let out = qtraj(&[
        "--steps",
        "10",
        "--trajectories",
        "4",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    assert!(small_run(&path, "5").status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config: {"));
    assert_eq!(
        lines[1],
        "step,gamma_t,mean_sx,mean_sy,mean_sz,se_sx,se_sy,se_sz,angle_var,fidelity,purity"
    );
    // steps 0, 40, 80, 120
    assert_eq!(lines.len(), 6);
    assert!(!text.contains('\r'));
    let first: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[9].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn same_seed_same_bytes_and_seed_matters() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    small_run(&a, "9");
    small_run(&b, "9");
    small_run(&c, "10");
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn config_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let original = dir.path().join("original.csv");
    small_run(&original, "3");
    let replay = dir.path().join("replay.csv");
    let out = qtraj(&[
        "--config",
        original.to_str().unwrap(),
        "--out",
        replay.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        std::fs::read(&original).unwrap(),
        std::fs::read(&replay).unwrap()
    );

    let json = dir.path().join("original.json");
    let replay_json = dir.path().join("replay.json");
    qtraj(&[
        "--preset",
        "decay",
        "--steps",
        "50",
        "--trajectories",
        "8",
        "--format",
        "json",
        "--out",
        json.to_str().unwrap(),
    ]);
    let out = qtraj(&[
        "--config",
        json.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        replay_json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&json).unwrap(),
        std::fs::read(&replay_json).unwrap()
    );
}

#[test]
fn json_rows_and_missing_angle() {
    let out = qtraj(&[
        "--preset",
        "decay",
        "--initial",
        "0,1,0",
        "--steps",
        "20",
        "--trajectories",
        "8",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["preset"], "decay");
    assert_eq!(doc["seed"], 0);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["angle_var"].is_null());
    assert_eq!(rows[0]["mean_sy"], 1.0);
}

#[test]
fn field_presets() {
    let out = qtraj(&["--preset", "fig1-field", "--grid-points", "10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 16);
    let find = |p: [f64; 3]| rows.iter().find(|r| r[..3] == p).unwrap()[3..].to_vec();
    assert_eq!(find([0.0, 0.0, -1.0]), vec![0.0, 0.0, 0.0]);
    assert_eq!(find([0.0, 0.0, 1.0]), vec![2.0, 0.0, 0.0]);

    let out = qtraj(&["--preset", "fig2-field", "--grid-points", "10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let dipole = text
        .lines()
        .find(|l| l.starts_with("1.0000000000000000e0,0.0"))
        .unwrap();
    assert!(dipole
        .split(',')
        .skip(3)
        .all(|v| v.parse::<f64>().unwrap() == 0.0));
}

#[test]
fn delay_sweep_has_delay_column() {
    let out = qtraj(&[
        "--preset",
        "delay-sweep",
        "--delay",
        "3",
        "--steps",
        "20",
        "--trajectories",
        "8",
        "--record-stride",
        "20",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].starts_with("delay,step,"));
    let delays: Vec<&str> = lines[2..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(delays, ["1", "1", "2", "2", "3", "3"]);
}
