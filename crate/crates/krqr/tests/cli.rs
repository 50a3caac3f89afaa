use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn krqr(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krqr")).args(args).current_dir(dir).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const RATCHET: &str = r#"
scenario = "ratchet"
phi = 0.0
engines = ["numeric", "analytic"]
output_path = "out/ratchet.csv"

[params]
k = 10.0
ell = 2
n_kicks = 10
"#;

#[test]
fn validate_names_missing_field() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), RATCHET.replace("phi = 0.0\n", "")).unwrap();
    let o = krqr(&["validate", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("phi"), "{}", stderr(&o));
}

#[test]
fn validate_accepts_good_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ok.toml"), RATCHET).unwrap();
    assert_eq!(krqr(&["validate", "ok.toml"], dir.path()).status.code(), Some(0));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("syntax.toml"), "scenario = ").unwrap();
    assert_eq!(krqr(&["run", "syntax.toml"], dir.path()).status.code(), Some(1));
    assert_eq!(krqr(&["run", "missing.toml"], dir.path()).status.code(), Some(1));
    assert_eq!(krqr(&["scenario", "fig9"], dir.path()).status.code(), Some(1));
    assert_eq!(krqr(&["scenario", "fig2", "--kicks", "many"], dir.path()).status.code(), Some(1));
    assert_eq!(krqr(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(krqr(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("blocker"), "").unwrap();
    fs::write(dir.path().join("cfg.toml"), RATCHET.replace("out/ratchet.csv", "blocker/ratchet")).unwrap();
    let o = krqr(&["run", "cfg.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("blocker"));
}

/// 176 is exactly the minimum width the validator accepts for 200
/// ballistic kicks; the Bessel tail still spills past it.
#[test]
fn leaking_ladder_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
scenario = "plane_wave"
beta0 = 0.0
engines = ["numeric"]
output_path = "out/leak"

[params]
k = 10.0
ell = 2
n_kicks = 200
ladder_half_width = 176
"#;
    fs::write(dir.path().join("cfg.toml"), cfg).unwrap();
    assert_eq!(krqr(&["validate", "cfg.toml"], dir.path()).status.code(), Some(0));
    let o = krqr(&["run", "cfg.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("plane_wave"));
}

#[test]
fn run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.toml"), RATCHET).unwrap();
    assert_eq!(krqr(&["run", "cfg.toml"], dir.path()).status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("out/ratchet.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,engine,mean_p,mean_e");
    assert_eq!(lines.len(), 1 + 2 * 11);
    assert!(lines[1].starts_with("0,numeric,"));
    assert!(lines[12].starts_with("0,analytic,"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/ratchet.json")).unwrap()).unwrap();
    for key in ["config", "series", "fits", "reconstruction", "engine_deviation"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn fig2_preset_has_two_engines_of_201_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = krqr(&["scenario", "fig2", "--out", "results/fig2.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("results/fig2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 201 * 2);
    assert!(dir.path().join("results/fig2.json").exists());
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = format!("t{threads}/fig3a");
        let o = Command::new(env!("CARGO_BIN_EXE_krqr"))
            .args(["scenario", "fig3a", "--kicks", "40", "--out", &out])
            .env("KRQR_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        outputs.push(fs::read(dir.path().join(format!("{out}.csv"))).unwrap());
        outputs.push(fs::read(dir.path().join(format!("{out}.json"))).unwrap());
    }
    assert_eq!(outputs[0], outputs[2]);
    assert!(outputs[1] != outputs[3], "json echoes differing output paths");
}

#[test]
fn mechanism_and_filter_presets() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(krqr(&["scenario", "fig1b", "--kicks", "3"], dir.path()).status.code(), Some(0));
    let fig1 = fs::read_to_string(dir.path().join("results/fig1b.csv")).unwrap();
    assert_eq!(fig1.lines().next(), Some("slice,t,xi,transfer,momentum"));
    assert_eq!(fig1.lines().count(), 1 + 8 * 4);
    assert_eq!(krqr(&["scenario", "fig4"], dir.path()).status.code(), Some(0));
    let fig4 = fs::read_to_string(dir.path().join("results/fig4.csv")).unwrap();
    assert_eq!(fig4.lines().count(), 1 + 2 * 801);
}
