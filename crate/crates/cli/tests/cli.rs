use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sp4moment"))
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("sp4moment-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn report(path: &PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn build_tables_is_idempotent_and_tampering_is_refused() {
    let dir = scratch("tables");
    let build = || run(bin().args(["build-tables", "--k", "10", "--dmax", "200", "--cache-dir"]).arg(&dir));
    assert!(build().status.success());
    let file = dir.join("jacobi_k10_d200.txt");
    let first = std::fs::read(&file).unwrap();
    assert!(String::from_utf8_lossy(&first).lines().any(|l| l == "3 1 1"));
    assert!(build().status.success());
    assert_eq!(std::fs::read(&file).unwrap(), first);

    let tampered = String::from_utf8(first).unwrap().replacen("\n7 -16 1\n", "\n7 -15 1\n", 1);
    std::fs::write(&file, tampered).unwrap();
    let out = run(bin().args(["verify", "--suite", "siegel", "--dmax", "200", "--cache-dir"]).arg(&dir));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hash"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn passing_suite_exits_zero_with_stable_schema() {
    let dir = scratch("pass");
    let out_path = dir.join("report.json");
    let out = run(bin().args(["verify", "--suite", "siegel", "--dmax", "60", "--out"]).arg(&out_path));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out_path);
    assert_eq!(r["suite"], "siegel");
    for key in ["suite", "checks", "config", "versions"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    for c in r["checks"].as_array().unwrap() {
        for key in ["name", "value", "bound", "relation", "pass"] {
            assert!(c.get(key).is_some(), "{key}");
        }
    }
    assert!(r["versions"]["sp4moment-cli"].is_string());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn flags_override_the_config_file() {
    let dir = scratch("config");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "seed = 5\ndmax = 40\nprecision-bits = 96\n").unwrap();
    let out_path = dir.join("r.json");
    let out = run(bin().args(["verify", "--suite", "siegel", "--seed", "9", "--config"]).arg(&cfg).arg("--out").arg(&out_path));
    assert!(out.status.success());
    let r = report(&out_path);
    assert_eq!(r["config"]["seed"], 9);
    assert_eq!(r["config"]["d_max"], 40);
    assert_eq!(r["config"]["precision_bits"], 96);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = run(bin().args(["verify", "--suite", "siegel", "--config"]).arg(&cfg));
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_input_is_an_error_not_a_failure() {
    let out = run(bin().args(["verify", "--suite", "nope"]));
    assert_eq!(out.status.code(), Some(2));
    let out = run(bin().args(["verify", "--suite", "siegel", "--precision-bits", "32"]));
    assert_eq!(out.status.code(), Some(2));
    let dir = scratch("nobuild");
    let out = run(bin().args(["verify", "--suite", "siegel", "--no-build", "--cache-dir"]).arg(&dir));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
    std::fs::remove_dir_all(&dir).unwrap();
}

/// The special suite contains the small-argument Bessel bound, which does
/// not hold for ℓ >= 8.5, so the run must exit with status 1.
#[test]
fn failing_check_gives_exit_status_one() {
    let dir = scratch("fail");
    let out_path = dir.join("special.json");
    let out = run(bin().args(["verify", "--suite", "special", "--out"]).arg(&out_path));
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out_path);
    let failed: Vec<&str> = r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    assert!(failed.iter().all(|n| n.starts_with("bessel_small_argument_ratio")), "{failed:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL bessel_small_argument_ratio_l8.5"));
    std::fs::remove_dir_all(&dir).unwrap();
}
