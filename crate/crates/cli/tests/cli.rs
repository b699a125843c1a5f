use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn interferox(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_interferox"))
        .args(args)
        .current_dir(cwd)
        .env_remove("INTERFEROX_OUT")
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn afshar_stage_three_writes_manifest_and_profiles() {
    let tmp = tempfile::tempdir().unwrap();
    let out = interferox(
        &["afshar", "--stage", "3", "--seed", "42", "--out", "runs/a3"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("runs/a3");
    let m = manifest(&dir);
    assert_eq!(m["scenario"], "afshar3");
    assert_eq!(m["params"]["seed"], 42);
    assert_eq!(m["params"]["padded_points"], 1 << 19);
    assert!(m["metrics"]["flux_ratio"].as_f64().unwrap() > 0.99);
    assert!(m["generated_at"].is_u64());
    for f in m["files"].as_array().unwrap() {
        assert!(tmp.path().join(f.as_str().unwrap()).exists());
    }
    let profile = fs::read_to_string(dir.join("sigma1_profile.csv")).unwrap();
    assert_eq!(profile.lines().next(), Some("x_m,intensity"));
    assert_eq!(profile.lines().count(), 1 + (1 << 14));
}

#[test]
fn invalid_stage_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = interferox(&["afshar", "--stage", "9"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("runs").exists());
}

#[test]
fn bad_grid_points_and_unknown_flags_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        interferox(&["afshar", "--grid-points", "1000"], tmp.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        interferox(&["gha", "--colour", "red"], tmp.path()).status.code(),
        Some(2)
    );
}

#[test]
fn bohm_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["r1", "r2"] {
        let out = interferox(
            &["bohm", "--particles", "2000", "--seed", "7", "--out", dir],
            tmp.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["trajectories.csv", "field.csv"] {
        let a = fs::read(tmp.path().join("r1").join(f)).unwrap();
        let b = fs::read(tmp.path().join("r2").join(f)).unwrap();
        assert!(a == b, "{f} differs between runs");
    }
    let mut m1 = manifest(&tmp.path().join("r1"));
    let mut m2 = manifest(&tmp.path().join("r2"));
    for m in [&mut m1, &mut m2] {
        let obj = m.as_object_mut().unwrap();
        obj.remove("generated_at");
        obj.remove("files");
    }
    assert_eq!(m1, m2);
}

#[test]
fn config_file_then_flags() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("run.toml"),
        "seed = 5\nshots = 2000\n[bggp]\nangle = 1.0471975511965976\nseed = 6\n",
    )
    .unwrap();
    let out = interferox(&["bggp", "--config", "run.toml", "--out", "b"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(&tmp.path().join("b"));
    assert_eq!(m["params"]["seed"], 6);
    assert_eq!(m["params"]["shots"], 2000);
    assert!((m["metrics"]["p_ordinary"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    let out = interferox(
        &["bggp", "--config", "run.toml", "--seed", "9", "--out", "c"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(manifest(&tmp.path().join("c"))["params"]["seed"], 9);
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.toml"), "[afshar]\nwire_widht = 1e-4\n").unwrap();
    let out = interferox(&["afshar", "--config", "bad.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wire_widht"));
}

#[test]
fn physics_errors_exit_one_and_name_the_module() {
    let tmp = tempfile::tempdir().unwrap();
    let quarter = std::f64::consts::FRAC_PI_4.to_string();
    let out = interferox(&["measure", "weak", "--chi", &quarter, "--alpha", &quarter], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("measurement_model"));

    let out = interferox(&["bggp", "--angle", "4.0"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiments"));
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_interferox"))
        .args(["measure", "impulsive", "--shots", "1000"])
        .current_dir(tmp.path())
        .env("INTERFEROX_OUT", "from_env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(&tmp.path().join("from_env"));
    assert_eq!(m["scenario"], "measure_impulsive");
    assert!(tmp.path().join("from_env/report.json").exists());
}

#[test]
fn duality_from_stage_three_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["afshar", "--stage", "3", "--grid-points", "4096", "--out", "a"];
    assert_eq!(interferox(&args, tmp.path()).status.code(), Some(0));
    let out = interferox(&["duality", "--from", "a/manifest.json", "--out", "d"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let d = manifest(&tmp.path().join("d"));
    let a = manifest(&tmp.path().join("a"));
    assert_eq!(d["metrics"]["duality_sum_trace"], a["metrics"]["duality_sum_trace"]);
    assert_eq!(d["metrics"]["control_predictability"], 1.0);

    let one = ["afshar", "--stage", "1", "--grid-points", "4096", "--out", "s1"];
    assert_eq!(interferox(&one, tmp.path()).status.code(), Some(0));
    let out = interferox(&["duality", "--from", "s1/manifest.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_lists_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let out = interferox(&["--help"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["gha", "bggp", "afshar", "bohm", "measure", "duality", "all"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    let out = interferox(&["afshar", "--help"], tmp.path());
    assert!(String::from_utf8_lossy(&out.stdout).contains("3a"));
}
