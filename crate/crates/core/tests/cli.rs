use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn msflow(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msflow")).args(args).env("MSFLOW_OUTPUT_ROOT", root).output().unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn report_value(report: &str, key: &str) -> f64 {
    report.lines().find_map(|l| l.strip_prefix(key)).unwrap().trim().parse().unwrap()
}

#[test]
fn mode_two_run_writes_artifacts() {
    let root = tempfile::tempdir().unwrap();
    let out = msflow(root.path(), &["run", config("mode2.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = root.path().join("runs/mode2");
    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let perimeter = column(&csv, "perimeter");
    assert!(perimeter.windows(2).all(|w| w[1] <= w[0] + 1e-8));
    assert!(dir.join("snapshot_000.svg").exists() && dir.join("snapshot_004.svg").exists());
    let report = std::fs::read_to_string(dir.join("report.txt")).unwrap();
    assert!(report.contains("verdict converged"));
    assert!(!std::fs::read_dir(&dir).unwrap().any(|e| e.unwrap().path().extension().is_some_and(|x| x == "tmp")));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for root in [a.path(), b.path()] {
        assert_eq!(msflow(root, &["run", config("rough.toml").to_str().unwrap()]).status.code(), Some(0));
    }
    for f in ["trajectory.csv", "report.txt", "snapshot_002.svg"] {
        let x = std::fs::read(a.path().join("runs/rough").join(f)).unwrap();
        let y = std::fs::read(b.path().join("runs/rough").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn subcritical_weight_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("mode2.toml")).unwrap().replace("mu = 0.7", "mu = 0.5");
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let out = msflow(dir.path(), &["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.mu"));
}

#[test]
fn missing_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = msflow(dir.path(), &["run", dir.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn heat_decays() {
    let root = tempfile::tempdir().unwrap();
    let out = msflow(root.path(), &["run", config("heat.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(root.path().join("runs/heat/report.txt")).unwrap();
    assert!(report_value(&report, "final_norm") < report_value(&report, "initial_norm"));
    assert!(root.path().join("runs/heat/final_state.csv").exists());
}

#[test]
fn reaction_breakdown_exits_with_two() {
    let root = tempfile::tempdir().unwrap();
    let out = msflow(root.path(), &["run", config("reaction.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report = std::fs::read_to_string(root.path().join("runs/reaction/report.txt")).unwrap();
    assert!(report.contains("breakdown"));
}

#[test]
fn linearize_circles_and_reject_ellipse() {
    let root = tempfile::tempdir().unwrap();
    for (name, dir) in [("circle.toml", "runs/circle"), ("off_center.toml", "runs/off_center")] {
        let out = msflow(root.path(), &["linearize", config(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let text = std::fs::read_to_string(root.path().join(dir).join("linearization.txt")).unwrap();
        assert!(text.contains("kernel_dimension 3") && text.contains("verdict normally-stable"), "{text}");
    }
    let out = msflow(root.path(), &["linearize", config("ellipse.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an equilibrium"));
}

#[test]
fn output_root_is_optional() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("heat.toml")).unwrap().replace("runs/heat", &dir.path().join("plain").display().to_string());
    let path = dir.path().join("heat.toml");
    std::fs::write(&path, text).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_msflow")).args(["run", path.to_str().unwrap()]).env_remove("MSFLOW_OUTPUT_ROOT").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("plain/trajectory.csv").exists());
}

#[test]
fn verify_suites() {
    let root = tempfile::tempdir().unwrap();
    let out = msflow(root.path(), &["verify", "geometry"]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("Gauss-Bonnet") && table.contains("round trip"));
    let out = msflow(root.path(), &["verify", "elliptic"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("-128/17"));
    assert_eq!(msflow(root.path(), &["verify", "everything"]).status.code(), Some(1));
}
