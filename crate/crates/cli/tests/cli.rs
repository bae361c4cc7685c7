use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const MINIMAL: &str = r#"
n_max = 1
e = 0.0
checks = ["kramers"]
[modes]
kpoints = [[0.0, 0.0, 1.0, 1.0]]
count = 1
"#;

const COUPLED: &str = r#"
n_max = 2
e = 0.5
p = [0.1, 0.0, 0.3]
seed = 3
[modes]
kpoints = [[0.3, -0.4, 0.8, 40.0]]
"#;

fn kramers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kramers")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn minimal_config_passes_with_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.toml", MINIMAL);
    let out = dir.path().join("out");
    let o = kramers(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["passed"], true);
    let clusters = report["kramers"]["clusters"].as_array().unwrap();
    assert!(!clusters.is_empty());
    assert!(clusters.iter().all(|c| c["multiplicity"] == 2));
    let csv = fs::read_to_string(out.join("report_clusters.csv")).unwrap();
    assert!(csv.starts_with("mean,multiplicity,spread\n"));
    assert_eq!(csv.lines().count(), clusters.len() + 1);
}

#[test]
fn negative_control_is_an_expected_failure() {
    let dir = tempfile::tempdir().unwrap();
    let text = COUPLED.replace("seed = 3", "seed = 3\nchecks = [\"negative_control\"]");
    let cfg = write_config(dir.path(), "neg.toml", &text);
    let out = dir.path().join("out");
    let o = kramers(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report = read_json(&out.join("report.json"));
    let check = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "negative_control")
        .unwrap()
        .clone();
    assert_eq!(check["status"], "expected_failure");
    assert!(check["measured"].as_f64().unwrap() > check["threshold"].as_f64().unwrap());
    assert_eq!(report["negative_control"]["kramers"]["status"], "not_asserted");
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &MINIMAL.replace("n_max = 1", "n_max = -1"));
    let o = kramers(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_max"));

    let cfg = write_config(dir.path(), "typo.toml", &MINIMAL.replace("e = 0.0", "charge = 0.0"));
    let o = kramers(&["kramers", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("charge"));
}

#[test]
fn odd_spin_count_degenerates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n3.toml", &format!("n_spins = 3\n{COUPLED}"));
    let o = kramers(&["kramers", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["theta"]["sign"], -1);
    assert_eq!(report["hamiltonian"]["kind"], "n_spin");
    assert_eq!(report["kramers"]["verdict"]["status"], "holds");
}

#[test]
fn semigroup_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.toml", &format!("checks = [\"jreal\"]\n{COUPLED}"));
    let o = kramers(&["semigroup", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["semigroup"]["hiroshima_spohn"].as_array().unwrap().len(), 3);
    assert_eq!(report["jreal"].as_array().unwrap().len(), 9);
    assert!(report.get("kramers").is_none());
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("checks = [\"kramers\", \"semigroup\", \"jreal\", \"algebra\"]\n{COUPLED}");
    let cfg = write_config(dir.path(), "d.toml", &text);
    let strip = |p: &Path| {
        fs::read_to_string(p.join("report.json"))
            .unwrap()
            .lines()
            .filter(|l| !l.contains("\"wall_time_s\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    for name in ["a", "b"] {
        let o = kramers(&["run", &cfg, "--out", dir.path().join(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(strip(&dir.path().join("a")), strip(&dir.path().join("b")));
}

#[test]
fn sweep_over_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", COUPLED);
    let out = dir.path().join("sweep");
    let o = kramers(&["sweep", &cfg, "--axis", "e", "--values", "0,0.25,0.5,1.0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let manifest = read_json(&out.join("manifest.json"));
    let points = manifest["points"].as_array().unwrap();
    assert_eq!(points.len(), 4);
    for p in points {
        assert_eq!(p["passed"], true);
        let report = read_json(&out.join(p["report"].as_str().unwrap()));
        assert_eq!(report["kramers"]["verdict"]["status"], "holds");
    }
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let header = summary.lines().next().unwrap();
    assert!(header.starts_with("e,mean_1,"));
    assert!(header.ends_with(",max_pairing"));
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn sweep_over_momentum_keeps_evenness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", COUPLED);
    let out = dir.path().join("sweep");
    let o = kramers(&["sweep", &cfg, "--axis", "p_z", "--values", "0,0.5,1.0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut ground = Vec::new();
    for line in fs::read_to_string(out.join("summary.csv")).unwrap().lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        ground.push(cells[1].parse::<f64>().unwrap());
        for m in &cells[7..13] {
            assert_eq!(m.parse::<usize>().unwrap() % 2, 0);
        }
    }
    assert!(ground.windows(2).all(|w| (w[0] - w[1]).abs() > 1e-6), "{ground:?}");
}

#[test]
fn empty_sweep_and_failing_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", COUPLED);
    let out = dir.path().join("empty");
    let o = kramers(&["sweep", &cfg, "--axis", "e", "--values", "", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(&out.join("manifest.json"))["points"].as_array().unwrap().len(), 0);

    let out = dir.path().join("mixed");
    let o = kramers(&["sweep", &cfg, "--axis", "n_max", "--values", "1,-1,2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let manifest = read_json(&out.join("manifest.json"));
    let points = manifest["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    assert!(points[1]["error"].as_str().unwrap().contains("n_max"));
    assert_eq!(points[2]["passed"], true);
}

#[test]
fn export_and_build() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", COUPLED);
    let path = dir.path().join("h.txt");
    let o = kramers(&["export-matrix", &cfg, "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    // Two modes, N_max = 2: Fock dimension 6, spin doubling gives 12.
    for line in text.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(f.len(), 4);
        assert!(f[0].parse::<usize>().unwrap() < 12 && f[1].parse::<usize>().unwrap() < 12);
        f[2].parse::<f64>().unwrap();
        f[3].parse::<f64>().unwrap();
    }
    let o = kramers(&["export-matrix", &cfg, "--operator", "b0x"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(!text.is_empty());
    assert!(text
        .lines()
        .all(|l| l.split_whitespace().nth(2).unwrap().parse::<f64>().unwrap() == 0.0));

    let o = kramers(&["build", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let stats: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stats["hamiltonian"]["dim"], 12);
    assert_eq!(stats["theta_sign"], -1);
    assert_eq!(stats["commutation_residual"], 0.0);

    let o = kramers(&["spectrum", &cfg, "--lowest", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let eigs: Vec<f64> = String::from_utf8(o.stdout).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(eigs.len(), 4);
    assert!((eigs[0] - eigs[1]).abs() <= 1e-10);
}
