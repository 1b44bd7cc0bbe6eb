use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn anisoheat(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anisoheat")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn printed(o: &Output, key: &str) -> f64 {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().parse::<f64>().unwrap()))
        .unwrap_or_else(|| panic!("no '{key}' line in {}", stdout(o)))
}

/// Trapezoid sum over the `value` column of a kernel CSV on a uniform grid.
fn csv_mass(path: &Path) -> f64 {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().clone();
    let vcol = header.iter().position(|h| h == "value").unwrap();
    let mut axes: Vec<Vec<f64>> = vec![Vec::new(); vcol];
    let mut sum = 0.0;
    for rec in r.records() {
        let rec = rec.unwrap();
        for (a, axis) in axes.iter_mut().enumerate() {
            let c: f64 = rec[a].parse().unwrap();
            if !axis.contains(&c) {
                axis.push(c);
            }
        }
        sum += rec[vcol].parse::<f64>().unwrap();
    }
    let cell: f64 = axes.iter().map(|a| a[1] - a[0]).product();
    sum * cell
}

#[test]
fn kernel_mixed_writes_csv_and_unit_mass() {
    let dir = tempfile::tempdir().unwrap();
    let o = anisoheat(&["kernel", "--family", "mixed", "--m", "1", "--n", "1", "--t", "1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((printed(&o, "mass") - 1.0).abs() < 1e-8);
    let text = fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert!(text.starts_with("x1,y1,value\n"));
    assert!(!text.contains('\r'));
    assert!((csv_mass(&dir.path().join("kernel.csv")) - 1.0).abs() < 1e-8);
}

#[test]
fn kernel_heisenberg_mass() {
    let dir = tempfile::tempdir().unwrap();
    let o = anisoheat(
        &["kernel", "--family", "heisenberg", "--n", "1", "--t", "4", "--derivative", "z0", "--out", "h.csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((printed(&o, "mass") - 1.0).abs() < 1e-4);
    let path = dir.path().join("h.csv");
    assert!((csv_mass(&path) - 1.0).abs() < 1e-4);
    let header = fs::read_to_string(&path).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "z1,z2,theta,value,derivative");
}

#[test]
fn kernel_without_time_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = anisoheat(&["kernel", "--family", "mixed"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
    let o = anisoheat(&["kernel", "--family", "mixed", "--t", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = anisoheat(&["kernel", "--family", "heisenberg", "--t", "1", "--derivative", "q"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_identities() {
    let dir = tempfile::tempdir().unwrap();
    let o = anisoheat(&["verify", "--lemma", "2.1", "--k", "1", "--dim", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let line = stdout(&o);
    let residual: f64 = line.split("max residual ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(residual < 1e-6);
    let o = anisoheat(&["verify", "--lemma", "4.4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = anisoheat(&["verify", "--lemma", "9"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = anisoheat(&["verify", "--lemma", "3.3", "--k", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("k must be odd"));
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn rates_mixed_balanced() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"theorem": "thm1_1", "dims": {"m": 1, "n": 1}, "k": 1, "times": [1, 2, 4, 8, 16, 32, 64],
            "output": {"json": "r.json", "csv": "r.csv"}}"#,
    );
    let o = anisoheat(&["rates", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let slope = v["report"]["fit"]["slope"].as_f64().unwrap();
    assert!(slope <= -0.45, "slope {slope}");
    assert_eq!(v["report"]["records"].as_array().unwrap().len(), 7);
    assert!(v["report"]["records"][0]["grid"]["points"].is_array());
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(csv.starts_with("t,error,constant\n"));
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn rates_heisenberg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.json",
        r#"{"theorem": "thm1_3", "dims": {"n": 1}, "k": 1, "times": [1, 2, 4, 8, 16]}"#,
    );
    let o = anisoheat(&["rates", &cfg, "--json", "out/h.json", "--csv", "out/h.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/h.json")).unwrap()).unwrap();
    assert!(v["report"]["fit"]["slope"].as_f64().unwrap() <= -0.93);
}

#[test]
fn rates_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let even = write_config(
        dir.path(),
        "even.json",
        r#"{"theorem": "thm1_1", "dims": {"m": 1, "n": 1}, "k": 2, "times": [1, 2, 4]}"#,
    );
    let o = anisoheat(&["rates", &even], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("k must be odd"));
    let broken = write_config(dir.path(), "broken.json", "{ not json");
    assert_eq!(anisoheat(&["rates", &broken], dir.path()).status.code(), Some(2));
    assert_eq!(anisoheat(&["rates", "missing.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn rate_check_failure_exits_one() {
    // left-invariant first-order fields decay only like t^{-1/2} on ℍ¹
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "left.json",
        r#"{"theorem": "thm1_3", "dims": {"n": 1}, "k": 1, "times": [1, 2, 4],
            "fields": "left_invariant", "grid": {"z_points": 16, "theta_points": 16}}"#,
    );
    let o = anisoheat(&["rates", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"theorem": "thm3_2", "dims": {"m": 1, "n": 1}, "k": 1, "times": [1, 2, 4, 8]}"#,
    );
    let a = anisoheat(&["rates", &cfg, "--json", "a.json", "--csv", "a.csv"], dir.path());
    let mut b = Command::new(env!("CARGO_BIN_EXE_anisoheat"));
    b.args(["rates", &cfg, "--json", "b.json", "--csv", "b.csv"]).current_dir(dir.path()).env("ANISOHEAT_THREADS", "1");
    let b = b.output().unwrap();
    assert!(a.status.success() && b.status.success());
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("a.csv"), read("b.csv"));
}

#[test]
fn bad_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    for v in ["0", "many", "-3"] {
        let o = Command::new(env!("CARGO_BIN_EXE_anisoheat"))
            .args(["verify", "--lemma", "2.2"])
            .env("ANISOHEAT_THREADS", v)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(2), "{v}");
    }
}
