use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const HEADER: &str = "sweep_var,sweep_value,mode,engine,outage,throughput,std_err,trials,seed";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fasaris"))
}

fn write(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn power_sweep_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "p.json",
        r#"{"rate": 4.5, "trials": 4000, "sweep": {"variable": "P", "values": [6, 10]}}"#,
    );
    let out = dir.path().join("p.csv");
    let o = run(&["run"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), HEADER);
    let r = rows(&text);
    assert_eq!(r.len(), 2 * (4 + 2));
    for engine in ["mc", "bdma", "iae"] {
        let vals: Vec<f64> = r
            .iter()
            .filter(|x| x[3] == engine && x[2] == "FAS_ARIS")
            .map(|x| x[4].parse().unwrap())
            .collect();
        assert_eq!(vals.len(), 2);
        assert!(vals[1] <= vals[0], "{engine}: {vals:?}");
    }
    for x in &r {
        let analytic = x[3] != "mc";
        assert_eq!(x[6].is_empty(), analytic);
        assert_eq!(x[7].is_empty(), analytic);
        assert_eq!(x[8].is_empty(), analytic);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "r.json",
        r#"{"engines": ["mc"], "trials": 3000, "seed": 5, "sweep": {"variable": "R", "values": [4, 4.5, 5]}}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    assert!(run(&["run"], &cfg, &a).status.success());
    assert!(run(&["--threads", "1", "run"], &cfg, &b).status.success());
    assert!(run(&["run", "--seed", "6"], &cfg, &c).status.success());
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());
    assert_ne!(a, std::fs::read(c).unwrap());
}

#[test]
fn iae_flat_in_port_count() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "n.json",
        r#"{"engines": ["iae"], "rate": 4.5, "sweep": {"variable": "N", "values": [50, 75, 100]}}"#,
    );
    let out = dir.path().join("n.csv");
    assert!(run(&["run"], &cfg, &out).status.success());
    let v: Vec<f64> = rows(&std::fs::read_to_string(out).unwrap())
        .iter()
        .map(|x| x[4].parse().unwrap())
        .collect();
    let spread =
        v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.01, "{v:?}");
}

#[test]
fn invalid_configs_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    let cases = [
        r#"{"sweep": {"variable": "P", "values": []}}"#,
        r#"{"sweep": {"variable": "N", "values": [10.5]}}"#,
        r#"{"m_elements": 0, "sweep": {"variable": "P", "values": [10]}}"#,
        r#"{"engines": [], "sweep": {"variable": "P", "values": [10]}}"#,
        r#"{"rate": 2"#,
        r#"{"engines": ["mc"]}"#,
    ];
    for (i, json) in cases.iter().enumerate() {
        let cfg = write(&dir, &format!("bad{i}.json"), json);
        let o = run(&["run"], &cfg, &out);
        assert_eq!(o.status.code(), Some(2), "{json}");
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["run"], &dir.path().join("missing.json"), &out);
    assert_eq!(o.status.code(), Some(2));
    let ok = write(
        &dir,
        "ok.json",
        r#"{"engines": ["iae"], "sweep": {"variable": "P", "values": [10]}}"#,
    );
    let o = run(&["run"], &ok, &dir.path().join("no/such/dir.csv"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn engine_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    // K M = 0.2 leaves no region-one threshold
    let cfg = write(
        &dir,
        "k.json",
        r#"{"rician_k": 0.1, "m_elements": 2, "engines": ["ratemax"], "sweep": {"variable": "P", "values": [10]}}"#,
    );
    let o = run(&["run"], &cfg, &dir.path().join("k.csv"));
    assert_eq!(o.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("ratemax") && msg.contains("P=10"), "{msg}");
    let o = run(&["optimize"], &cfg, &dir.path().join("k.json.out"));
    assert_eq!(o.status.code(), Some(3));
}

fn optimize(json: &str) -> Value {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "o.json", json);
    let out = dir.path().join("o.out.json");
    let o = run(&["optimize"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap()
}

#[test]
fn optimize_defaults() {
    let v = optimize("{}");
    let r = &v["result"];
    let bits = v["interval_bits"].as_f64().unwrap();
    assert!((bits - 1.61).abs() <= 0.15, "{bits}");
    let lo = (1.0 + r["lambda0"].as_f64().unwrap()).log2();
    let hi = (1.0 + r["lambda1"].as_f64().unwrap()).log2();
    let rf = r["r_final"].as_f64().unwrap();
    assert!((lo..=hi).contains(&rf), "{lo} {rf} {hi}");
    assert!(r["evaluations"].as_u64().unwrap() <= r["eval_budget"].as_u64().unwrap());
    let o = &v["options"];
    let budget = ["grid_points", "ascent_max_iter", "newton_max_iter"]
        .iter()
        .map(|k| o[k].as_u64().unwrap())
        .sum::<u64>()
        + 16;
    assert_eq!(r["eval_budget"].as_u64().unwrap(), budget);
}

#[test]
fn optimize_degenerate_box() {
    let v = optimize(r#"{"rate_min": 2, "rate_max": 2}"#);
    assert_eq!(v["result"]["r_final"].as_f64().unwrap(), 2.0);
}
