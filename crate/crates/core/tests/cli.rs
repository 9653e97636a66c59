use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hypermotif"));
    c.env_remove("HYPERMOTIF_SEED");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn write_edges(dir: &Path, name: &str, edges: &[(String, String)]) -> PathBuf {
    let p = dir.join(name);
    let text: String = edges.iter().map(|(a, b)| format!("{a}\t{b}\n")).collect();
    std::fs::write(&p, text).unwrap();
    p
}

/// 30 node-disjoint FFLs plus a sparse random background.
fn planted_ffl_edges() -> Vec<(String, String)> {
    let mut e = Vec::new();
    for i in 0..30 {
        let (x, y, z) = (format!("x{i}"), format!("y{i}"), format!("z{i}"));
        e.push((x.clone(), y.clone()));
        e.push((y, z.clone()));
        e.push((x, z));
    }
    let mut s = 12345u64;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 33) as usize % 120
    };
    for _ in 0..120 {
        let (a, b) = (next(), next());
        if a != b {
            e.push((format!("n{a}"), format!("n{b}")));
        }
    }
    e
}

#[test]
fn census_of_a_three_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_edges(dir.path(), "c.txt", &[("a".into(), "b".into()), ("b".into(), "c".into()), ("c".into(), "a".into())]);
    let o = run(&["census", net.to_str().unwrap(), "--ensemble", "0"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = read_json(dir.path().join("census.json"));
    assert_eq!(j["tool"], "hypermotif");
    assert_eq!(j["command"], "census");
    assert_eq!(j["seed"], 0);
    let loop3 = j["result"]["triads"].as_array().unwrap().iter().find(|t| t["class"] == "LOOP3").unwrap();
    assert_eq!(loop3["count"], 1);
}

#[test]
fn census_flags_planted_ffls() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_edges(dir.path(), "ffl.txt", &planted_ffl_edges());
    let o = run(&["census", net.to_str().unwrap(), "--ensemble", "20", "--seed", "5"], dir.path());
    assert!(o.status.success());
    let j = read_json(dir.path().join("census.json"));
    let motifs: Vec<&str> = j["result"]["motifs"].as_array().unwrap().iter().map(|m| m.as_str().unwrap()).collect();
    assert!(motifs.contains(&"FFL"), "{motifs:?}");
}

#[test]
fn empty_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("empty.txt");
    std::fs::write(&net, "# nothing\n").unwrap();
    let o = run(&["census", net.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["detect", "/nonexistent/net.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_edges(dir.path(), "n.txt", &[("a".into(), "b".into())]);
    assert_eq!(run(&["census", net.to_str().unwrap(), "--motif-size", "4"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["simulate", "M999"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["portrait", "M4-5", "--grid", "1"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn detect_without_motifs_reports_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let edges: Vec<(String, String)> = (0..20).map(|i| (format!("a{i}"), format!("b{i}"))).collect();
    let net = write_edges(dir.path(), "m.txt", &edges);
    let o = run(&["detect", net.to_str().unwrap(), "--ensemble", "3"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = read_json(dir.path().join("detect.json"));
    assert_eq!(j["result"]["results"].as_array().unwrap().len(), 0);
    let csv = std::fs::read_to_string(dir.path().join("detect.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn detect_and_downsample_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_edges(dir.path(), "p.txt", &planted_ffl_edges());
    let mut outputs = Vec::new();
    for run_dir in ["r1", "r2"] {
        let d = dir.path().join(run_dir);
        let o = run(
            &["detect", net.to_str().unwrap(), "--ensemble", "4", "--seed", "11", "--write-ensemble", "--max-iterations", "200000"],
            &d,
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let o = run(&["downsample", net.to_str().unwrap(), "--sz", "60", "--seed", "11", "--validate", "--motif-ensemble", "5"], &d);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(d);
    }
    for f in ["detect.json", "detect.csv", "ensemble_0.tsv", "ensemble_3.tsv", "downsample.json", "downsample.tsv"] {
        let a = std::fs::read(outputs[0].join(f)).unwrap();
        let b = std::fs::read(outputs[1].join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between runs");
    }
    // The seed also comes from the environment.
    let d = dir.path().join("env");
    let o = bin()
        .args(["downsample", net.to_str().unwrap(), "--sz", "60", "--out"])
        .arg(&d)
        .env("HYPERMOTIF_SEED", "11")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        std::fs::read(d.join("downsample.tsv")).unwrap(),
        std::fs::read(outputs[0].join("downsample.tsv")).unwrap()
    );
    assert_eq!(read_json(d.join("downsample.json"))["seed"], 11);
}

#[test]
fn enumerate_counts_on_stdout() {
    let json = |args: &[&str]| -> Value {
        let o = bin().args(args).output().unwrap();
        assert!(o.status.success());
        serde_json::from_slice(&o.stdout).unwrap()
    };
    assert_eq!(json(&["enumerate", "FFL", "FFL"])["result"]["topologies"].as_array().unwrap().len(), 12);
    assert_eq!(json(&["enumerate", "SL", "FFL", "--count-only"])["result"]["count"], 3);
    assert_eq!(
        json(&["enumerate", "FFL", "FFL", "--mode", "interact", "--count-only"])["result"]["counts"]["labeled"],
        "262144"
    );
}

#[test]
fn simulate_coherent_ffl_turns_on_with_delay() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "M14-16", "--init", "X=0,Y=0,Z=0"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = read_json(dir.path().join("simulate_M14-16.json"));
    let run0 = &j["result"]["runs"][0];
    assert_eq!(run0["classification"]["variables"][2]["class"], "ON");
    let z = &run0["pulses"][2];
    assert_eq!(z["variable"], "Z");
    assert!(z["response_delay"].as_f64().unwrap() > 0.5);
    let csv = std::fs::read_to_string(dir.path().join("traj_M14-16.csv")).unwrap();
    assert!(csv.starts_with("t,X,Y,Z\n0,0,0,0\n"));
    assert_eq!(csv.lines().count(), 20002);
}

#[test]
fn simulate_reports_fixed_points_and_phases() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "M3", "--n", "1"], dir.path());
    assert!(o.status.success());
    assert_eq!(read_json(dir.path().join("simulate_M3.json"))["result"]["stable_fixed_points"], 1);

    let o = run(
        &["simulate", "M66-69", "--init", "X=0.1,Y=0.2,Z=0.3,W=0.4", "--init", "X=0.5", "--horizon", "100"],
        dir.path(),
    );
    assert!(o.status.success());
    let j = read_json(dir.path().join("simulate_M66-69.json"));
    for run in j["result"]["runs"].as_array().unwrap() {
        assert_eq!(run["classification"]["overall"], "SUSTAINED_OSCILLATION");
        let zw = run["phases"].as_array().unwrap().iter().find(|p| p["a"] == "Z" && p["b"] == "W").unwrap();
        assert_eq!(zw["relation"], "anti-phase");
    }
    assert!(dir.path().join("traj_M66-69_0.csv").exists());
    assert!(dir.path().join("traj_M66-69_1.csv").exists());
}

#[test]
fn simulate_custom_topology() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("t.json");
    std::fs::write(
        &topo,
        r#"{"id": "relax", "variables": ["A", "B"], "edges": [{"from": "A", "to": "B", "sign": "+", "n": 2, "k": 0.5}], "constants": {"A": 1.0}}"#,
    )
    .unwrap();
    let o = run(&["simulate", "--topology", topo.to_str().unwrap(), "--horizon", "20"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = read_json(dir.path().join("simulate_relax.json"));
    assert_eq!(j["result"]["model"]["equations"][0], "A' = 1 - A");
    assert_eq!(j["result"]["runs"][0]["classification"]["overall"], "ON");
}

#[test]
fn portraits() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["portrait", "M4-5"], dir.path());
    assert!(o.status.success());
    let j = read_json(dir.path().join("portrait_M4-5.json"));
    assert_eq!(j["result"]["nullcline_intersections"].as_array().unwrap().len(), 3);
    let field = std::fs::read_to_string(dir.path().join("portrait_M4-5_field.csv")).unwrap();
    assert_eq!(field.lines().next(), Some("x,y,dx,dy"));
    assert_eq!(field.lines().count(), 101 * 101 + 1);

    let o = run(&["portrait", "S1-S2", "--grid", "41"], dir.path());
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("portrait_S1-S2_nullclines.csv")).unwrap();
    let y_points: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("Y,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(!y_points.is_empty());
    assert!(y_points.iter().all(|y| (y - 1.0).abs() < 1e-9));
}

#[test]
fn catalog_lists_models() {
    let o = bin().arg("catalog").output().unwrap();
    assert!(o.status.success());
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    let ids: Vec<&str> = j["result"].as_array().unwrap().iter().map(|m| m["id"].as_str().unwrap()).collect();
    for id in ["M3", "M4-5", "M10-11", "M27-30-coherent", "M66-69", "S1-S2"] {
        assert!(ids.contains(&id), "{id} missing");
    }
}
