use serde_json::Value;
use std::process::{Command, Output};

fn torex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torex")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn analyze_hirzebruch(cusp: &str) -> Value {
    json(&torex(&["analyze", "--preset", "hirzebruch", "--m", "1", "--a", "2", "--cusp", cusp, "--grid", "16"]))
}

#[test]
fn analyze_section_cusp() {
    let r = analyze_hirzebruch("s-infinity");
    assert_eq!(r["schema"], "torex/1");
    assert_eq!(r["classification"]["final"], "PoincareExtremal");
    assert_eq!(r["consistent"], true);
    assert_eq!(r["solution"]["solution"]["kind"], "Calabi");
}

#[test]
fn analyze_fibre_cusp() {
    let r = analyze_hirzebruch("fibre");
    assert_eq!(r["classification"]["final"], "DonaldsonOnly");
    assert_eq!(r["solution"]["solution"]["kind"], "Hyperbolic");
    assert!(r["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("proved for this ansatz")));
}

#[test]
fn analyze_two_fibres() {
    assert_eq!(analyze_hirzebruch("fibre,fibre2")["classification"]["final"], "Unstable");
}

#[test]
fn analyze_is_deterministic() {
    let args = ["analyze", "--preset", "square", "--cusp", "bottom,left", "--grid", "12"];
    assert_eq!(torex(&args).stdout, torex(&args).stdout);
}

#[test]
fn analyze_reads_documents() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    let doc = r#"{"dimension": 2, "facets": [
        {"normal": [0, 1], "offset": 0, "weight": 0},
        {"normal": [-1, 0], "offset": 1, "weight": 1},
        {"normal": [0, -1], "offset": 1, "weight": 1},
        {"normal": [1, 0], "offset": 0, "weight": 1}]}"#;
    std::fs::write(&path, doc).unwrap();
    let r = json(&torex(&["analyze", "--input", path.to_str().unwrap(), "--grid", "12"]));
    assert_eq!(r["classification"]["final"], "PoincareExtremal");
    assert_eq!(r["input"]["cusps"], serde_json::json!([0]));
}

#[test]
fn input_errors_exit_with_two() {
    for args in [
        &["analyze", "--preset", "hirzebruch", "--m", "1"][..],
        &["analyze", "--preset", "hirzebruch", "--m", "1", "--a", "x"],
        &["analyze", "--preset", "square", "--cusp", "7"],
        &["analyze", "--preset", "square", "--grid", "4"],
        &["analyze", "--preset", "square", "--fd-step", "0.5"],
        &["analyze", "--input", "/nonexistent/polytope.json"],
        &["fchi", "--preset", "square", "--facet", "9"],
        &["construct", "--ansatz", "product", "--alpha", "0,1", "--beta", "0,1", "--r-alpha", "0,0", "--r-beta", "1,1"],
    ] {
        assert_eq!(torex(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn fchi_identities() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let r = json(&torex(&["fchi", "--preset", "hirzebruch", "--m", "2", "--a", "3", "--cusp", "fibre,s0", "--csv", csv.to_str().unwrap(), "--samples", "20"]));
    let facets = r["facets"].as_array().unwrap();
    assert_eq!(facets.len(), 2);
    for f in facets {
        assert_eq!(f["value_at_zero"], "0");
        assert_eq!(f["slope_at_zero"], "0");
        assert_eq!(f["second_derivative_matches"], true);
        assert_eq!(f["c_max"], f["label_max"]);
        assert!(f["max_degree"].as_u64().unwrap() <= 4);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 20);
}

#[test]
fn plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = json(&torex(&["plot", "--preset", "hirzebruch", "--m", "1", "--a", "2", "--cusp", "s0", "--grid", "10", "--out", out, "--panels"]));
    let lines = |name: &str| std::fs::read_to_string(dir.path().join(name)).unwrap().lines().count();
    assert_eq!(lines("outline.csv"), 1 + 5);
    assert_eq!(lines("scalar.csv"), 1 + 100);
    assert_eq!(lines("cusps.csv"), 1 + 1);
    assert!(lines("boundary.csv") > 1);
    let verdicts: Vec<&str> = r["panels"].as_array().unwrap().iter().map(|p| p["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["PoincareExtremal", "PoincareExtremal", "DonaldsonOnly", "DonaldsonOnly", "Unstable", "Unstable"]);
    assert_eq!(lines("panels.csv"), 7);
}

#[test]
fn plot_metric_matches_extremal_function() {
    let dir = tempfile::tempdir().unwrap();
    json(&torex(&["plot", "--preset", "square", "--cusp", "bottom", "--grid", "8", "--out", dir.path().to_str().unwrap()]));
    let mut rd = csv::Reader::from_path(dir.path().join("scalar.csv")).unwrap();
    for rec in rd.records() {
        let rec = rec.unwrap();
        if &rec[4] == "true" {
            let (s, m): (f64, f64) = (rec[5].parse().unwrap(), rec[6].parse().unwrap());
            assert!((s - m).abs() < 1e-9, "{s} vs {m}");
        }
    }
}

#[test]
fn sweep_opposite_pair_vanishes_on_diagonal() {
    let out = torex(&["sweep", "--preset", "qk", "--q", "2,3", "--k", "1,2,3", "--cusp", "1,3", "--format", "json"]);
    for row in json(&out)["rows"].as_array().unwrap() {
        let zero = row["p1"] == row["p2"];
        for s in row["signs"].as_array().unwrap() {
            assert_eq!(s.as_i64().unwrap() == 0, zero, "{row}");
        }
    }
}

#[test]
fn sweep_adjacent_pairs_positive() {
    let out = torex(&["sweep", "--preset", "qk", "--q", "3,4,5", "--k", "2", "--format", "json"]);
    for row in json(&out)["rows"].as_array().unwrap() {
        let c: Vec<i64> = row["cusps"].as_array().unwrap().iter().map(|v| v.as_i64().unwrap()).collect();
        if (c[1] - c[0]) % 2 == 1 {
            assert!(row["signs"].as_array().unwrap().iter().all(|s| s == 1), "{row}");
        }
    }
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let base = ["sweep", "--preset", "hirzebruch", "--m", "1,2", "--a", "3/2,3"];
    let one = torex(&[&base[..], &["--jobs", "1"]].concat());
    let many = torex(&[&base[..], &["--jobs", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(String::from_utf8_lossy(&one.stdout).lines().count(), 1 + 4 * 15);
}

#[test]
fn construct_each_ansatz() {
    let cases: [&[&str]; 4] = [
        &["--ansatz", "product", "--alpha", "0,1", "--beta", "0,2", "--r-alpha", "0,1", "--r-beta", "1,1"],
        &["--ansatz", "calabi", "--alpha", "1,2", "--beta", "0,1", "--r-alpha", "0,0", "--r-beta", "1,1"],
        &["--ansatz", "bryant", "--labels", "1,2"],
        &["--ansatz", "hyperbolic", "--m", "2", "--alpha-inf", "12"],
    ];
    for args in cases {
        let r = json(&torex(&[&["construct", "--grid", "12"][..], args].concat()));
        assert_eq!(r["consistent"], true, "{args:?}");
        assert!(r["residual"]["max_abs"].as_f64().unwrap() < 1e-5, "{args:?}");
    }
}
