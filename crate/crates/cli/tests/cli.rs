use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn exe() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_exposure-lab"));
    cmd.env_remove("EXPOSURE_LAB_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scan_qubit_writes_expected_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.csv");
    let o = run(&["scan-qubit", "--n", "2", "--grid", "11", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("delta,alpha2,exposure,renyi,valid\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + 11 * 11);
    let summary = String::from_utf8_lossy(&o.stdout);
    assert_eq!(summary.lines().count(), 1);
    assert!(summary.contains("121 rows"));
}

#[test]
fn scan_rejects_order_one() {
    let o = run(&["scan-qubit", "--n", "1"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("must exceed 1"));
    let o = run(&["scan-qutrit", "--n", "0.5"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["verify", "not-a-check", "--seed", "1"])), 1);
    assert_eq!(code(&run(&["verify", "free-hamiltonian"])), 1);
    assert_eq!(code(&run(&["scan-qubit", "--grid", "many"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn verify_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    for ext in ["csv", "json"] {
        let a = dir.path().join(format!("a.{ext}"));
        let b = dir.path().join(format!("b.{ext}"));
        for p in [&a, &b] {
            let o = run(&[
                "verify",
                "free-hamiltonian",
                "--trials",
                "200",
                "--seed",
                "7",
                "--out",
                path_str(p),
            ]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
    let c = dir.path().join("c.csv");
    run(&[
        "verify",
        "free-hamiltonian",
        "--trials",
        "200",
        "--seed",
        "8",
        "--out",
        path_str(&c),
    ]);
    assert_ne!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = ["scan-qutrit", "--grid", "15", "--out"];
    assert!(exe()
        .args(args)
        .arg(&a)
        .env("EXPOSURE_LAB_THREADS", "1")
        .status()
        .unwrap()
        .success());
    assert!(exe()
        .args(args)
        .arg(&b)
        .env("EXPOSURE_LAB_THREADS", "4")
        .status()
        .unwrap()
        .success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let bad = exe()
        .args(args)
        .arg(&a)
        .env("EXPOSURE_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 1);
}

#[test]
fn csv_parses_back_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let (csv_path, json_path) = (dir.path().join("q.csv"), dir.path().join("q.json"));
    for p in [&csv_path, &json_path] {
        assert_eq!(
            code(&run(&["scan-qubit", "--grid", "9", "--n", "2.5", "--out", path_str(p)])),
            0
        );
    }
    let doc: Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    let json_rows = doc["rows"].as_array().unwrap();
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(headers, ["delta", "alpha2", "exposure", "renyi", "valid"]);
    let keys: Vec<&str> = doc["rows"][0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, headers);
    let mut count = 0;
    for (rec, row) in reader.records().zip(json_rows) {
        let rec = rec.unwrap();
        for (i, name) in headers.iter().enumerate().take(4) {
            match row[name].as_f64() {
                Some(x) => assert_eq!(rec[i].parse::<f64>().unwrap().to_bits(), x.to_bits(), "{name}"),
                None => assert_eq!(&rec[i], ""),
            }
        }
        assert_eq!(&rec[4], row["valid"].as_bool().unwrap().to_string());
        count += 1;
    }
    assert_eq!(count, 81);
}

#[test]
fn empty_result_is_header_only() {
    // δ = 0 and δ = 1 admit only pure states, so no point reaches H_2 = 0.4.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iso.csv");
    let o = run(&["isocurve", "--h2", "0.4", "--points", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(&out).unwrap(), "delta,alpha2,exposure,renyi\n");
}

#[test]
fn invalid_parameters_exit_two_without_touching_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("keep.csv");
    fs::write(&out, "previous\n").unwrap();
    let cases: [&[&str]; 4] = [
        &["spectrum", "--purities", "1,0.9,0.16"],
        &["udw-evolve", "--delta", "0.5", "--alpha2", "0.3"],
        &["scan-qutrit", "--op", "Sx+Q"],
        &["scan-qubit", "--grid", "1"],
    ];
    for args in cases {
        let o = exe().args(args).arg("--out").arg(&out).output().unwrap();
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read_to_string(&out).unwrap(), "previous\n");
    assert_eq!(
        fs::read_dir(dir.path()).unwrap().count(),
        1,
        "temporary files left behind"
    );
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("q.csv");
    let o = run(&["spectrum", "--purities", "1,0.5", "--out", path_str(&out)]);
    assert_eq!(code(&o), 3);
    assert!(!out.exists());
}

#[test]
fn spectrum_recovers_worked_example() {
    let o = run(&["spectrum", "--purities", "1,0.38,0.16", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["schema_version"], "1");
    assert_eq!(doc["command"]["name"], "spectrum");
    let got: Vec<f64> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["eigenvalue"].as_f64().unwrap())
        .collect();
    for (x, y) in got.iter().zip([0.5, 0.3, 0.2]) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn onset_report_reads_matrix_files() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    };
    let rho_a = write("ra.json", "[[[0.7,0],[0.1,0.1]],[[0.1,-0.1],[0.3,0]]]");
    let rho_b = write("rb.json", "[[[1,0],[0,0]],[[0,0],[0,0]]]");
    let sz = write("sz.json", "[[[1,0],[0,0]],[[0,0],[-1,0]]]");
    let sx = write("sx.json", "[[[0,0],[1,0]],[[1,0],[0,0]]]");
    let out = dir.path().join("r.json");
    let args = [
        "onset-report",
        "--rho-a",
        path_str(&rho_a),
        "--rho-b",
        path_str(&rho_b),
        "--op-a",
        path_str(&sz),
        "--op-b",
        path_str(&sx),
        "--n",
        "2,3",
        "--out",
        path_str(&out),
    ];
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let var = r["variance_a"].as_f64().unwrap();
        assert!((var - (1.0 - 0.4f64.powi(2))).abs() < 1e-12);
        assert!((r["variance_b"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        let split = r["durability_a"].as_f64().unwrap() + r["exposure_a"].as_f64().unwrap();
        assert!((split - var).abs() < 1e-12);
        assert!(r["delta_coefficient"].is_number());
    }
    assert_eq!(doc["extra"]["op_a_in_eigenbasis"].as_array().unwrap().len(), 2);

    let bad = write("bad.json", "[[[1,0],[0,0]]]");
    let mut broken = args;
    broken[2] = path_str(&bad);
    assert_eq!(code(&run(&broken)), 2);
}

#[test]
fn udw_commands_agree_with_closed_forms() {
    let o = run(&[
        "udw-verify",
        "--delta",
        "0.3",
        "--alpha2",
        "0.1,0.21",
        "--steps",
        "6",
        "--levels",
        "30",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    let o = run(&[
        "udw-evolve",
        "--delta",
        "0.5",
        "--alpha2",
        "0.25",
        "--tmax",
        "1",
        "--steps",
        "4",
        "--levels",
        "16",
        "--n",
        "2,vn",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    let f = |r: &csv::StringRecord, i: usize| r[i].parse::<f64>().unwrap();
    for r in &rows {
        // direct + complementary vanish for a pure global state.
        assert!((f(r, 10) + f(r, 11)).abs() < 1e-9);
    }
    // A pure detector starts with zero entropy in both orders.
    assert!(f(&rows[0], 6).abs() < 1e-12 && f(&rows[4], 6).abs() < 1e-12);
    assert_eq!(&rows[4][2], "vn");
}

#[test]
fn udw_evolve_flags_truncation() {
    let o = run(&[
        "udw-evolve",
        "--delta",
        "0.5",
        "--alpha2",
        "0.2",
        "--tmax",
        "3",
        "--steps",
        "2",
        "--levels",
        "4",
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--levels"));
}

#[test]
fn divergence_demo_tables_cover_every_eps() {
    let o = run(&[
        "divergence-demo",
        "--points",
        "11",
        "--eps",
        "1e-3,1e-2",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    // 11 uniform slice points plus 7 decade points, two ε each.
    assert_eq!(rows.len(), 2 * 18);
    assert_eq!(doc["diagnostics"].as_array().unwrap().len(), 2);
}

#[test]
fn extremize_reports_min_then_max() {
    let o = run(&["extremize", "--h2", "0.4"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kind,delta,alpha2,exposure,entropy");
    assert!(lines[1].starts_with("min,") && lines[2].starts_with("max,"));
    assert_eq!(code(&run(&["extremize", "--h2", "0.9"])), 2);
}
