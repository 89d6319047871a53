use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn schmidt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schmidt"))
        .args(args)
        .env_remove("SC_SIZE_GUARD")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn assert_report_consistent(r: &Value) {
    let neg = f(&r["negativity"]);
    assert!((neg - (f(&r["realignment_norm"]) - 1.0) / 2.0).abs() < 1e-12);
    assert_eq!(r["separable"].as_bool().unwrap(), neg <= 1e-9);
}

#[test]
fn ghz_output_and_analysis() {
    let out = schmidt(&["ghz", "--k", "3", "--N", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["k"], 3);
    assert_eq!(v["N"], 2);
    for row in v["a"].as_array().unwrap() {
        for z in row.as_array().unwrap() {
            assert_eq!(f(&z[0]), 0.5);
            assert_eq!(f(&z[1]), 0.0);
        }
    }

    let dir = TempDir::new().unwrap();
    let path = dir.path().join("ghz-2-3.json");
    let out = schmidt(&["ghz", "--k", "2", "--N", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["a"]
        .as_array()
        .unwrap()
        .iter()
        .all(|row| row.as_array().unwrap().iter().all(|z| f(&z[0]) == 1.0 / 3.0)));

    let r = json(&schmidt(&["analyze", path.to_str().unwrap()]));
    assert!((f(&r["negativity"]) - 1.0).abs() < 1e-12);
    assert!((f(&r["realignment_norm"]) - 3.0).abs() < 1e-12);
    assert!((f(&r["relative_entropy"]) - 3f64.log2()).abs() < 1e-12);
    assert_eq!(r["log_base"], "2");
    assert_eq!(r["slocc"]["kind"], "GhzClass");
    assert_eq!(r["slocc"]["t"], 3);
    assert_eq!(r["witness"]["pairs"], 3);
    assert_report_consistent(&r);
}

#[test]
fn ghz_round_trip_for_several_sizes() {
    let dir = TempDir::new().unwrap();
    for (k, n) in [(2, 2), (3, 4), (4, 3)] {
        let p = dir.path().join(format!("g{k}{n}.json"));
        let ps = p.to_str().unwrap();
        assert!(
            schmidt(&["ghz", "--k", &k.to_string(), "--N", &n.to_string(), "--output", ps])
                .status
                .success()
        );
        let r = json(&schmidt(&["analyze", ps, "--oracle"]));
        assert!((f(&r["negativity"]) - (n as f64 - 1.0) / 2.0).abs() < 1e-12);
        assert!(f(&r["oracle_max_residual"]) < 1e-9);
    }
}

#[test]
fn example_mixture_with_oracle() {
    let out = schmidt(&["examples", "--which", "example41"]);
    let v = json(&out);
    assert_eq!(f(&v["a"][0][0][0]), 2.0 / 3.0);
    assert_eq!(f(&v["a"][0][1][0]), 1.0 / 3.0);
    assert_eq!(f(&v["a"][1][1][0]), 1.0 / 3.0);
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "example-4.1.json", &String::from_utf8(out.stdout).unwrap());
    let out = schmidt(&["analyze", &p, "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!((f(&r["negativity"]) - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(r["oracle_checked"], true);
    assert!(f(&r["oracle_max_residual"]) < 1e-9);
    assert_eq!(r["concurrence_method"], "QubitClosedForm");
    assert!((f(&r["concurrence_exact"]) - 2.0 / 3.0).abs() < 1e-12);
    assert!(r.get("slocc").is_none());
    assert_report_consistent(&r);
}

#[test]
fn named_examples() {
    let v = json(&schmidt(&["examples", "--which", "psi-onethird"]));
    let a = &v["a"];
    assert!((f(&a[0][0][0]) - 1.0 / 3.0).abs() < 1e-15);
    assert!((f(&a[0][1][0]) - 2f64.sqrt() / 3.0).abs() < 1e-15);
    assert!((f(&a[1][1][0]) - 2.0 / 3.0).abs() < 1e-15);
    let g = json(&schmidt(&["examples", "--which", "ghz32"]));
    assert_eq!(g, json(&schmidt(&["ghz", "--k", "3", "--N", "2"])));
    let out = schmidt(&["examples", "--which", "w-state"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("w-state"));
}

#[test]
fn pure_example_report() {
    let dir = TempDir::new().unwrap();
    let out = schmidt(&["examples", "--which", "psi-onethird"]);
    let p = write(dir.path(), "psi.json", &String::from_utf8(out.stdout).unwrap());
    let r = json(&schmidt(&["analyze", &p, "--oracle"]));
    let c = 2.0 * 2f64.sqrt() / 3.0;
    assert!((f(&r["concurrence_exact"]) - c).abs() < 1e-12);
    assert!((2.0 * f(&r["negativity"]) - c).abs() < 1e-12);
    assert!((f(&r["realignment_norm"]) - 1.0 - c).abs() < 1e-12);
    assert_eq!(r["slocc"]["t"], 2);
    assert!(f(&r["oracle_residuals"]["slocc"]) < 1e-9);
}

#[test]
fn diagonal_state_is_separable() {
    let dir = TempDir::new().unwrap();
    let p = write(
        dir.path(),
        "diagonal.json",
        r#"{"k":3,"N":3,"a":[[[0.2,0],[0,0],[0,0]],[[0,0],[0.3,0],[0,0]],[[0,0],[0,0],[0.5,0]]]}"#,
    );
    let r = json(&schmidt(&["analyze", &p, "--oracle", "--split", "2"]));
    assert_eq!(r["separable"], true);
    for key in [
        "negativity",
        "concurrence_lower",
        "concurrence_upper",
        "concurrence_exact",
        "relative_entropy",
    ] {
        assert_eq!(f(&r[key]), 0.0, "{key}");
    }
    assert_eq!(f(&r["realignment_norm"]), 1.0);
    assert_eq!(r["bloch_test"]["vanishes"], true);
    assert_eq!(r["witness"]["pairs"], 0);
    assert_report_consistent(&r);
}

#[test]
fn invalid_inputs_exit_with_validation_code() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("ragged.json", r#"{"k":2,"N":2,"a":[[[1,0],[0,0]],[[0,0]]]}"#),
        ("syntax.json", "{\"k\":2,\n\"N\":2,\n\"a\":[[[1,0]"),
        ("trace.json", r#"{"k":2,"N":2,"a":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#),
        (
            "nonherm.json",
            r#"{"k":2,"N":2,"a":[[[0.5,0],[0.1,0]],[[0.2,0],[0.5,0]]]}"#,
        ),
        (
            "notpsd.json",
            r#"{"k":2,"N":2,"a":[[[0.5,0],[0.9,0]],[[0.9,0],[0.5,0]]]}"#,
        ),
        ("overflow.json", r#"{"k":2,"N":1,"a":[[[1e400,0]]]}"#),
        ("k1.json", r#"{"k":1,"N":2,"a":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#),
    ];
    for (name, text) in cases {
        let p = write(dir.path(), name, text);
        let out = schmidt(&["analyze", &p]);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stderr).contains(name));
    }
    let err = String::from_utf8(schmidt(&["analyze", &write(dir.path(), "s.json", cases[1].1)]).stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");

    let p = write(
        dir.path(),
        "ok.json",
        r#"{"k":3,"N":2,"a":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#,
    );
    assert_eq!(schmidt(&["analyze", &p, "--split", "3"]).status.code(), Some(2));
    assert_eq!(schmidt(&["analyze", &p, "--log-base", "7"]).status.code(), Some(2));
    assert_eq!(schmidt(&["analyze", "/nonexistent/x.json"]).status.code(), Some(1));
}

#[test]
fn log_base_flag() {
    let dir = TempDir::new().unwrap();
    let out = schmidt(&["ghz", "--k", "2", "--N", "4"]);
    let p = write(dir.path(), "g.json", &String::from_utf8(out.stdout).unwrap());
    for (base, expect) in [("2", 2.0), ("e", 4f64.ln()), ("10", 4f64.log10())] {
        let r = json(&schmidt(&["analyze", &p, "--log-base", base]));
        assert!((f(&r["relative_entropy"]) - expect).abs() < 1e-12);
        assert_eq!(r["log_base"], base);
    }
}

#[test]
fn random_states_are_reproducible_and_valid() {
    let dir = TempDir::new().unwrap();
    let d1 = dir.path().join("a");
    let d2 = dir.path().join("b");
    for d in [&d1, &d2] {
        let out = schmidt(&[
            "random",
            "--k",
            "3",
            "--N",
            "2",
            "--seed",
            "42",
            "--count",
            "2",
            "--output-dir",
            d.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let read = |d: &Path, i: usize| std::fs::read_to_string(d.join(format!("sc-k3-N2-seed42-{i}.json"))).unwrap();
    assert_eq!(read(&d1, 0), read(&d2, 0));
    assert_eq!(read(&d1, 1), read(&d2, 1));
    assert_ne!(read(&d1, 0), read(&d1, 1));

    let d3 = dir.path().join("c");
    let out = schmidt(&[
        "random",
        "--k",
        "3",
        "--N",
        "2",
        "--seed",
        "7",
        "--count",
        "100",
        "--output-dir",
        d3.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let files: Vec<_> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    assert_eq!(files.len(), 100);
    for p in files.iter().take(10) {
        let r = json(&schmidt(&["analyze", p]));
        assert_eq!(r["separable"], false);
    }
    for p in &files {
        let s = schmidt::io::state_from_json(&std::fs::read_to_string(p).unwrap(), Default::default()).unwrap();
        assert!(!schmidt::separability::is_fully_separable(&s, 1e-9));
    }
}

#[test]
fn oracle_verify_runs() {
    for (k, n) in [("3", "2"), ("2", "3")] {
        let out = schmidt(&["oracle-verify", "--k", k, "--N", n, "--samples", "50", "--seed", "3"]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["pass"], true);
        assert!(f(&v["max_residual"]) < 1e-9);
        assert_eq!(v["samples"], 50);
    }
    let out = schmidt(&["oracle-verify", "--k", "3", "--N", "2", "--samples", "5", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn size_guard_exit_code_and_override() {
    let out = schmidt(&["oracle-verify", "--k", "7", "--N", "4", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("16384"));

    let run = |guard: &str| {
        Command::new(env!("CARGO_BIN_EXE_schmidt"))
            .args(["oracle-verify", "--k", "3", "--N", "2", "--samples", "2"])
            .env("SC_SIZE_GUARD", guard)
            .output()
            .unwrap()
    };
    assert_eq!(run("7").status.code(), Some(4));
    assert_eq!(run("8").status.code(), Some(0));
    assert_eq!(run("lots").status.code(), Some(2));
}

#[test]
fn analyze_beyond_guard_skips_dense_parts() {
    let dir = TempDir::new().unwrap();
    let out = schmidt(&["ghz", "--k", "7", "--N", "4"]);
    let p = write(dir.path(), "big.json", &String::from_utf8(out.stdout).unwrap());
    let r = json(&schmidt(&["analyze", &p]));
    assert!((f(&r["negativity"]) - 1.5).abs() < 1e-12);
    assert_eq!(r["bloch_test"], Value::Null);
    assert_eq!(r["pt_spectrum"]["zero_multiplicity"], 16384 - 16);
    assert_eq!(schmidt(&["analyze", &p, "--oracle"]).status.code(), Some(4));
}

#[test]
fn roof_flag_and_witness_export() {
    let dir = TempDir::new().unwrap();
    let p = write(
        dir.path(),
        "q.json",
        r#"{"k":2,"N":3,"a":[[[0.4,0],[0.1,0.05],[0,0]],[[0.1,-0.05],[0.3,0],[0.05,0]],[[0,0],[0.05,0],[0.3,0]]]}"#,
    );
    let w = dir.path().join("w.json");
    let plain = json(&schmidt(&["analyze", &p, "--witness-output", w.to_str().unwrap()]));
    assert_eq!(plain["concurrence_method"], "BoundsOnly");
    let roof = json(&schmidt(&[
        "analyze",
        &p,
        "--roof",
        "--restarts",
        "4",
        "--max-iter",
        "300",
        "--seed",
        "9",
    ]));
    assert_eq!(roof["concurrence_method"], "RoofOptimizer");
    assert!(f(&roof["concurrence_upper"]) <= f(&plain["concurrence_upper"]));
    assert!(f(&roof["concurrence_lower"]) <= f(&roof["concurrence_upper"]) + 1e-9);

    let wv: Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(wv["dims"], serde_json::json!([3, 3]));
    assert_eq!(
        wv["terms"].as_array().unwrap().len(),
        4 * plain["witness"]["pairs"].as_u64().unwrap() as usize
    );
}

#[test]
fn report_written_to_file() {
    let dir = TempDir::new().unwrap();
    let out = schmidt(&["ghz", "--k", "2", "--N", "2"]);
    let p = write(dir.path(), "g.json", &String::from_utf8(out.stdout).unwrap());
    let rp = dir.path().join("report.json");
    let out = schmidt(&["analyze", &p, "--output", rp.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(rp).unwrap()).unwrap();
    assert!((f(&r["negativity"]) - 0.5).abs() < 1e-12);
}
