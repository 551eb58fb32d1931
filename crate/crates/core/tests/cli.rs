use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use normsip::bounds::BoundName;
use normsip::cli::{Report, WitnessReport, REPORT_SCHEMA};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn normsip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normsip"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Report) {
    let out = normsip(args);
    let code = out.status.code().unwrap();
    let r = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    });
    (code, r)
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn orthonormal_pair_report() {
    let (code, r) = report(&["report", data("pair_l2.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r.schema, REPORT_SCHEMA);
    assert!((r.ratio - FRAC_1_SQRT_2).abs() < 1e-12);
    let best = r.best_lower.unwrap();
    assert_eq!(best.name, BoundName::SelfAnchorLower);
    assert!((best.value.unwrap() - FRAC_1_SQRT_2).abs() < 1e-9);
}

#[test]
fn single_vector_report() {
    let (code, r) = report(&["report", data("single.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r.ratio, 1.0);
    for b in r.bounds.iter().filter(|b| b.anchor.is_none()) {
        assert!((b.value.unwrap() - 1.0).abs() < 1e-12, "{:?}", b.name);
    }
}

#[test]
fn zero_vector_is_diagnosed_not_fatal() {
    let (code, r) = report(&["report", data("zero_vector.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    for b in &r.bounds {
        assert!(!b.applicable);
        assert!(b.diagnostics.iter().any(|d| d.index == Some(1)));
    }
    assert!(r.checks.iter().any(|c| c.applicable));
}

#[test]
fn csv_with_flags() {
    let (code, r) = report(&[
        "report",
        data("cluster.csv").to_str().unwrap(),
        "--norm",
        "wlp:2:1,2,0.5",
        "--weights",
        "1,1,1,1",
        "--anchor",
        "index:0",
        "--bounds",
        "thm23,rho",
        "--rho",
        "0.5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r.norm, "wlp:2:1,2,0.5");
    assert_eq!(r.weights, vec![0.25; 4]);
    let names: Vec<_> = r.bounds.iter().map(|b| b.name).collect();
    assert_eq!(names, vec![BoundName::NormGap, BoundName::Rho]);
    assert!(r.warnings.iter().any(|w| w.contains("normalized")));
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = write(
        &dir,
        "ragged.json",
        r#"{"norm": "lp:2", "vectors": [[1, 0], [1]]}"#,
    );
    let garbage = write(&dir, "garbage.json", "{");
    let pair = data("pair_l2.json");
    let pair = pair.to_str().unwrap();
    let csv = data("cluster.csv");
    let csv = csv.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["report", "/nonexistent/input.json"],
        vec!["report", &ragged],
        vec!["report", &garbage],
        vec!["report", pair, "--norm", "lp:0.2"],
        vec!["report", pair, "--bounds", "nope"],
        vec!["report", pair, "--anchor", "coords:1,2,3"],
        vec!["report", csv],
        vec!["witness", "--kind", "lemma21", "--eps", "0.1,0.5"],
        vec!["witness", "--kind", "nope"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = normsip(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(normsip(&["--help"]).status.code(), Some(0));
    assert_eq!(normsip(&["report", "--help"]).status.code(), Some(0));
}

#[test]
fn mutated_bound_exits_two() {
    let path = data("spread_l2.json");
    let out = normsip(&["report", path.to_str().unwrap(), "--fault", "min-as-max"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("certificate violation"));
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!r.violations.is_empty());
}

#[test]
fn witness_tables() {
    let out = normsip(&["witness", "--kind", "lemma21", "--eps", "0.5,0.1,0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let w: WitnessReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(w.table.rows.len(), 3);
    assert!((w.table.rows[2].admissible_constant - 0.5025).abs() < 1e-4);

    let out = normsip(&[
        "witness", "--kind", "thm23", "--eps", "0.3", "--norm", "lp:inf",
    ]);
    let w: WitnessReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(w.table.rows[0].measured_slack.abs() <= 1e-9);

    let out = normsip(&[
        "witness", "--kind", "thm21", "--eps", "0.001", "--format", "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0.5000005"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.json");
    let input = data("cluster_l1.json");
    let input = input.to_str().unwrap();
    let to_file = normsip(&["report", input, "--output", target.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let to_stdout = normsip(&["report", input]);
    assert_eq!(std::fs::read(&target).unwrap(), to_stdout.stdout);
}

#[test]
fn report_round_trips_bit_exactly() {
    let input = data("cluster_l1.json");
    let out = normsip(&[
        "report",
        input.to_str().unwrap(),
        "--witness",
        "thm22",
        "--witness",
        "lemma22",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.witness.len(), 2);
    let again = serde_json::to_string_pretty(&r).unwrap() + "\n";
    assert_eq!(again.as_bytes(), &out.stdout[..]);
    let back: Report = serde_json::from_str(&again).unwrap();
    assert_eq!(back.ratio.to_bits(), r.ratio.to_bits());
    for (a, b) in back.sip_enclosures.iter().zip(&r.sip_enclosures) {
        assert_eq!(a.inferior.lo.to_bits(), b.inferior.lo.to_bits());
        assert_eq!(a.superior.hi.to_bits(), b.superior.hi.to_bits());
    }
}
