//! End-to-end tests of the `okb` binary against the repository fixtures:
//! exit codes, determinism, round-trips, SVG output, and the batch mode.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()
        .expect("fixtures directory exists")
}

fn okb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn parse_stdout(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON document")
}

#[test]
fn surface_body_on_ruled_fixture() {
    let fx = fixtures();
    let out = okb(&[
        "surface-body",
        "--in",
        fx.join("ex44.model.json").to_str().unwrap(),
        "--divisor",
        fx.join("ex44_h.class.json").to_str().unwrap(),
        "--flag",
        fx.join("ex44_flag_f.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = parse_stdout(&out);
    assert_eq!(doc["schema_version"], "1");
    assert_eq!(doc["command"], "surface-body");
    let vertices = &doc["result"]["body"]["polytope"]["vertices"];
    assert_eq!(vertices, &serde_json::json!([[0, 0], [0, 1]]));
    assert_eq!(doc["result"]["threshold"], 0);
    assert_eq!(doc["result"]["beta"]["values"], serde_json::json!([1]));
}

#[test]
fn surface_volplus_value_and_base_locus_rejection() {
    let fx = fixtures();
    let out = okb(&[
        "surface-volplus",
        "--in",
        fx.join("ex44.model.json").to_str().unwrap(),
        "--divisor",
        fx.join("ex44_h.class.json").to_str().unwrap(),
        "--flag",
        fx.join("ex44_flag_f.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = parse_stdout(&out);
    assert_eq!(doc["result"]["value"], "1");

    // The blow-up class has its second exceptional curve in the restricted
    // base locus: probing along it is a domain error (exit 2).
    let out = okb(&[
        "surface-volplus",
        "--in",
        fx.join("dp7.model.json").to_str().unwrap(),
        "--divisor",
        fx.join("dp7_d.class.json").to_str().unwrap(),
        "--flag",
        fx.join("dp7_flag_e2.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc = parse_stdout(&out);
    assert!(doc["result"]["error"]
        .as_str()
        .unwrap()
        .contains("base locus"));
}

#[test]
fn toric_body_with_svg() {
    let fx = fixtures();
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("body.svg");
    let out_path = dir.path().join("body.json");
    let out = okb(&[
        "toric-body",
        "--in",
        fx.join("bl2p2.fan.json").to_str().unwrap(),
        "--divisor",
        fx.join("bl2p2_d.divisor.json").to_str().unwrap(),
        "--flag",
        fx.join("bl2p2_flag_blocus.json").to_str().unwrap(),
        "--kind",
        "limiting",
        "--out",
        out_path.to_str().unwrap(),
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = parse_stdout(&out);
    assert_eq!(
        doc["result"]["body"]["polytope"]["vertices"],
        serde_json::json!([[1, 0], [2, 0]])
    );
    assert_eq!(doc["result"]["iitaka_dimension"], 1);
    assert_eq!(doc["result"]["euclidean_volume"], "1");
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.contains("<path"));
    assert!(svg.contains("x&#8321;"));
    // The written document equals the stdout document.
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(written["result"], doc["result"]);
}

#[test]
fn body_json_round_trips_into_equal_body() {
    let fx = fixtures();
    let out = okb(&[
        "toric-body",
        "--in",
        fx.join("p2.fan.json").to_str().unwrap(),
        "--divisor",
        fx.join("p2_h.divisor.json").to_str().unwrap(),
        "--flag",
        fx.join("p2_flag.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = parse_stdout(&out);
    let body_doc: okb_core::json::BodyDoc =
        serde_json::from_value(doc["result"]["body"].clone()).unwrap();
    let body = body_doc.to_body().unwrap();
    assert_eq!(body.polytope.vertices().len(), 3);
    let emitted = okb_core::json::BodyDoc::from_body(&body);
    assert_eq!(
        serde_json::to_value(&emitted).unwrap(),
        doc["result"]["body"]
    );
}

#[test]
fn deterministic_output_across_runs() {
    let fx = fixtures();
    let fan = fx.join("bl2p2.fan.json");
    let divisor = fx.join("bl2p2_d.divisor.json");
    let args = [
        "toric-baseloci",
        "--in",
        fan.to_str().unwrap(),
        "--divisor",
        divisor.to_str().unwrap(),
    ];
    let first = okb(&args);
    let second = okb(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "byte-identical across runs");
    let doc = parse_stdout(&first);
    assert_eq!(
        doc["result"]["restricted_divisorial_rays"],
        serde_json::json!([4])
    );
}

#[test]
fn validate_commands() {
    let fx = fixtures();
    for (file, target) in [("p2.fan.json", "fan"), ("dp7.model.json", "model")] {
        let out = okb(&["validate", "--in", fx.join(file).to_str().unwrap()]);
        assert!(out.status.success());
        let doc = parse_stdout(&out);
        assert_eq!(doc["result"]["target"], target);
        assert_eq!(doc["result"]["valid"], true);
    }
}

#[test]
fn toric_certify_fixture() {
    let fx = fixtures();
    let out = okb(&[
        "toric-certify",
        "--in",
        fx.join("bl2p2.fan.json").to_str().unwrap(),
        "--divisor",
        fx.join("bl2p2_d.divisor.json").to_str().unwrap(),
        "--cone",
        fx.join("bl2p2_cone_e1.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = parse_stdout(&out);
    assert_eq!(doc["result"]["nakayama"]["holds"], true);
    assert_eq!(doc["result"]["positive_volume"]["holds"], true);
    assert_eq!(doc["result"]["subvariety_dimension"], 1);
}

#[test]
fn semigroup_body_fixture() {
    let fx = fixtures();
    let out = okb(&[
        "semigroup-body",
        "--in",
        fx.join("semigroup_line.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = parse_stdout(&out);
    assert_eq!(
        doc["result"]["body"]["polytope"]["vertices"],
        serde_json::json!([[0], [1]])
    );
    assert_eq!(doc["result"]["body"]["exactness"], "truncated:3");
    let report = doc["result"]["truncation_report"].as_array().unwrap();
    assert_eq!(report.len(), 3);
    assert_eq!(report[2]["distance_squared"], "0");
}

#[test]
fn malformed_input_is_exit_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = okb(&["validate", "--in", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let doc = parse_stdout(&out);
    assert!(doc["result"]["error"].as_str().is_some());
}

#[test]
fn svg_of_empty_body_is_exit_code_two() {
    let fx = fixtures();
    let dir = tempfile::tempdir().unwrap();
    let divisor = dir.path().join("negative.divisor.json");
    std::fs::write(&divisor, r#"{ "coeffs": { "2": -1 } }"#).unwrap();
    let svg = dir.path().join("never.svg");
    let out = okb(&[
        "toric-body",
        "--in",
        fx.join("p2.fan.json").to_str().unwrap(),
        "--divisor",
        divisor.to_str().unwrap(),
        "--flag",
        fx.join("p2_flag.json").to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!svg.exists());
}

#[test]
fn xcheck_single_and_batch() {
    let fx = fixtures();
    let out = okb(&[
        "xcheck",
        "--in",
        fx.join("bl2p2.fan.json").to_str().unwrap(),
        "--divisor",
        fx.join("bl2p2_d.divisor.json").to_str().unwrap(),
        "--flag",
        fx.join("bl2p2_flag_blocus.json").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = parse_stdout(&out);
    assert_eq!(doc["result"]["verdict"], "EQUAL");

    let dir = tempfile::tempdir().unwrap();
    let out = okb(&[
        "xcheck",
        "--in",
        fx.join("xcheck").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert!(out.status.success());
    let doc = parse_stdout(&out);
    let summary = doc["result"]["fixtures"].as_array().unwrap();
    assert_eq!(summary.len(), 2);
    for entry in summary {
        assert_eq!(entry["verdict"], "EQUAL");
        let name = entry["fixture"].as_str().unwrap();
        assert!(dir.path().join(format!("{name}.xcheck.json")).exists());
    }
}
