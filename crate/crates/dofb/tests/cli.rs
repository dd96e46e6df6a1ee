//! End-to-end tests of the `dofb` binary: output bytes, report shapes, and
//! the documented exit codes (0 success, 1 verification failure, 2 input
//! error, 3 subset cap exceeded, 4 scheme/network mismatch, 5 decode
//! failure).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const GOLDEN_FIG3D1D2: &str = include_str!("golden/fig3d1d2.json");

fn dofb(args: &[&str]) -> Output {
    dofb_env(args, &[])
}

fn dofb_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dofb"));
    cmd.args(args)
        .env_remove("DOFB_PRIME")
        .env_remove("DOFB_GOLDEN_DIR");
    for (key, value) in envs {
        cmd.env(key, value);
    }
    cmd.output().expect("the dofb binary runs")
}

fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_str(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_str(&stdout_str(output)).expect("stdout is one JSON document")
}

#[test]
fn generate_emits_the_canonical_golden_bytes() {
    let output = dofb(&["generate", "--family", "fig-3d1d2"]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout_str(&output), GOLDEN_FIG3D1D2);
}

#[test]
fn generate_mirrors_stdout_into_the_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.json");
    let output = dofb(&[
        "generate",
        "--family",
        "m-d1d2",
        "--m",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout_str(&output));
    let doc = stdout_json(&output);
    let node_count: usize = doc["layers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|layer| layer.as_array().unwrap().len())
        .sum();
    assert_eq!(node_count, 13);
}

#[test]
fn input_errors_exit_2() {
    // Unknown family name.
    let output = dofb(&["generate", "--family", "no-such-family"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_str(&output).starts_with("error: "));

    // Parameter out of range.
    let output = dofb(&["generate", "--family", "m-d1d2", "--m", "1"]);
    assert_eq!(output.status.code(), Some(2));

    // Conflicting selectors.
    let output = dofb(&["analyze", "--family", "fig-2d1d2", "--net", "x.json"]);
    assert_eq!(output.status.code(), Some(2));

    // No selector at all.
    let output = dofb(&["analyze"]);
    assert_eq!(output.status.code(), Some(2));

    // generate is for families only.
    let output = dofb(&["generate", "--net", "x.json"]);
    assert_eq!(output.status.code(), Some(2));

    // simulate with no scheme source.
    let output = dofb(&["simulate"]);
    assert_eq!(output.status.code(), Some(2));

    // Zero trials.
    let output = dofb(&["simulate", "--family", "fig-2d1d2", "--trials", "0"]);
    assert_eq!(output.status.code(), Some(2));

    // Usage errors from the argument parser also exit 2.
    let output = dofb(&["region", "--family", "fig-2d1d2"]);
    assert_eq!(output.status.code(), Some(2));
    let output = dofb(&["no-such-subcommand"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn analyze_fig3d1d2_reports_the_certificate_and_region() {
    let output = dofb(&["analyze", "--family", "fig-3d1d2"]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);

    let certs = report["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 1);
    assert_eq!(certs[0]["dest"], "d1");
    assert_eq!(certs[0]["node"], "v5");
    assert_eq!(certs[0]["rho"], 3);
    assert_eq!(certs[0]["M"], serde_json::json!(["v2", "v3", "v4"]));

    assert_eq!(report["omniscient"].as_array().unwrap().len(), 0);
    assert_eq!(report["bounds"][0]["new"], "3 D1 + D2 <= 3");
    assert_eq!(report["region"]["sum_dof"], "5/3");
    assert_eq!(report["in_S"], true);
    assert_eq!(report["expressible"]["expressible"], true);
    assert_eq!(
        report["expressible"]["witness"],
        serde_json::json!(["3", "inf"])
    );
    assert_eq!(report["degraded_bc_ok"], true);
    assert_eq!(
        report["region"]["vertices"],
        serde_json::json!([["0", "0"], ["1", "0"], ["2/3", "1"], ["0", "1"]])
    );
}

#[test]
fn analyze_is_deterministic_for_a_fixed_seed() {
    let first = dofb(&[
        "analyze",
        "--family",
        "two-bounds",
        "--m",
        "3",
        "--seed",
        "11",
    ]);
    let second = dofb(&[
        "analyze",
        "--family",
        "two-bounds",
        "--m",
        "3",
        "--seed",
        "11",
    ]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn subset_cap_exceeded_exits_3_with_guidance() {
    let output = dofb(&[
        "analyze",
        "--family",
        "set-size-to-rank",
        "--k",
        "4",
        "--subset-cap",
        "6",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr_str(&output)
        .trim_end()
        .ends_with("raise --subset-cap to proceed"));

    // The same run with an adequate cap succeeds.
    let output = dofb(&["analyze", "--family", "set-size-to-rank", "--k", "4"]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn simulate_two_bounds_reports_the_symmetric_pair() {
    let output = dofb(&[
        "simulate",
        "--family",
        "two-bounds",
        "--m",
        "3",
        "--seed",
        "7",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["trials"], 100);
    assert_eq!(report["decode_d1"], 100);
    assert_eq!(report["decode_d2"], 100);
    assert_eq!(report["achieved_dof"], serde_json::json!(["3/4", "3/4"]));
}

#[test]
fn schemeless_families_and_mismatched_schemes_exit_4() {
    // This family ships no transmission scheme.
    let output = dofb(&["simulate", "--family", "d1d2-one-half"]);
    assert_eq!(output.status.code(), Some(4));

    // A scheme built for one topology cannot run on another.
    let output = dofb(&["simulate", "--family", "fig-3d1d2", "--scheme", "fig-2d1d2"]);
    assert_eq!(output.status.code(), Some(4));
    assert!(stderr_str(&output).contains("scheme does not fit the network"));
}

#[test]
fn a_non_decoding_scheme_exits_5_but_still_prints_its_report() {
    use dofb::engine::{Action, Block, KnowledgeRef, RowSpec};
    use dofb::schemes::{scheme_2d1d2, serialize_scheme};
    use dofb::serialize_network;

    // Start from the working scheme and drop its interference
    // cancellation: the relay forwards its raw second reception instead,
    // so the first destination keeps seeing a mixture it cannot resolve.
    let mut bundle = scheme_2d1d2();
    let relay = dofb::NodeId::from("v4");
    let slot = &mut bundle.program.hops[2].slots[0];
    assert!(matches!(
        slot.get(&relay),
        Some(Action::Send(RowSpec::Cancel {
            interference: Block::B,
            ..
        }))
    ));
    slot.insert(
        relay,
        Action::Send(RowSpec::forward(KnowledgeRef::rec(2, 2))),
    );

    let dir = tempfile::tempdir().unwrap();
    let net_path = dir.path().join("net.json");
    let scheme_path = dir.path().join("weak.json");
    fs::write(&net_path, serialize_network(&bundle.network)).unwrap();
    fs::write(
        &scheme_path,
        serialize_scheme(bundle.space, &bundle.program),
    )
    .unwrap();

    let output = dofb(&[
        "simulate",
        "--net",
        net_path.to_str().unwrap(),
        "--scheme",
        scheme_path.to_str().unwrap(),
        "--trials",
        "20",
    ]);
    assert_eq!(output.status.code(), Some(5));
    let report = stdout_json(&output);
    assert_eq!(report["decode_d1"], 0);
    assert_eq!(report["decode_d2"], 20);
    assert_eq!(report["achieved_dof"], Value::Null);
    assert!(stderr_str(&output).contains("decode failure"));

    // A scheme file alone is not enough — the network must be named.
    let output = dofb(&["simulate", "--scheme", scheme_path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn region_writes_the_vertex_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("region.csv");
    let output = dofb(&[
        "region",
        "--family",
        "fig-3d1d2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(&path).unwrap(),
        "D1,D2\n0,0\n1,0\n2/3,1\n0,1\n"
    );
    let report = stdout_json(&output);
    assert_eq!(report["sum_dof"], "5/3");
    assert_eq!(
        report["constraints"],
        serde_json::json!(["D1 <= 1", "D2 <= 1", "3 D1 + D2 <= 3"])
    );
}

#[test]
fn verify_all_passes_and_prints_one_json_document() {
    let output = dofb(&["verify-all"]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["pass"], true);
    let rows = report["rows"].as_array().unwrap();
    assert!(rows.len() >= 50);
    assert!(rows.iter().all(|row| row["pass"] == true));

    // The human-readable rows go to stderr, one per check.
    let log = stderr_str(&output);
    assert_eq!(log.lines().count(), rows.len());
    assert!(log.contains("two-bounds m=4 | sum 8/5 | in_S yes"));
}

#[test]
fn verify_all_flags_a_corrupted_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut tampered = String::from(GOLDEN_FIG3D1D2);
    tampered.push_str("corrupted\n");
    fs::write(dir.path().join("fig3d1d2.json"), tampered).unwrap();

    let output = dofb_env(
        &["verify-all"],
        &[("DOFB_GOLDEN_DIR", dir.path().to_str().unwrap())],
    );
    assert_eq!(output.status.code(), Some(1));
    let report = stdout_json(&output);
    assert_eq!(report["pass"], false);
    let failing: Vec<&Value> = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|row| row["pass"] == false)
        .collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["criterion"], "golden");
}

#[test]
fn analyze_mirrors_its_report_to_the_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let output = dofb(&[
        "analyze",
        "--family",
        "fig-2d1d2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout_str(&output));
    let report = stdout_json(&output);
    assert_eq!(report["bounds"][0]["new"], "2 D1 + D2 <= 2");
    assert_eq!(report["bounds"][0]["prior"], "2 D1 + D2 <= 2");
    assert_eq!(report["bounds"][0]["gap"], "0");
}

#[test]
fn a_network_file_round_trips_through_generate_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.json");
    let generated = dofb(&[
        "generate",
        "--family",
        "fig-2d1d2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(generated.status.code(), Some(0));
    assert!(Path::new(&path).is_file());

    let from_file = dofb(&["analyze", "--net", path.to_str().unwrap()]);
    let from_family = dofb(&["analyze", "--family", "fig-2d1d2"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_family.stdout);
}
