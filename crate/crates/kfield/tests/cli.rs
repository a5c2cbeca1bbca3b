use std::process::Command;

use kfield::cli::{run, Outcome, EXIT_OK, EXIT_USER};
use kfield::report::{self, AnalyzeReport, ConstructReport, PlacesReport, SelftestReport, SweepReport};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn kfield(args: &[&str]) -> Outcome {
    run(std::iter::once("kfield").chain(args.iter().copied()), None)
}

fn ok(args: &[&str]) -> String {
    let out = kfield(args);
    assert_eq!(out.code, EXIT_OK, "{args:?}: {}", out.stderr);
    out.stdout
}

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(json: &str) -> T {
    let parsed: T = serde_json::from_str(json).unwrap();
    assert_eq!(report::to_json(&parsed), json);
    parsed
}

#[test]
fn analyze_reports_the_adjoined_stage() {
    let text = ok(&["analyze", "--q", "3", "--f", "2"]);
    assert!(text.contains("[Prop K(AKFtau)] prime-adjoined stage"));
    assert!(text.contains("  K0 = Z/4 (+) Z\n  K1 = Z\n"));
    assert!(text.contains("presence: UNKNOWN"));

    let text = ok(&["analyze", "--q", "4", "--f", "3", "--gamma-rank", "3"]);
    assert!(text.contains("K0 = Z/21 (+) Z^2"));
    assert!(text.contains("even rank = 8, odd rank = 8"));
    assert!(text.contains("presence: UNKNOWN"));

    let text = ok(&["analyze", "--q", "4", "--f", "2"]);
    assert!(text.contains("torsion of order 5 present"));
    let text = ok(&["analyze", "--q", "7", "--f", "1"]);
    assert!(text.contains("no torsion: Q^f = 1"));
}

#[test]
fn analyze_json_is_deterministic_and_round_trips() {
    let args = ["analyze", "--q", "5", "--f", "3", "--n", "6", "--format", "json"];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let report: AnalyzeReport = round_trip(&first);
    assert!(report.agree);
    assert_eq!((report.input.q, report.input.n, report.input.f), (5, 6, 3));
    assert_eq!(report.adjoin_prime.engine.k0.torsion, vec!["31".to_string()]);
    assert_eq!((report.rationalized.even_rank, report.rationalized.odd_rank), (3, 3));
    assert_eq!(report.torsion.order.as_deref(), Some("31"));
}

#[test]
fn construct_and_places() {
    let text = ok(&["construct", "--q", "2", "--f", "2"]);
    assert!(text.contains("X^2+X+1"));
    let json = ok(&["construct", "--q", "3", "--f", "3", "--format", "json"]);
    let report: ConstructReport = round_trip(&json);
    assert!(report.verified);
    assert_eq!(report.inertia_degree, Some(3));
    assert_eq!(report.infinite_places.len(), 1);

    let json = ok(&["places", "--q", "2", "--expr", "1/(X^2+X+1)", "--format", "json"]);
    let report: PlacesReport = round_trip(&json);
    assert_eq!(report.image, "1/(X^2+X+1)");
    assert!(report.fundamental_identity && report.single_infinite);
    assert_eq!((report.sum_ef_zero, report.sum_ef_infinity), (2, 2));
    assert_eq!(report.above_infinity[0].f, 2);
}

#[test]
fn sweep_and_selftest() {
    let text = ok(&["sweep-lemma", "--q-max", "16", "--f-max", "12"]);
    assert!(text.contains("0 counterexamples"));
    let json = ok(&["sweep-lemma", "--q-max", "8", "--f-max", "6", "--format", "json"]);
    let report: SweepReport = round_trip(&json);
    assert!(report.counterexamples.is_empty());
    assert_eq!(report.pairs_checked, 7 * 15);

    let json = ok(&["selftest", "--format", "json"]);
    let report: SelftestReport = round_trip(&json);
    assert!(report.passed && report.suites.iter().all(|s| s.passed));
}

#[test]
fn user_errors_exit_with_one() {
    let cases: &[&[&str]] = &[
        &["analyze", "--q", "6", "--f", "1"],
        &["analyze", "--q", "3", "--f", "2", "--n", "3"],
        &["analyze", "--q", "3", "--f", "0"],
        &["analyze", "--q", "3", "--f", "1", "--gamma-rank", "0"],
        &["construct", "--q", "10", "--f", "2"],
        &["places", "--q", "2", "--expr", "X^"],
        &["places", "--q", "2", "--expr", "1"],
        &["places", "--q", "4", "--expr", "[1,1,1]*X"],
        &["sweep-lemma", "--q-max", "1000000", "--f-max", "4"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = kfield(args);
        assert_eq!(out.code, EXIT_USER, "{args:?}");
        assert!(out.stdout.is_empty() && !out.stderr.is_empty(), "{args:?}");
    }
    let out = run(["kfield", "analyze", "--q", "3", "--f", "1"], Some("zero"));
    assert_eq!(out.code, EXIT_USER);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_kfield");
    let status = |args: &[&str], probe: Option<&str>| {
        let mut cmd = Command::new(bin);
        cmd.args(args).env_remove("KFIELD_PROBE_BOUND");
        if let Some(p) = probe {
            cmd.env("KFIELD_PROBE_BOUND", p);
        }
        let out = cmd.output().unwrap();
        (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
    };
    let (code, stdout) = status(&["analyze", "--q", "3", "--f", "2"], None);
    assert_eq!(code, 0);
    assert!(stdout.contains("K0 = Z/4 (+) Z"));
    assert_eq!(status(&["analyze", "--q", "3", "--f", "2"], Some("8")).0, 0);
    assert_eq!(status(&["analyze", "--q", "3", "--f", "2"], Some("-1")).0, 1);
    assert_eq!(status(&["analyze", "--q", "9", "--f", "1"], None).0, 0);
    assert_eq!(status(&["construct", "--q", "6", "--f", "1"], None).0, 1);
}
