//! End-to-end tests of the `privnet` binary: every subcommand is exercised
//! against the bundled scenarios and against files on disk, checking exit
//! codes and the frozen report text byte for byte.

use std::io::Write;
use std::process::{Command, Output};

fn privnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn consistency_of_the_default_pair_is_frozen() {
    let output = privnet(&["consistency", "--set", "beta,gamma"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert_eq!(stdout(&output), "consistent; order {w}<{x}<{y}<{z}\n");
}

#[test]
fn consistency_of_the_full_table_reports_the_cycle() {
    let output = privnet(&["consistency", "--set", "beta,gamma,delta"]);
    assert_eq!(exit_code(&output), 1);
    assert_eq!(stdout(&output), "inconsistent; cycle w◁x◁z◁w\n");
}

#[test]
fn consistency_defaults_to_every_source() {
    let output = privnet(&["consistency"]);
    assert_eq!(exit_code(&output), 1);
    assert_eq!(stdout(&output), "inconsistent; cycle w◁x◁z◁w\n");
}

#[test]
fn majorize_confirms_the_table_pair_with_an_exact_witness() {
    let output = privnet(&["majorize", "beta", "gamma"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.starts_with("true\nwitness (4×4):\n"), "{text}");
    assert!(text.ends_with("reconstruction: exact\n"), "{text}");
}

#[test]
fn majorize_rejects_the_reverse_direction() {
    let output = privnet(&["majorize", "gamma", "beta"]);
    assert_eq!(exit_code(&output), 1);
    assert_eq!(stdout(&output), "false\n");
}

#[test]
fn decompose_produces_a_convex_combination_summing_to_one() {
    let output = privnet(&["decompose", "beta", "gamma"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("λ = "), "{text}");
    assert!(text.contains("Σλ = 1\n"), "{text}");
    assert!(text.ends_with("reconstruction: exact\n"), "{text}");
}

#[test]
fn fuse_of_a_consistent_pair_keeps_the_dominating_member() {
    let output = privnet(&["fuse", "--set", "beta,gamma"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert_eq!(
        stdout(&output),
        "beta^ = {w: 1/10, x: 1/5, y: 1/5, z: 3/10}\n\
         gamma^ = {w: 1/10, x: 1/10, y: 3/10, z: 1/2}\n\
         fusion = {w: 1/10, x: 1/10, y: 3/10, z: 1/2}\n"
    );
}

#[test]
fn fuse_of_the_inconsistent_table_collapses_to_the_hats() {
    let output = privnet(&["fuse"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(
        text.ends_with("fusion = {w: 1/10, x: 1/10, y: 1/10, z: 1/10}\n"),
        "{text}"
    );
}

#[test]
fn url_scenario_orders_the_pages_by_traffic() {
    let output = privnet(&["consistency", "url", "--set", "visits"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert_eq!(stdout(&output), "consistent; order {u3}<{u0}<{u1}<{u2}\n");
}

#[test]
fn run_traces_the_advertising_script() {
    let output = privnet(&["run", "tad"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(
        text.contains("step 0 [broker-view] rp user→broker"),
        "{text}"
    );
    assert!(text.contains("granted: {a-q → {a-sport: 1/2}}"), "{text}");
}

#[test]
fn run_traces_the_aggregation_script() {
    let output = privnet(&["run", "snet"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(
        text.contains(
            "agg accumulated: {s1-in → {net-a: 1/2, net-b: 1/4}, s2-in → {net-a: 1/3, net-c: 1/3}}"
        ),
        "{text}"
    );
}

#[test]
fn run_traces_the_payment_extension() {
    let output = privnet(&["run", "sinf"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("pay-1 → {token: 3/4}"), "{text}");
    assert!(text.contains("pay-2 → {token: 2/3}"), "{text}");
}

#[test]
fn run_reports_contradictory_holdings_with_a_cycle() {
    let output = privnet(&["run", "cross_sharing"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let text = stdout(&output);
    assert!(
        text.contains("  inconsistent holdings for sink at q: cycle res-a◁res-b◁res-a"),
        "{text}"
    );
}

#[test]
fn privacy_check_passes_on_a_disjoint_prior() {
    let output = privnet(&["check-privacy", "privacy_disjoint"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert_eq!(
        stdout(&output),
        "check unrelated-prior (local): satisfied\n"
    );
}

#[test]
fn privacy_check_flags_the_withheld_share() {
    let output = privnet(&["check-privacy", "privacy_leak"]);
    assert_eq!(exit_code(&output), 1);
    assert_eq!(
        stdout(&output),
        "check withheld-share (local): violated at x\n\
         \u{20}\u{20}attained: {s1: 1/2, s2: 1/2}\n\
         \u{20}\u{20}permitted: {s1: 1/2}\n"
    );
}

#[test]
fn privacy_check_accepts_releasing_what_is_already_released() {
    let output = privnet(&["check-privacy", "bsc"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert_eq!(stdout(&output), "check self-release (local): satisfied\n");
}

#[test]
fn ni_check_catches_the_elevator_leak() {
    let output = privnet(&["check-ni", "elevator"]);
    assert_eq!(exit_code(&output), 1);
    let text = stdout(&output);
    assert!(
        text.starts_with("check lobby-display: fail (product and bruteforce agree, L = 8)\n"),
        "{text}"
    );
    assert!(text.contains("call_b2"), "{text}");
    assert!(text.contains("observes f1"), "{text}");
    assert!(text.contains("observes f2"), "{text}");
}

#[test]
fn ni_check_honours_an_explicit_length_bound() {
    let output = privnet(&["check-ni", "elevator", "--max-len", "2"]);
    assert_eq!(exit_code(&output), 1);
    assert!(
        stdout(&output).contains("(product and bruteforce agree, L = 2)"),
        "{}",
        stdout(&output)
    );
}

#[test]
fn structured_reports_are_valid_json_and_reproducible() {
    let first = privnet(&["run", "snet", "--format", "structured"]);
    let second = privnet(&["run", "snet", "--format", "structured"]);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(
        first.stdout, second.stdout,
        "structured output must not drift"
    );
    let value: serde_json::Value = serde_json::from_str(&stdout(&first)).expect("valid JSON");
    assert_eq!(value["command"], "run");
    assert_eq!(
        value["steps"][0]["granted"]["s1-in"]["net-a"],
        serde_json::json!("1/2")
    );
}

#[test]
fn structured_ni_report_carries_the_witness() {
    let output = privnet(&["check-ni", "elevator", "--format", "structured"]);
    assert_eq!(exit_code(&output), 1);
    let value: serde_json::Value = serde_json::from_str(&stdout(&output)).expect("valid JSON");
    assert_eq!(value["checks"][0]["verdict"], "fail");
    assert_eq!(value["checks"][0]["witness"]["left_observation"], "f2");
    assert_eq!(value["checks"][0]["witness"]["right_observation"], "f1");
}

#[test]
fn scenarios_load_from_plain_file_paths() {
    let mut file = tempfile::NamedTempFile::with_suffix(".scn").expect("temp file");
    writeln!(
        file,
        "[sources.alpha]\np = \"1/3\"\nq = \"1/3\"\n\n[sources.omega]\np = \"2/3\"\nq = \"1/3\""
    )
    .expect("write scenario");
    let path = file.path().to_str().expect("utf-8 path");
    let output = privnet(&["majorize", "alpha", "omega", "--scenario", path]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert!(stdout(&output).starts_with("true\n"), "{}", stdout(&output));
}

#[test]
fn overweight_sources_are_rejected_as_usage_errors() {
    let mut file = tempfile::NamedTempFile::with_suffix(".scn").expect("temp file");
    writeln!(file, "[sources.bad]\nw = \"7/5\"").expect("write scenario");
    let path = file.path().to_str().expect("utf-8 path");
    let output = privnet(&["consistency", path, "--set", "bad"]);
    assert_eq!(exit_code(&output), 2);
    assert!(
        stderr(&output).contains("exceeds one"),
        "{}",
        stderr(&output)
    );
}

#[test]
fn float_weights_are_rejected_before_any_rounding() {
    let mut file = tempfile::NamedTempFile::with_suffix(".scn").expect("temp file");
    writeln!(file, "[sources.bad]\nw = 0.5").expect("write scenario");
    let path = file.path().to_str().expect("utf-8 path");
    let output = privnet(&["consistency", path, "--set", "bad"]);
    assert_eq!(exit_code(&output), 2);
    assert!(
        stderr(&output).contains("expected a string"),
        "{}",
        stderr(&output)
    );
}

#[test]
fn missing_sections_and_names_are_usage_errors() {
    let output = privnet(&["run", "table_2_3"]);
    assert_eq!(exit_code(&output), 2);
    assert!(
        stderr(&output).contains("declares no network"),
        "{}",
        stderr(&output)
    );

    let output = privnet(&["fuse", "--set", "beta,nope"]);
    assert_eq!(exit_code(&output), 2);
    assert!(
        stderr(&output).contains("source nope"),
        "{}",
        stderr(&output)
    );

    let output = privnet(&["check-privacy", "elevator", "--check", "absent"]);
    assert_eq!(exit_code(&output), 2);

    let output = privnet(&["not-a-command"]);
    assert_eq!(exit_code(&output), 2);
}
