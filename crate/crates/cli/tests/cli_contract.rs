//! End-to-end contract tests: exit codes, diagnostic stream shape, output
//! formats, and cross-command consistency, all through the real binary.

mod common;

use common::{error_kind, normalize_version, run};
use serde_json::Value;

fn parse_stdout(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is a JSON envelope")
}

#[test]
fn kd_emits_a_complete_envelope() {
    let r = run(&[
        "kd",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let env = parse_stdout(&r.stdout);
    assert_eq!(env["schema_version"], "1");
    assert_eq!(env["tool"], "kdcalc");
    assert_eq!(env["command"], "kd");
    assert_eq!(env["payload"]["kind"], "distribution");
    assert_eq!(env["inputs"].as_array().unwrap().len(), 3);
    for digest in env["inputs"].as_array().unwrap() {
        assert_eq!(digest["sha256"].as_str().unwrap().len(), 64);
    }
    let values = env["payload"]["values"].as_array().unwrap();
    let mut total = 0.0;
    for row in values {
        for cell in row.as_array().unwrap() {
            total += cell[0].as_f64().unwrap();
            assert!(cell[1].as_f64().unwrap().abs() < 1e-12);
        }
    }
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn envelope_round_trips_byte_identically() {
    let r = run(&[
        "kd",
        "--state",
        "fixtures/state_mixed.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_y.json",
    ]);
    assert_eq!(r.code, 0);
    let env = parse_stdout(&r.stdout);
    let mut reserialized = serde_json::to_string_pretty(&env).unwrap();
    reserialized.push('\n');
    assert_eq!(reserialized, r.stdout);
}

#[test]
fn kd_csv_is_long_format() {
    let r = run(&[
        "kd",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
        "--out",
        "csv",
    ]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "a_label,b_label,re,im");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("z0,x+,"));
    assert!(lines[4].starts_with("z1,x-,"));
}

#[test]
fn csv_is_rejected_for_scalar_payloads() {
    let r = run(&[
        "weakvalue",
        "--pre",
        "fixtures/tb_pre.json",
        "--post",
        "fixtures/tb_post.json",
        "--projector",
        "fixtures/tb_box3.json",
        "--out",
        "csv",
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "usage");
    assert!(r.stdout.is_empty(), "no partial payload on stdout");
}

#[test]
fn unnormalized_state_exits_2_citing_norm() {
    let r = run(&[
        "kd",
        "--state",
        "fixtures/bad_norm.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(r.code, 2);
    let diag = common::diagnostic(&r.stderr);
    assert_eq!(diag["error_kind"], "invalid_input");
    assert!(diag["message"].as_str().unwrap().contains("norm"));
    assert!(r.stdout.is_empty());
}

#[test]
fn missing_file_exits_2() {
    let r = run(&[
        "kd",
        "--state",
        "fixtures/does_not_exist.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "io");
}

#[test]
fn malformed_json_exits_2() {
    let r = run(&[
        "kd",
        "--state",
        "fixtures/bad_syntax.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "parse");
}

#[test]
fn unsupported_schema_version_exits_2() {
    let r = run(&[
        "kd",
        "--state",
        "fixtures/state_v2.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(r.code, 2);
    let diag = common::diagnostic(&r.stderr);
    assert_eq!(diag["error_kind"], "invalid_input");
    assert!(diag["message"].as_str().unwrap().contains("schema_version"));
}

#[test]
fn dimension_mismatch_exits_3() {
    let r = run(&[
        "kd",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_z3.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(r.code, 3);
    assert_eq!(error_kind(&r.stderr), "dimension_mismatch");
}

#[test]
fn basis_identity_mismatch_exits_3() {
    let r = run(&[
        "reconstruct",
        "--kd",
        "golden/kd_zero_zx.json",
        "--basis-a",
        "fixtures/basis_x.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(r.code, 3);
    assert_eq!(error_kind(&r.stderr), "basis_id_mismatch");
}

#[test]
fn orthogonal_basis_pair_reconstruction_exits_4() {
    let r = run(&[
        "reconstruct",
        "--kd",
        "fixtures/kd_bare_zz.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_z.json",
    ]);
    assert_eq!(r.code, 4);
    assert_eq!(error_kind(&r.stderr), "overlap_too_small");
}

#[test]
fn reconstruction_roundtrip_recovers_the_state() {
    let kd = run(&[
        "kd",
        "--state",
        "fixtures/state_mixed.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(kd.code, 0);
    let dir = tempfile::tempdir().unwrap();
    let kd_path = dir.path().join("kd.json");
    std::fs::write(&kd_path, &kd.stdout).unwrap();

    let rec = run(&[
        "reconstruct",
        "--kd",
        kd_path.to_str().unwrap(),
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(rec.code, 0, "stderr: {}", rec.stderr);
    let env = parse_stdout(&rec.stdout);
    let matrix = env["payload"]["matrix"].as_array().unwrap();
    let expected = [[0.75, 0.25], [0.25, 0.25]];
    for r in 0..2 {
        for c in 0..2 {
            let cell = &matrix[r][c];
            assert!((cell[0].as_f64().unwrap() - expected[r][c]).abs() < 1e-12);
            assert!(cell[1].as_f64().unwrap().abs() < 1e-12);
        }
    }
    let kinds: Vec<&str> = env["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"hermiticity_deviation"));
}

#[test]
fn barely_overlapping_bases_reconstruct_with_a_conditioning_warning() {
    let kd = run(&[
        "kd",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_tilted.json",
    ]);
    assert_eq!(kd.code, 0);
    let dir = tempfile::tempdir().unwrap();
    let kd_path = dir.path().join("kd.json");
    std::fs::write(&kd_path, &kd.stdout).unwrap();

    let rec = run(&[
        "reconstruct",
        "--kd",
        kd_path.to_str().unwrap(),
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_tilted.json",
    ]);
    assert_eq!(rec.code, 0, "stderr: {}", rec.stderr);
    let env = parse_stdout(&rec.stdout);
    let kinds: Vec<&str> = env["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"ill_conditioned"), "warnings: {kinds:?}");
    assert!((env["payload"]["min_overlap"].as_f64().unwrap() - 5e-4).abs() < 1e-15);
}

#[test]
fn predict_with_outcome_basis_equal_to_a_matches_the_marginal() {
    let kd = run(&[
        "kd",
        "--state",
        "fixtures/state_mixed.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    let marginal_a: Vec<f64> = parse_stdout(&kd.stdout)["payload"]["marginal_a"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();

    let pred = run(&[
        "predict",
        "--state",
        "fixtures/state_mixed.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
        "--basis-m",
        "fixtures/basis_z.json",
    ]);
    assert_eq!(pred.code, 0, "stderr: {}", pred.stderr);
    let env = parse_stdout(&pred.stdout);
    let predicted = env["payload"]["predicted"].as_array().unwrap();
    for (p, m) in predicted.iter().zip(marginal_a.iter()) {
        assert!((p.as_f64().unwrap() - m).abs() < 1e-12);
    }
    assert!(env["payload"]["max_deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn predict_selftest_passes_and_reports_its_threshold() {
    let r = run(&["predict", "--selftest", "--seed", "11"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let env = parse_stdout(&r.stdout);
    assert_eq!(env["payload"]["kind"], "selftest");
    assert_eq!(env["payload"]["passed"], true);
    assert!(env["payload"]["max_deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn selftest_is_predict_only() {
    let r = run(&[
        "kd",
        "--selftest",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "usage");
}

#[test]
fn selftest_refuses_file_arguments() {
    let r = run(&["predict", "--selftest", "--state", "fixtures/state_zero.json"]);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "usage");
}

#[test]
fn weighted_undefined_cells_fail_prediction_with_exit_4() {
    let r = run(&[
        "predict",
        "--state",
        "fixtures/state_plus.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
        "--basis-m",
        "fixtures/basis_y.json",
        "--tolerance-overlap",
        "0.8",
    ]);
    assert_eq!(r.code, 4);
    assert_eq!(error_kind(&r.stderr), "undefined_cells");
}

#[test]
fn transform_agrees_with_direct_evaluation() {
    let kd = run(&[
        "kd",
        "--state",
        "fixtures/state_mixed.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ]);
    let dir = tempfile::tempdir().unwrap();
    let kd_path = dir.path().join("kd.json");
    std::fs::write(&kd_path, &kd.stdout).unwrap();

    let transformed = run(&[
        "transform",
        "--kd",
        kd_path.to_str().unwrap(),
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
        "--basis-m",
        "fixtures/basis_y.json",
    ]);
    assert_eq!(transformed.code, 0, "stderr: {}", transformed.stderr);
    let direct = run(&[
        "kd",
        "--state",
        "fixtures/state_mixed.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_y.json",
    ]);

    let t = parse_stdout(&transformed.stdout);
    let d = parse_stdout(&direct.stdout);
    assert_eq!(t["payload"]["basis_b_id"], d["payload"]["basis_b_id"]);
    let tv = t["payload"]["values"].as_array().unwrap();
    let dv = d["payload"]["values"].as_array().unwrap();
    for j in 0..2 {
        for k in 0..2 {
            for part in 0..2 {
                let a = tv[j][k][part].as_f64().unwrap();
                let b = dv[j][k][part].as_f64().unwrap();
                assert!((a - b).abs() < 1e-12, "cell ({j},{k}) part {part}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn transform_rejects_weight_in_undefined_cells() {
    let r = run(&[
        "transform",
        "--kd",
        "fixtures/kd_bare_zz_coherent.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_z.json",
        "--basis-m",
        "fixtures/basis_x.json",
    ]);
    assert_eq!(r.code, 4);
    assert_eq!(error_kind(&r.stderr), "undefined_cells");
}

#[test]
fn vanishing_weak_value_emits_payload_with_null_phase_and_exits_4() {
    let r = run(&[
        "weakvalue",
        "--pre",
        "fixtures/state_zero.json",
        "--post",
        "fixtures/state_plus.json",
        "--projector",
        "fixtures/state_one.json",
    ]);
    assert_eq!(r.code, 4);
    assert_eq!(error_kind(&r.stderr), "zero_weak_value");
    let env = parse_stdout(&r.stdout);
    assert_eq!(env["payload"]["kind"], "weak_value");
    assert!(env["payload"]["phase"].is_null());
    assert!(env["payload"]["action"].is_null());
    assert!(env["payload"]["magnitude"].as_f64().unwrap() < 1e-12);
}

#[test]
fn action_scales_linearly_with_hbar() {
    let base = run(&[
        "weakvalue",
        "--pre",
        "fixtures/state_zero.json",
        "--post",
        "fixtures/state_plus.json",
        "--projector",
        "fixtures/state_y_plus.json",
    ]);
    assert_eq!(base.code, 0);
    let doubled = run(&[
        "--hbar",
        "2",
        "weakvalue",
        "--pre",
        "fixtures/state_zero.json",
        "--post",
        "fixtures/state_plus.json",
        "--projector",
        "fixtures/state_y_plus.json",
    ]);
    assert_eq!(doubled.code, 0);
    let p1 = parse_stdout(&base.stdout);
    let p2 = parse_stdout(&doubled.stdout);
    let phase = p1["payload"]["phase"].as_f64().unwrap();
    assert!((phase - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert!(
        (p2["payload"]["action"].as_f64().unwrap() - 2.0 * phase).abs() < 1e-12
    );
    assert_eq!(p2["hbar"].as_f64().unwrap(), 2.0);
}

#[test]
fn nonpositive_hbar_exits_2() {
    let r = run(&[
        "--hbar",
        "-1",
        "weakvalue",
        "--pre",
        "fixtures/state_zero.json",
        "--post",
        "fixtures/state_plus.json",
        "--projector",
        "fixtures/state_y_plus.json",
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "invalid_hbar");
}

#[test]
fn mixed_states_are_rejected_where_purity_is_required() {
    let r = run(&[
        "weakvalue",
        "--pre",
        "fixtures/state_mixed.json",
        "--post",
        "fixtures/state_plus.json",
        "--projector",
        "fixtures/state_y_plus.json",
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "invalid_input");
}

#[test]
fn sampled_simulation_is_deterministic_per_seed() {
    let args = [
        "simulate",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
        "--coupling",
        "0.1",
        "--mode",
        "sampled",
        "--shots",
        "20000",
        "--seed",
        "9",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.code, 0, "stderr: {}", first.stderr);
    assert_eq!(first.stdout, second.stdout);

    let reseeded = run(&[
        "simulate",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
        "--coupling",
        "0.1",
        "--mode",
        "sampled",
        "--shots",
        "20000",
        "--seed",
        "10",
    ]);
    assert_ne!(first.stdout, reseeded.stdout);
}

#[test]
fn impossible_postselection_cells_degrade_to_warnings() {
    let r = run(&[
        "simulate",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_x.json",
        "--basis-b",
        "fixtures/basis_z.json",
        "--coupling",
        "0.05",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let env = parse_stdout(&r.stdout);
    let kinds: Vec<&str> = env["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["postselection_impossible", "postselection_impossible"]);
    let values = env["payload"]["values"].as_array().unwrap();
    assert!(values[0][1].is_null());
    assert!(values[1][1].is_null());
    assert!(!values[0][0].is_null());
}

#[test]
fn simulate_rejects_bad_meter_configurations() {
    let base = [
        "simulate",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
    ];
    let mut zero_shots = base.to_vec();
    zero_shots.extend(["--coupling", "0.1", "--mode", "sampled", "--shots", "0"]);
    let r = run(&zero_shots);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "shot_budget_zero");

    let mut bad_coupling = base.to_vec();
    bad_coupling.extend(["--coupling", "2.0"]);
    let r = run(&bad_coupling);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "invalid_coupling");

    let mut missing_shots = base.to_vec();
    missing_shots.extend(["--coupling", "0.1", "--mode", "sampled"]);
    let r = run(&missing_shots);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "usage");

    let mut stray_shots = base.to_vec();
    stray_shots.extend(["--coupling", "0.1", "--shots", "100"]);
    let r = run(&stray_shots);
    assert_eq!(r.code, 2);
    assert_eq!(error_kind(&r.stderr), "usage");
}

#[test]
fn simulate_csv_includes_reference_and_errors() {
    let r = run(&[
        "simulate",
        "--state",
        "fixtures/state_zero.json",
        "--basis-a",
        "fixtures/basis_z.json",
        "--basis-b",
        "fixtures/basis_x.json",
        "--coupling",
        "0.05",
        "--mode",
        "sampled",
        "--shots",
        "5000",
        "--out",
        "csv",
    ]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(
        lines[0],
        "a_label,b_label,re,im,reference_re,reference_im,deviation,standard_error,postselection"
    );
    assert_eq!(lines.len(), 5);
}

#[test]
fn unknown_scenario_exits_2_and_lists_the_catalog() {
    let r = run(&["scenario", "nosuch"]);
    assert_eq!(r.code, 2);
    let diag = common::diagnostic(&r.stderr);
    assert_eq!(diag["error_kind"], "usage");
    let message = diag["message"].as_str().unwrap();
    for name in ["three-box", "hardy", "mub-qubit"] {
        assert!(message.contains(name), "missing {name} in {message}");
    }
    assert!(r.stdout.is_empty());
}

#[test]
fn scenarios_pass_and_expose_their_conditionals() {
    let r = run(&["scenario", "hardy"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let env = parse_stdout(&r.stdout);
    assert_eq!(env["payload"]["passed"], true);
    let computed: Vec<f64> = env["payload"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["computed"][0].as_f64().unwrap())
        .collect();
    let expected = [-1.0, 1.0, 1.0, 0.0];
    for (c, e) in computed.iter().zip(expected.iter()) {
        assert!((c - e).abs() < 1e-12);
    }
    assert!(env["payload"]["estimates"].is_null());
}

#[test]
fn scenario_coupling_flag_adds_pointer_estimates() {
    let r = run(&["scenario", "three-box", "--coupling", "0.01"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let env = parse_stdout(&r.stdout);
    let estimates = &env["payload"]["estimates"];
    assert!((estimates["coupling"].as_f64().unwrap() - 0.01).abs() < 1e-15);
    assert!(estimates["max_deviation"].as_f64().unwrap() < 0.1);
    assert_eq!(estimates["values"].as_array().unwrap().len(), 3);
}

#[test]
fn scenario_with_unreachable_tolerance_exits_4_after_reporting() {
    // mub-qubit carries a ~1e-16 rounding deviation; three-box is exact in
    // floating point and would pass any positive tolerance.
    let r = run(&["scenario", "mub-qubit", "--tolerance", "1e-300"]);
    assert_eq!(r.code, 4);
    assert_eq!(error_kind(&r.stderr), "scenario_failed");
    let env = parse_stdout(&r.stdout);
    assert_eq!(env["payload"]["passed"], false);
}

#[test]
fn version_normalization_touches_only_the_tool_version() {
    let r = run(&["scenario", "mub-qubit"]);
    let normalized = normalize_version(&r.stdout);
    assert!(normalized.contains("\"version\": \"<version>\""));
    assert!(normalized.contains("\"schema_version\": \"1\""));
}
