//! Byte-stability of the serialized output. Each golden file was produced
//! by the command it checks and is regenerated only deliberately; the
//! `version` envelope field is masked on both sides so releases do not
//! churn the files.

mod common;

use common::{normalize_version, read_golden, run};

fn assert_matches_golden(args: &[&str], golden_name: &str) {
    let first = run(args);
    assert_eq!(first.code, 0, "stderr: {}", first.stderr);
    let second = run(args);
    assert_eq!(
        first.stdout, second.stdout,
        "two runs of {args:?} differ"
    );
    assert_eq!(
        normalize_version(&first.stdout),
        normalize_version(&read_golden(golden_name)),
        "{golden_name} drifted"
    );
}

#[test]
fn kd_on_the_qubit_fixture_is_byte_stable() {
    assert_matches_golden(
        &[
            "kd",
            "--state",
            "fixtures/state_zero.json",
            "--basis-a",
            "fixtures/basis_z.json",
            "--basis-b",
            "fixtures/basis_x.json",
        ],
        "kd_zero_zx.json",
    );
}

#[test]
fn kd_csv_output_is_byte_stable() {
    assert_matches_golden(
        &[
            "kd",
            "--state",
            "fixtures/state_zero.json",
            "--basis-a",
            "fixtures/basis_z.json",
            "--basis-b",
            "fixtures/basis_x.json",
            "--out",
            "csv",
        ],
        "kd_zero_zx.csv",
    );
}

#[test]
fn reconstruction_from_a_frozen_envelope_is_byte_stable() {
    assert_matches_golden(
        &[
            "reconstruct",
            "--kd",
            "golden/kd_zero_zx.json",
            "--basis-a",
            "fixtures/basis_z.json",
            "--basis-b",
            "fixtures/basis_x.json",
        ],
        "reconstruct_zero_zx.json",
    );
}

#[test]
fn scenario_report_is_byte_stable() {
    assert_matches_golden(&["scenario", "three-box"], "scenario_three_box.json");
}

#[test]
fn weak_value_output_is_byte_stable() {
    assert_matches_golden(
        &[
            "weakvalue",
            "--pre",
            "fixtures/state_zero.json",
            "--post",
            "fixtures/state_plus.json",
            "--projector",
            "fixtures/state_y_plus.json",
        ],
        "weakvalue_mub.json",
    );
}
