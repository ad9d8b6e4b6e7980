//! Canonical pre/postselection scenarios with anomalous conditional
//! probabilities, bundled with their known closed-form values so a build
//! can be checked against them at any time.
//!
//! Each scenario fixes a preselected pure state, a postselection vector,
//! and a basis of projectors to be weakly measured in between. The frozen
//! expectations are exact rational or eighth-turn values, so regression
//! tolerances can be as tight as rounding allows.

use crate::error::Result;
use crate::kdq::{action_phase, conditional_weak_value};
use crate::linalg::{inner_product, C64, OrthonormalBasis, StateVector};
use crate::tolerances::Tolerances;

/// A fixed weak-measurement arrangement with known conditional values.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    pub preselection: StateVector,
    pub postselection: StateVector,
    /// Basis whose rank-one projectors are probed between the selections.
    pub projectors: OrthonormalBasis,
    /// Conditional probability of each projector, in basis order.
    pub expected_weak_values: Vec<C64>,
    /// Phase of each conditional on the (−π, π] branch; None where the
    /// conditional vanishes and no phase exists.
    pub expected_phases: Vec<Option<f64>>,
    /// |⟨b|ψ⟩|², the postselection success rate.
    pub postselection_probability: f64,
}

fn real_state(amplitudes: &[f64]) -> StateVector {
    let tol = Tolerances::default();
    StateVector::new(
        amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect(),
        &tol,
    )
    .expect("scenario amplitudes are unit norm")
}

fn labeled_computational(labels: &[&str]) -> OrthonormalBasis {
    let tol = Tolerances::default();
    let dim = labels.len();
    OrthonormalBasis::new(
        (0..dim).map(|j| StateVector::basis_state(dim, j)).collect(),
        labels.iter().map(|s| s.to_string()).collect(),
        &tol,
    )
    .expect("computational basis is orthonormal")
}

/// Three boxes, one particle. Preselect (|1⟩+|2⟩+|3⟩)/√3 and postselect
/// (|1⟩+|2⟩−|3⟩)/√3: the particle is then found with certainty in box 1
/// if looked for there, with certainty in box 2 if looked for there, and
/// box 3 carries the compensating conditional probability −1.
pub fn three_box() -> Scenario {
    let s = 1.0 / 3.0f64.sqrt();
    let pi = std::f64::consts::PI;
    Scenario {
        name: "three-box",
        summary: "one particle certain to be in two boxes at once; the \
                  third box balances the books with weight -1",
        preselection: real_state(&[s, s, s]),
        postselection: real_state(&[s, s, -s]),
        projectors: labeled_computational(&["box1", "box2", "box3"]),
        expected_weak_values: vec![
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
        ],
        expected_phases: vec![Some(0.0), Some(0.0), Some(pi)],
        postselection_probability: 1.0 / 9.0,
    }
}

/// Single-configuration-space form of Hardy's paradox. Basis order is
/// (both particles in, first in second out, first out second in, both
/// out); the preselection excludes the double-occupation amplitude and
/// the postselection projects onto the interference signature.
pub fn hardy() -> Scenario {
    let s = 1.0 / 3.0f64.sqrt();
    let pi = std::f64::consts::PI;
    Scenario {
        name: "hardy",
        summary: "each interferometer arm is occupied with conditional \
                  certainty, yet joint occupation is excluded",
        preselection: real_state(&[s, s, s, 0.0]),
        postselection: real_state(&[0.5, -0.5, -0.5, 0.5]),
        projectors: labeled_computational(&["NN", "NO", "ON", "OO"]),
        expected_weak_values: vec![
            C64::new(-1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
        expected_phases: vec![Some(pi), Some(0.0), Some(0.0), None],
        postselection_probability: 1.0 / 12.0,
    }
}

/// Mutually unbiased qubit triple: preselect the Z-up state, postselect
/// X-up, and probe the Y projectors. Both conditionals have magnitude
/// 1/√2 and action phases of exactly ±π/8 turns (±π/4 radians).
pub fn mub_qubit_phase() -> Scenario {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pi = std::f64::consts::PI;
    let tol = Tolerances::default();
    let y_plus = StateVector::new(vec![C64::new(h, 0.0), C64::new(0.0, h)], &tol)
        .expect("unit norm");
    let y_minus = StateVector::new(vec![C64::new(h, 0.0), C64::new(0.0, -h)], &tol)
        .expect("unit norm");
    let projectors = OrthonormalBasis::new(
        vec![y_plus, y_minus],
        vec!["y+".into(), "y-".into()],
        &tol,
    )
    .expect("orthonormal");
    Scenario {
        name: "mub-qubit",
        summary: "maximally unbiased qubit bases give conditionals \
                  (1 ± i)/2 with action phases ±π/4",
        preselection: StateVector::basis_state(2, 0),
        postselection: real_state(&[h, h]),
        projectors,
        expected_weak_values: vec![C64::new(0.5, 0.5), C64::new(0.5, -0.5)],
        expected_phases: vec![Some(pi / 4.0), Some(-pi / 4.0)],
        postselection_probability: 0.5,
    }
}

/// One projector's check inside a [`VerifyReport`].
#[derive(Debug, Clone)]
pub struct VerifyEntry {
    pub label: String,
    pub expected: C64,
    pub computed: C64,
    pub deviation: f64,
    pub expected_phase: Option<f64>,
    pub computed_phase: Option<f64>,
    pub phase_deviation: f64,
    pub passed: bool,
}

/// Outcome of re-deriving a scenario's frozen values from first
/// principles.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub scenario: &'static str,
    pub entries: Vec<VerifyEntry>,
    /// Σ of computed conditionals; equals 1 identically for a complete
    /// projector basis.
    pub weak_value_sum: C64,
    /// Measured |⟨b|ψ⟩|².
    pub postselection_probability: f64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Recomputes every conditional probability and phase in `scenario` and
/// compares against its frozen expectations at the given tolerance. The
/// calculus itself runs at default numeric tolerances; `tolerance` only
/// governs the comparison.
pub fn verify(scenario: &Scenario, tolerance: f64) -> Result<VerifyReport> {
    let tol = Tolerances::default();
    let dim = scenario.projectors.dim();
    let mut entries = Vec::with_capacity(dim);
    let mut sum = C64::new(0.0, 0.0);
    let mut max_deviation = 0.0f64;
    let mut all_passed = true;

    for j in 0..dim {
        let computed = conditional_weak_value(
            &scenario.preselection,
            &scenario.postselection,
            scenario.projectors.vector(j),
            &tol,
        )?;
        sum += computed;
        let expected = scenario.expected_weak_values[j];
        let deviation = (computed - expected).norm();

        let computed_phase = if computed.norm() >= tol.magnitude_floor {
            Some(action_phase(computed, 1.0, &tol)?.phase)
        } else {
            None
        };
        let expected_phase = scenario.expected_phases[j];
        let phase_deviation = match (expected_phase, computed_phase) {
            (Some(e), Some(c)) => phase_distance(e, c),
            (None, None) => 0.0,
            // One side has a phase, the other does not: that is a
            // magnitude disagreement and the deviation above catches it.
            _ => 0.0,
        };

        let passed = deviation <= tolerance && phase_deviation <= tolerance;
        all_passed &= passed;
        max_deviation = max_deviation.max(deviation).max(phase_deviation);
        entries.push(VerifyEntry {
            label: scenario.projectors.label(j).to_string(),
            expected,
            computed,
            deviation,
            expected_phase,
            computed_phase,
            phase_deviation,
            passed,
        });
    }

    let sum_deviation = (sum - C64::new(1.0, 0.0)).norm();
    max_deviation = max_deviation.max(sum_deviation);
    all_passed &= sum_deviation <= tolerance;

    let overlap = inner_product(&scenario.postselection, &scenario.preselection)?;
    let probability = overlap.norm_sqr();
    let prob_deviation = (probability - scenario.postselection_probability).abs();
    max_deviation = max_deviation.max(prob_deviation);
    all_passed &= prob_deviation <= tolerance;

    Ok(VerifyReport {
        scenario: scenario.name,
        entries,
        weak_value_sum: sum,
        postselection_probability: probability,
        max_deviation,
        tolerance,
        passed: all_passed,
    })
}

/// Distance between two angles on the (−π, π] branch, mod 2π. Keeps ±π
/// comparisons from reporting a spurious 2π gap.
fn phase_distance(x: f64, y: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (x - y).rem_euclid(two_pi);
    d.min(two_pi - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn three_box_holds_to_regression_precision() {
        let report = verify(&three_box(), 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
        assert_abs_diff_eq!(report.entries[0].computed.re, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(report.entries[2].computed.re, -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(report.entries[2].computed_phase.unwrap(), PI, epsilon = 1e-13);
        assert_abs_diff_eq!(report.postselection_probability, 1.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn hardy_overlap_and_occupations() {
        let s = hardy();
        let overlap = inner_product(&s.postselection, &s.preselection).unwrap();
        assert_abs_diff_eq!(overlap.re, -0.28867513459481287, epsilon = 1e-15);
        assert_abs_diff_eq!(overlap.im, 0.0, epsilon = 1e-15);
        let report = verify(&s, 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
        // The empty-empty projector has no weight, hence no phase.
        assert!(report.entries[3].computed_phase.is_none());
        assert_abs_diff_eq!(report.weak_value_sum.re, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(report.weak_value_sum.im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn mub_qubit_phases_are_quarter_pi() {
        let report = verify(&mub_qubit_phase(), 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
        assert_abs_diff_eq!(report.entries[0].computed_phase.unwrap(), PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(report.entries[1].computed_phase.unwrap(), -PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            report.entries[0].computed.norm(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn tampered_expectations_fail_verification() {
        let mut s = three_box();
        s.expected_weak_values[2] = C64::new(1.0, 0.0);
        let report = verify(&s, 1e-12).unwrap();
        assert!(!report.passed);
        assert!(!report.entries[2].passed);
        assert!(report.entries[0].passed);
        assert!(report.max_deviation > 1.0);
    }

    #[test]
    fn tolerance_is_respected() {
        let mut s = mub_qubit_phase();
        s.expected_weak_values[0] += C64::new(1e-6, 0.0);
        assert!(!verify(&s, 1e-9).unwrap().passed);
        assert!(verify(&s, 1e-3).unwrap().passed);
    }

    #[test]
    fn phase_distance_wraps_at_the_branch_point() {
        assert_abs_diff_eq!(phase_distance(PI, -PI), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(phase_distance(PI - 1e-9, -PI + 1e-9), 2e-9, epsilon = 1e-12);
        assert_abs_diff_eq!(phase_distance(0.3, -0.2), 0.5, epsilon = 1e-15);
    }
}
