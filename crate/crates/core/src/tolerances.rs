//! Central tolerance configuration.
//!
//! Every numeric comparison in the crate reads its threshold from one
//! [`Tolerances`] record so that downstream modules and callers agree on
//! what "equal" means.

/// Numeric thresholds used for validation and domain guards.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Euclidean norm deviation allowed for a state vector.
    pub unit_norm: f64,
    /// Max elementwise |M − M†| allowed for a density operator.
    pub hermiticity: f64,
    /// |trace − 1| allowed for a density operator.
    pub trace: f64,
    /// Smallest admissible eigenvalue of a density operator.
    pub eigenvalue_floor: f64,
    /// Pairwise inner-product deviation from the Kronecker delta in a basis.
    pub orthonormality: f64,
    /// Hard division guard: |⟨b|a⟩| below this is an error wherever the
    /// calculus divides by the overlap.
    pub overlap_floor: f64,
    /// Below this the reconstruction is well defined but ill conditioned
    /// (1/⟨b|a⟩ amplifies noise); callers surface a warning, not an error.
    pub conditioning_overlap: f64,
    /// |Σ ρ(a,b) − 1| allowed for a quasiprobability distribution.
    pub kd_normalization: f64,
    /// Imaginary part allowed to survive in a marginal before it errors.
    pub imaginary_leak: f64,
    /// |Σ_m p(m|a,b) − 1| allowed per defined kernel cell, and the slack on
    /// predicted probabilities (imaginary part and [0, 1] range).
    pub kernel_completeness: f64,
    /// |p(m|a,b)| below this has no usable complex phase.
    pub magnitude_floor: f64,
    /// Post-selection probabilities below this leave the meter state undefined.
    pub postselect_floor: f64,
    /// ⟨b|ρ|b⟩ below this zeroes the corresponding estimated cell exactly
    /// (positivity of ρ then forces ⟨a|ρ|b⟩ = 0).
    pub born_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unit_norm: 1e-10,
            hermiticity: 1e-10,
            trace: 1e-10,
            eigenvalue_floor: -1e-9,
            orthonormality: 1e-10,
            overlap_floor: 1e-8,
            conditioning_overlap: 1e-3,
            kd_normalization: 1e-10,
            imaginary_leak: 1e-10,
            kernel_completeness: 1e-9,
            magnitude_floor: 1e-12,
            postselect_floor: 1e-14,
            born_floor: 1e-10,
        }
    }
}
