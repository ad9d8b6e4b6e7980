//! Complex joint probabilities of weak measurements.
//!
//! A weak measurement of the projector |a⟩⟨a| followed by a precise
//! measurement of |b⟩ yields, after multiplication with the post-selection
//! probability, the Kirkwood–Dirac quasiprobability
//!
//! ```text
//! ρ(a,b) = ⟨b|a⟩ ⟨a|ρ̂|b⟩
//! ```
//!
//! a complete (generally complex) description of the quantum state. This
//! crate implements the calculus built on that quantity:
//!
//! - [`kdq`]: the distribution itself, density-operator reconstruction,
//!   complex conditional probabilities p(m|a,b) (weak values of |m⟩⟨m|),
//!   complex Bayes-rule prediction, representation transforms, and action
//!   phases S = ħ·Arg p(m|a,b);
//! - [`weaksim`]: a von Neumann meter simulation of the weak-measurement
//!   protocol whose estimates converge to the exact distribution as the
//!   coupling goes to zero;
//! - [`scenarios`]: canonical pre/post-selection fixtures (three-box,
//!   Hardy, mutually unbiased qubit bases) exhibiting negative and complex
//!   conditional probabilities;
//! - [`linalg`]: the dense complex vectors, operators, bases, and seeded
//!   random generation underneath.
//!
//! All dimensions are runtime values; storage is dense and row-major.
//! Everything is deterministic: random generation runs on a seeded ChaCha12
//! stream, so fixed seeds reproduce results bit for bit.

pub mod error;
pub mod kdq;
pub mod linalg;
pub mod scenarios;
pub mod tolerances;
pub mod weaksim;

pub use error::{Error, Result};
pub use kdq::{
    action_phase, conditional_kernel, conditional_weak_value, kd_distribution, marginals,
    predict_probabilities, reconstruct_density, transform_representation, ActionPhase,
    ConditionalKernel, KDDistribution, Reconstruction,
};
pub use linalg::{
    density_from_pure, haar_random_basis, inner_product, random_density, validate_basis,
    DensityOperator, OrthonormalBasis, StateVector, C64,
};
pub use scenarios::{hardy, mub_qubit_phase, three_box, verify, Scenario, VerifyEntry, VerifyReport};
pub use tolerances::Tolerances;
pub use weaksim::{
    couple_and_postselect, estimate_kd, estimate_weak_value, KDEstimate, MeterConfig, MeterMode,
    WeakValueEstimate,
};
