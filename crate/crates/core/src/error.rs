//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("state vector norm deviates from 1 by {deviation:.3e} (norm = {norm})")]
    NotNormalized { norm: f64, deviation: f64 },

    #[error("matrix is not Hermitian: max |M - M†| element is {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("trace deviates from 1 by {deviation:.3e} (trace = {trace})")]
    TraceNotOne { trace: f64, deviation: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error(
        "vectors are not orthonormal: worst pair ({row}, {col}) deviates from \
         the Kronecker delta by {deviation:.3e}"
    )]
    NotOrthonormal {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("duplicate basis label {label:?}")]
    DuplicateLabel { label: String },

    #[error("label count {labels} does not match vector count {vectors}")]
    LabelCountMismatch { vectors: usize, labels: usize },

    #[error("rank {rank} out of range for dimension {dim} (need 1 ≤ rank ≤ dim)")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error(
        "overlap |⟨b_{b_index}|a_{a_index}⟩| = {magnitude:.3e} is below the \
         overlap floor {floor:.3e}"
    )]
    OverlapTooSmall {
        a_index: usize,
        b_index: usize,
        magnitude: f64,
        floor: f64,
    },

    #[error("basis identity mismatch for {which}: expected {expected}, found {found}")]
    BasisIdMismatch {
        which: &'static str,
        expected: String,
        found: String,
    },

    #[error("quasiprobability sum deviates from 1 by {deviation:.3e}")]
    KdNotNormalized { deviation: f64 },

    #[error("marginal has imaginary leak {magnitude:.3e} at index {index} in {context}")]
    ImaginaryLeak {
        magnitude: f64,
        index: usize,
        context: &'static str,
    },

    #[error("predicted probability {value} at outcome {index} lies outside [0, 1]")]
    NotAProbability { value: f64, index: usize },

    #[error(
        "conditional kernel column ({a_index}, {b_index}) deviates from unit sum by {deviation:.3e}"
    )]
    KernelNotNormalized {
        a_index: usize,
        b_index: usize,
        deviation: f64,
    },

    #[error("{count} undefined kernel cell(s): overlaps below the floor")]
    UndefinedCells { count: usize },

    #[error("weak value magnitude {magnitude:.3e} too small: complex phase undefined")]
    ZeroWeakValue { magnitude: f64 },

    #[error("post-selection probability {probability:.3e} too small: meter state undefined")]
    PostselectionImpossible { probability: f64 },

    #[error("sampled mode requires at least one shot")]
    ShotBudgetZero,

    #[error("coupling strength {coupling} outside (0, π/2)")]
    InvalidCoupling { coupling: f64 },

    #[error("ħ must be positive, got {hbar}")]
    InvalidHbar { hbar: f64 },
}
