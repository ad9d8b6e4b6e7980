//! Dense complex vectors, operators, and orthonormal bases.
//!
//! Dimension is a runtime value; storage is dense, row-major, `f64`-based.
//! Every public constructor validates its invariants against a
//! [`Tolerances`] record, so values of these types can be assumed finite,
//! normalized, Hermitian, etc. everywhere downstream. All values are
//! immutable after construction and safe to share across threads.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

mod eig;
mod random;

pub use eig::hermitian_eigenvalues;
pub use random::substream_seed;
pub use random::{haar_random_basis, random_density, SeededStream};

/// Complex amplitude scalar. All public results are finite (no NaN/Inf).
pub type C64 = Complex64;

fn ensure_finite_slice(values: &[C64], context: &'static str) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

/// A pure quantum state: unit-norm complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Array1<C64>,
}

impl StateVector {
    /// Validates finiteness and unit norm (within `tol.unit_norm`).
    pub fn new(amplitudes: Vec<C64>, tol: &Tolerances) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        ensure_finite_slice(&amplitudes, "state vector amplitudes")?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let deviation = (norm - 1.0).abs();
        if deviation > tol.unit_norm {
            return Err(Error::NotNormalized { norm, deviation });
        }
        Ok(Self {
            amplitudes: Array1::from_vec(amplitudes),
        })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn from_unnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        ensure_finite_slice(&amplitudes, "state vector amplitudes")?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized {
                norm,
                deviation: 1.0,
            });
        }
        Ok(Self {
            amplitudes: Array1::from_vec(amplitudes.into_iter().map(|z| z / norm).collect()),
        })
    }

    /// The computational basis vector |index⟩ in dimension `dim`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }
}

/// ⟨x|y⟩, conjugate-linear in `x` and linear in `y`.
pub fn inner_product(x: &StateVector, y: &StateVector) -> Result<C64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(x.amplitudes
        .iter()
        .zip(y.amplitudes.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// A quantum state, pure or mixed: Hermitian, unit-trace, positive
/// semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Array2<C64>,
}

impl DensityOperator {
    /// Validates Hermiticity, trace, and positivity (smallest eigenvalue
    /// no lower than `tol.eigenvalue_floor`).
    pub fn new(matrix: Array2<C64>, tol: &Tolerances) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.ncols(),
            });
        }
        ensure_finite_slice(matrix.as_slice().expect("row-major"), "density matrix")?;

        let mut herm_dev = 0.0f64;
        for j in 0..dim {
            for k in j..dim {
                let d = (matrix[[j, k]] - matrix[[k, j]].conj()).norm();
                herm_dev = herm_dev.max(d);
            }
        }
        if herm_dev > tol.hermiticity {
            return Err(Error::NotHermitian { deviation: herm_dev });
        }

        let trace: C64 = (0..dim).map(|j| matrix[[j, j]]).sum();
        let trace_dev = (trace - C64::new(1.0, 0.0)).norm();
        if trace_dev > tol.trace {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                deviation: trace_dev,
            });
        }

        let eigenvalues = hermitian_eigenvalues(&matrix);
        let min_eigenvalue = eigenvalues.first().copied().unwrap_or(0.0);
        if min_eigenvalue < tol.eigenvalue_floor {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
        }

        Ok(Self { matrix })
    }

    /// The projector |ψ⟩⟨ψ| of a pure state.
    pub fn from_pure(psi: &StateVector) -> Self {
        let dim = psi.dim();
        let mut matrix = Array2::zeros((dim, dim));
        for j in 0..dim {
            for k in 0..dim {
                matrix[[j, k]] = psi.amplitudes[j] * psi.amplitudes[k].conj();
            }
        }
        Self { matrix }
    }

    /// The maximally mixed state 1/d.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self {
            matrix: Array2::eye(dim).mapv(|z: C64| z / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// ρ|v⟩.
    pub fn apply(&self, v: &StateVector) -> Result<Array1<C64>> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        Ok(self.matrix.dot(v.amplitudes()))
    }

    /// ⟨x|ρ|y⟩.
    pub fn sandwich(&self, x: &StateVector, y: &StateVector) -> Result<C64> {
        let ry = self.apply(y)?;
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(x.amplitudes()
            .iter()
            .zip(ry.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Born probability ⟨m|ρ|m⟩ of outcome `m`, real part (the imaginary
    /// part vanishes by Hermiticity).
    pub fn born_probability(&self, m: &StateVector) -> Result<f64> {
        Ok(self.sandwich(m, m)?.re)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// The projector |ψ⟩⟨ψ| of a pure state.
pub fn density_from_pure(psi: &StateVector) -> DensityOperator {
    DensityOperator::from_pure(psi)
}

/// A complete set of `dim` orthonormal vectors with distinct string labels.
///
/// Carries a content-derived identity so that distributions and kernels can
/// record which bases they were computed in.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    vectors: Vec<StateVector>,
    labels: Vec<String>,
    identity: String,
}

impl OrthonormalBasis {
    /// Validates the Gram matrix against the identity and label uniqueness.
    /// The worst offending pair is reported on failure.
    pub fn new(vectors: Vec<StateVector>, labels: Vec<String>, tol: &Tolerances) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if labels.len() != dim {
            return Err(Error::LabelCountMismatch {
                vectors: dim,
                labels: labels.len(),
            });
        }
        for v in &vectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }

        let mut worst = (0usize, 0usize, 0.0f64);
        for j in 0..dim {
            for k in j..dim {
                let g = inner_product(&vectors[j], &vectors[k])?;
                let delta = if j == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                let dev = (g - delta).norm();
                if dev > worst.2 {
                    worst = (j, k, dev);
                }
            }
        }
        if worst.2 > tol.orthonormality {
            return Err(Error::NotOrthonormal {
                row: worst.0,
                col: worst.1,
                deviation: worst.2,
            });
        }

        let identity = basis_identity(&vectors, &labels);
        Ok(Self {
            vectors,
            labels,
            identity,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, j: usize) -> &StateVector {
        &self.vectors[j]
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn label(&self, j: usize) -> &str {
        &self.labels[j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Content digest identifying this basis (dimension, labels, amplitudes).
    pub fn identity(&self) -> &str {
        &self.identity
    }

    /// The matrix whose column `j` is basis vector `j`.
    pub fn as_matrix(&self) -> Array2<C64> {
        let dim = self.dim();
        let mut m = Array2::zeros((dim, dim));
        for (j, v) in self.vectors.iter().enumerate() {
            for (i, z) in v.amplitudes().iter().enumerate() {
                m[[i, j]] = *z;
            }
        }
        m
    }

    /// The computational basis {|0⟩, …, |d−1⟩} with labels "0" … "d−1".
    pub fn computational(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        let vectors = (0..dim).map(|j| StateVector::basis_state(dim, j)).collect();
        let labels = (0..dim).map(|j| j.to_string()).collect();
        Self::new(vectors, labels, &Tolerances::default())
    }
}

fn basis_identity(vectors: &[StateVector], labels: &[String]) -> String {
    let mut hasher = Sha256::new();
    hasher.update((vectors.len() as u64).to_le_bytes());
    for label in labels {
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
    }
    for v in vectors {
        for z in v.amplitudes() {
            hasher.update(z.re.to_le_bytes());
            hasher.update(z.im.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds an [`OrthonormalBasis`] from raw vectors, rejecting sets whose
/// Gram matrix deviates from the identity.
pub fn validate_basis(
    vectors: Vec<StateVector>,
    labels: Vec<String>,
    tol: &Tolerances,
) -> Result<OrthonormalBasis> {
    OrthonormalBasis::new(vectors, labels, tol)
}
