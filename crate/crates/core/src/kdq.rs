//! The Kirkwood–Dirac quasiprobability calculus.
//!
//! A state ρ and two orthonormal bases A, B define the complex joint
//! distribution ρ(a_j, b_k) = ⟨b_k|a_j⟩⟨a_j|ρ|b_k⟩. It sums to one, its
//! marginals are the Born probabilities of A and B, and it determines ρ
//! completely whenever no ⟨b_k|a_j⟩ vanishes. Conditionals of this joint
//! are state-independent complex kernels ⟨b|m⟩⟨m|a⟩/⟨b|a⟩; summing them
//! against the distribution predicts measurement statistics in any third
//! basis, exactly like a classical Bayes rule but over complex weights.
//!
//! Everything here is deterministic linear algebra. The statistical side
//! (extracting these quantities from weak-coupling measurements) lives in
//! [`crate::weaksim`].

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{inner_product, C64, DensityOperator, OrthonormalBasis, StateVector};
use crate::tolerances::Tolerances;

/// Complex joint quasiprobability of two bases. Rows index the A outcome,
/// columns the B outcome. Carries the identities of the bases it was
/// computed in so later stages can refuse mismatched inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct KDDistribution {
    values: Array2<C64>,
    basis_a_id: String,
    basis_b_id: String,
}

impl KDDistribution {
    /// Wraps raw values, checking finiteness and unit total (within
    /// `tol.kd_normalization`). Individual entries may be any complex
    /// number; only the sum is constrained.
    pub fn new(
        values: Array2<C64>,
        basis_a_id: String,
        basis_b_id: String,
        tol: &Tolerances,
    ) -> Result<Self> {
        let dim = values.nrows();
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if values.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.ncols(),
            });
        }
        if !values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "quasiprobability values",
            });
        }
        let total: C64 = values.iter().sum();
        let deviation = (total - C64::new(1.0, 0.0)).norm();
        if deviation > tol.kd_normalization {
            return Err(Error::KdNotNormalized { deviation });
        }
        Ok(Self {
            values,
            basis_a_id,
            basis_b_id,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<C64> {
        &self.values
    }

    pub fn value(&self, j: usize, k: usize) -> C64 {
        self.values[[j, k]]
    }

    pub fn basis_a_id(&self) -> &str {
        &self.basis_a_id
    }

    pub fn basis_b_id(&self) -> &str {
        &self.basis_b_id
    }

    /// |Σ − 1|, the normalization defect.
    pub fn normalization_deviation(&self) -> f64 {
        let total: C64 = self.values.iter().sum();
        (total - C64::new(1.0, 0.0)).norm()
    }

    /// Largest |Im| over all entries. Zero iff the distribution is
    /// classical-valued for this basis pair.
    pub fn max_imaginary(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// ρ(a_j, b_k) = ⟨b_k|a_j⟩⟨a_j|ρ|b_k⟩ for all j, k.
pub fn kd_distribution(
    rho: &DensityOperator,
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    tol: &Tolerances,
) -> Result<KDDistribution> {
    let dim = rho.dim();
    if basis_a.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis_a.dim(),
        });
    }
    if basis_b.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis_b.dim(),
        });
    }
    let mut values = Array2::zeros((dim, dim));
    for j in 0..dim {
        let a_j = basis_a.vector(j);
        for k in 0..dim {
            let b_k = basis_b.vector(k);
            let overlap = inner_product(b_k, a_j)?;
            let sandwich = rho.sandwich(a_j, b_k)?;
            values[[j, k]] = overlap * sandwich;
        }
    }
    KDDistribution::new(
        values,
        basis_a.identity().to_string(),
        basis_b.identity().to_string(),
        tol,
    )
}

/// Row and column sums of the joint distribution. These are the Born
/// probabilities of the A and B measurements; any imaginary residue or
/// out-of-range value beyond tolerance is reported as an error rather
/// than silently discarded.
pub fn marginals(kd: &KDDistribution, tol: &Tolerances) -> Result<(Vec<f64>, Vec<f64>)> {
    let dim = kd.dim();
    let mut row = Vec::with_capacity(dim);
    let mut col = Vec::with_capacity(dim);
    for j in 0..dim {
        let sum: C64 = (0..dim).map(|k| kd.value(j, k)).sum();
        if sum.im.abs() > tol.imaginary_leak {
            return Err(Error::ImaginaryLeak {
                magnitude: sum.im.abs(),
                index: j,
                context: "marginal over the second basis",
            });
        }
        if sum.re < -tol.born_floor || sum.re > 1.0 + tol.born_floor {
            return Err(Error::NotAProbability {
                value: sum.re,
                index: j,
            });
        }
        row.push(sum.re);
    }
    for k in 0..dim {
        let sum: C64 = (0..dim).map(|j| kd.value(j, k)).sum();
        if sum.im.abs() > tol.imaginary_leak {
            return Err(Error::ImaginaryLeak {
                magnitude: sum.im.abs(),
                index: k,
                context: "marginal over the first basis",
            });
        }
        if sum.re < -tol.born_floor || sum.re > 1.0 + tol.born_floor {
            return Err(Error::NotAProbability {
                value: sum.re,
                index: k,
            });
        }
        col.push(sum.re);
    }
    Ok((row, col))
}

/// Result of inverting a joint distribution back into a density operator.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// The reconstructed state, validated (Hermitian, unit trace, positive
    /// within tolerance).
    pub rho: DensityOperator,
    /// Frobenius-scale asymmetry of the raw inverse before symmetrization.
    /// Large values mean the input distribution was not consistent with
    /// any Hermitian operator.
    pub hermiticity_deviation: f64,
    /// Smallest |⟨b_k|a_j⟩| encountered. Values near the overlap floor
    /// amplify noise in the corresponding cells.
    pub min_overlap: f64,
}

/// Inverts ρ(a_j, b_k) into ρ̂ = Σ_{j,k} ρ(a_j,b_k) |a_j⟩⟨b_k| / ⟨b_k|a_j⟩.
///
/// Requires every |⟨b_k|a_j⟩| ≥ `tol.overlap_floor`; the division makes the
/// inverse unboundedly sensitive as overlaps vanish, so orthogonal pairs
/// are rejected outright. The raw inverse is symmetrized and then validated
/// as a density operator. Eigenvalues are never clipped: a distribution
/// inconsistent with a positive state fails loudly.
pub fn reconstruct_density(
    kd: &KDDistribution,
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    tol: &Tolerances,
) -> Result<Reconstruction> {
    let dim = kd.dim();
    check_basis(kd.basis_a_id(), basis_a, dim, "A")?;
    check_basis(kd.basis_b_id(), basis_b, dim, "B")?;

    let mut min_overlap = f64::INFINITY;
    let mut raw = Array2::<C64>::zeros((dim, dim));
    for j in 0..dim {
        let a_j = basis_a.vector(j);
        for k in 0..dim {
            let b_k = basis_b.vector(k);
            let overlap = inner_product(b_k, a_j)?;
            let magnitude = overlap.norm();
            if magnitude < tol.overlap_floor {
                return Err(Error::OverlapTooSmall {
                    a_index: j,
                    b_index: k,
                    magnitude,
                    floor: tol.overlap_floor,
                });
            }
            min_overlap = min_overlap.min(magnitude);
            let weight = kd.value(j, k) / overlap;
            for r in 0..dim {
                for c in 0..dim {
                    raw[[r, c]] += weight * a_j.amplitudes()[r] * b_k.amplitudes()[c].conj();
                }
            }
        }
    }

    let mut asym_sq = 0.0f64;
    let mut sym = Array2::<C64>::zeros((dim, dim));
    for r in 0..dim {
        for c in 0..dim {
            let d = raw[[r, c]] - raw[[c, r]].conj();
            asym_sq += 0.25 * d.norm_sqr();
            sym[[r, c]] = (raw[[r, c]] + raw[[c, r]].conj()) * 0.5;
        }
    }
    let rho = DensityOperator::new(sym, tol)?;
    Ok(Reconstruction {
        rho,
        hermiticity_deviation: asym_sq.sqrt(),
        min_overlap,
    })
}

fn check_basis(
    recorded: &str,
    basis: &OrthonormalBasis,
    dim: usize,
    which: &'static str,
) -> Result<()> {
    if basis.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis.dim(),
        });
    }
    if basis.identity() != recorded {
        return Err(Error::BasisIdMismatch {
            which,
            expected: recorded.to_string(),
            found: basis.identity().to_string(),
        });
    }
    Ok(())
}

/// The complex conditional p(m|a,b) = ⟨b|m⟩⟨m|a⟩ / ⟨b|a⟩ for single
/// vectors. This is the weak value of |m⟩⟨m| between preselection a and
/// postselection b; it does not depend on any state.
pub fn conditional_weak_value(
    a: &StateVector,
    b: &StateVector,
    m: &StateVector,
    tol: &Tolerances,
) -> Result<C64> {
    let ba = inner_product(b, a)?;
    let magnitude = ba.norm();
    if magnitude < tol.overlap_floor {
        return Err(Error::OverlapTooSmall {
            a_index: 0,
            b_index: 0,
            magnitude,
            floor: tol.overlap_floor,
        });
    }
    let bm = inner_product(b, m)?;
    let ma = inner_product(m, a)?;
    Ok(bm * ma / ba)
}

/// The full conditional table p(m_i | a_j, b_k) for three bases, with an
/// explicit mask of cells where ⟨b_k|a_j⟩ is too small for the conditional
/// to exist. Independent of any state.
#[derive(Debug, Clone)]
pub struct ConditionalKernel {
    outcomes: Vec<Array2<C64>>,
    defined: Array2<bool>,
    basis_a_id: String,
    basis_b_id: String,
    basis_m_id: String,
    completeness_deviation: f64,
}

impl ConditionalKernel {
    pub fn dim(&self) -> usize {
        self.defined.nrows()
    }

    /// p(m_i | a_j, b_k), or None when the cell is undefined.
    pub fn value(&self, m: usize, j: usize, k: usize) -> Option<C64> {
        if self.defined[[j, k]] {
            Some(self.outcomes[m][[j, k]])
        } else {
            None
        }
    }

    /// The (j,k) table for one outcome; undefined cells hold zero.
    pub fn outcome_table(&self, m: usize) -> &Array2<C64> {
        &self.outcomes[m]
    }

    pub fn is_defined(&self, j: usize, k: usize) -> bool {
        self.defined[[j, k]]
    }

    pub fn undefined_cells(&self) -> usize {
        self.defined.iter().filter(|d| !**d).count()
    }

    /// Worst |Σ_i p(m_i|a_j,b_k) − 1| over defined cells. The sum is an
    /// algebraic identity, so this measures only rounding.
    pub fn completeness_deviation(&self) -> f64 {
        self.completeness_deviation
    }

    pub fn basis_a_id(&self) -> &str {
        &self.basis_a_id
    }

    pub fn basis_b_id(&self) -> &str {
        &self.basis_b_id
    }

    pub fn basis_m_id(&self) -> &str {
        &self.basis_m_id
    }
}

/// Builds the conditional table for outcome basis M between bases A and B.
/// Cells with |⟨b_k|a_j⟩| < `tol.overlap_floor` are masked rather than
/// divided through. Completeness (Σ over outcomes = 1 on every defined
/// cell) is verified to `tol.kernel_completeness`.
pub fn conditional_kernel(
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    basis_m: &OrthonormalBasis,
    tol: &Tolerances,
) -> Result<ConditionalKernel> {
    let dim = basis_a.dim();
    if basis_b.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis_b.dim(),
        });
    }
    if basis_m.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis_m.dim(),
        });
    }

    let mut defined = Array2::from_elem((dim, dim), true);
    let mut outcomes = vec![Array2::<C64>::zeros((dim, dim)); dim];
    let mut worst = 0.0f64;
    for j in 0..dim {
        let a_j = basis_a.vector(j);
        for k in 0..dim {
            let b_k = basis_b.vector(k);
            let ba = inner_product(b_k, a_j)?;
            if ba.norm() < tol.overlap_floor {
                defined[[j, k]] = false;
                continue;
            }
            let mut total = C64::new(0.0, 0.0);
            for (i, table) in outcomes.iter_mut().enumerate() {
                let m_i = basis_m.vector(i);
                let bm = inner_product(b_k, m_i)?;
                let ma = inner_product(m_i, a_j)?;
                let p = bm * ma / ba;
                table[[j, k]] = p;
                total += p;
            }
            let dev = (total - C64::new(1.0, 0.0)).norm();
            if dev > tol.kernel_completeness {
                return Err(Error::KernelNotNormalized {
                    a_index: j,
                    b_index: k,
                    deviation: dev,
                });
            }
            worst = worst.max(dev);
        }
    }
    Ok(ConditionalKernel {
        outcomes,
        defined,
        basis_a_id: basis_a.identity().to_string(),
        basis_b_id: basis_b.identity().to_string(),
        basis_m_id: basis_m.identity().to_string(),
        completeness_deviation: worst,
    })
}

/// Complex-weighted Bayes rule: P(m_i) = Σ_{j,k} ρ(a_j,b_k) p(m_i|a_j,b_k).
///
/// The imaginary parts cancel exactly when the inputs are consistent, so a
/// residue above `tol.imaginary_leak` is an error. Undefined kernel cells
/// are only tolerated where the distribution itself carries no weight, and
/// the prediction then uses only the information the distribution holds
/// (for a fully diagonal joint that means dephased statistics).
pub fn predict_probabilities(
    kd: &KDDistribution,
    kernel: &ConditionalKernel,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let dim = kd.dim();
    if kernel.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: kernel.dim(),
        });
    }
    if kernel.basis_a_id() != kd.basis_a_id() {
        return Err(Error::BasisIdMismatch {
            which: "A",
            expected: kd.basis_a_id().to_string(),
            found: kernel.basis_a_id().to_string(),
        });
    }
    if kernel.basis_b_id() != kd.basis_b_id() {
        return Err(Error::BasisIdMismatch {
            which: "B",
            expected: kd.basis_b_id().to_string(),
            found: kernel.basis_b_id().to_string(),
        });
    }

    let blocked = (0..dim)
        .flat_map(|j| (0..dim).map(move |k| (j, k)))
        .filter(|&(j, k)| !kernel.is_defined(j, k) && kd.value(j, k).norm() > tol.magnitude_floor)
        .count();
    if blocked > 0 {
        return Err(Error::UndefinedCells { count: blocked });
    }

    let mut probabilities = Vec::with_capacity(dim);
    let mut total = 0.0f64;
    for i in 0..dim {
        let table = kernel.outcome_table(i);
        let mut p = C64::new(0.0, 0.0);
        for j in 0..dim {
            for k in 0..dim {
                if kernel.is_defined(j, k) {
                    p += kd.value(j, k) * table[[j, k]];
                }
            }
        }
        if p.im.abs() > tol.imaginary_leak {
            return Err(Error::ImaginaryLeak {
                magnitude: p.im.abs(),
                index: i,
                context: "predicted probability",
            });
        }
        if p.re < -tol.born_floor || p.re > 1.0 + tol.born_floor {
            return Err(Error::NotAProbability { value: p.re, index: i });
        }
        probabilities.push(p.re);
        total += p.re;
    }
    let deviation = (total - 1.0).abs();
    if deviation > tol.kd_normalization {
        return Err(Error::KdNotNormalized { deviation });
    }
    Ok(probabilities)
}

/// Rewrites a joint distribution over (A, B) as one over (A, M) by summing
/// the complex conditional against the B index:
/// ρ(a_j, m_i) = Σ_k ρ(a_j, b_k) p(m_i|a_j, b_k).
///
/// This is exact, not an approximation; transforming back through the
/// original basis recovers the input to rounding error.
pub fn transform_representation(
    kd: &KDDistribution,
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    basis_m: &OrthonormalBasis,
    tol: &Tolerances,
) -> Result<KDDistribution> {
    let dim = kd.dim();
    check_basis(kd.basis_a_id(), basis_a, dim, "A")?;
    check_basis(kd.basis_b_id(), basis_b, dim, "B")?;
    let kernel = conditional_kernel(basis_a, basis_b, basis_m, tol)?;

    let blocked = (0..dim)
        .flat_map(|j| (0..dim).map(move |k| (j, k)))
        .filter(|&(j, k)| !kernel.is_defined(j, k) && kd.value(j, k).norm() > tol.magnitude_floor)
        .count();
    if blocked > 0 {
        return Err(Error::UndefinedCells { count: blocked });
    }

    let mut values = Array2::<C64>::zeros((dim, dim));
    for j in 0..dim {
        for i in 0..dim {
            let table = kernel.outcome_table(i);
            let mut s = C64::new(0.0, 0.0);
            for k in 0..dim {
                if kernel.is_defined(j, k) {
                    s += kd.value(j, k) * table[[j, k]];
                }
            }
            values[[j, i]] = s;
        }
    }
    KDDistribution::new(
        values,
        kd.basis_a_id().to_string(),
        basis_m.identity().to_string(),
        tol,
    )
}

/// Polar decomposition of a complex conditional probability, with the
/// phase read as an action in units of ħ.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionPhase {
    /// |p|.
    pub magnitude: f64,
    /// Arg p on the principal branch (−π, π].
    pub phase: f64,
    /// ħ·Arg p.
    pub action: f64,
    /// The ħ used.
    pub hbar: f64,
}

/// Splits a complex conditional probability into magnitude and phase and
/// scales the phase by ħ. The branch is (−π, π]: a negative real input
/// maps to +π. Zero (or near-zero) inputs have no phase and are rejected.
pub fn action_phase(p: C64, hbar: f64, tol: &Tolerances) -> Result<ActionPhase> {
    if !hbar.is_finite() || hbar <= 0.0 {
        return Err(Error::InvalidHbar { hbar });
    }
    if !(p.re.is_finite() && p.im.is_finite()) {
        return Err(Error::NonFinite {
            context: "conditional probability",
        });
    }
    let magnitude = p.norm();
    if magnitude < tol.magnitude_floor {
        return Err(Error::ZeroWeakValue { magnitude });
    }
    let phase = principal_arg(p);
    Ok(ActionPhase {
        magnitude,
        phase,
        action: hbar * phase,
        hbar,
    })
}

/// Arg in (−π, π]. `atan2` returns −π for arguments with a negative-zero
/// imaginary part on the negative real axis; that edge is folded to +π so
/// the branch is half-open on the correct side.
fn principal_arg(p: C64) -> f64 {
    let a = p.arg();
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}
