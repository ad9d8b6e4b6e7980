//! Weak-measurement simulation with a qubit meter.
//!
//! The system couples to a two-level pointer through U = exp(−i g Π_a ⊗ Y)
//! and the system is then postselected on |b⟩. Because Π_a is a projector
//! the coupled evolution collapses to two Kraus operators on the system,
//!
//!   E₀ = 1 + (cos g − 1) Π_a,   E₁ = sin g · Π_a,
//!
//! so the (unnormalized) pointer state after postselection is the 2×2
//! matrix M[μν] = ⟨b|E_μ ρ E_ν|b⟩. The complex pointer reading
//! (⟨X⟩ + i⟨Y⟩)/(2g) converges to the conditional quasiprobability
//! ρ(a,b)/P(b) as g → 0, with bias O(g²); multiplying by the postselection
//! rate recovers the joint cell itself. `Sampled` mode replaces the exact
//! pointer moments with finite-shot ±1 draws.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::kdq::{kd_distribution, KDDistribution};
use crate::linalg::{
    substream_seed, inner_product, C64, DensityOperator, OrthonormalBasis, SeededStream, StateVector,
};
use crate::tolerances::Tolerances;

/// How pointer moments are read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeterMode {
    /// Exact quantum-mechanical expectation values.
    Exact,
    /// Finite-shot ±1 sampling of the X and Y pointer quadratures. The
    /// budget is split X-first: X gets `shots − shots/2`, Y gets `shots/2`.
    Sampled { shots: u64 },
}

/// Coupling strength, readout mode, and sampling seed for one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterConfig {
    /// Interaction angle g. Must lie in (0, π/2); the weak regime is g ≪ 1.
    pub coupling: f64,
    pub mode: MeterMode,
    /// Base seed for `Sampled` mode; ignored by `Exact`.
    pub seed: u64,
}

impl MeterConfig {
    fn validate(&self) -> Result<()> {
        if !self.coupling.is_finite()
            || self.coupling <= 0.0
            || self.coupling >= std::f64::consts::FRAC_PI_2
        {
            return Err(Error::InvalidCoupling {
                coupling: self.coupling,
            });
        }
        if let MeterMode::Sampled { shots: 0 } = self.mode {
            return Err(Error::ShotBudgetZero);
        }
        Ok(())
    }
}

/// Couples ρ to a fresh pointer via Π_a at strength `coupling`, postselects
/// the system on |b⟩, and returns the normalized 2×2 pointer state together
/// with the postselection probability (the pre-normalization trace).
pub fn couple_and_postselect(
    rho: &DensityOperator,
    a: &StateVector,
    b: &StateVector,
    coupling: f64,
    tol: &Tolerances,
) -> Result<(Array2<C64>, f64)> {
    if !coupling.is_finite() || coupling <= 0.0 || coupling >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::InvalidCoupling { coupling });
    }
    let dim = rho.dim();
    if a.dim() != dim || b.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if a.dim() != dim { a.dim() } else { b.dim() },
        });
    }

    // |b_μ⟩ = E_μ|b⟩; then M[μν] = ⟨b_μ|ρ|b_ν⟩.
    let ab = inner_product(a, b)?;
    let shrink = C64::new(coupling.cos() - 1.0, 0.0) * ab;
    let kick = C64::new(coupling.sin(), 0.0) * ab;
    let kraus_b: [Vec<C64>; 2] = {
        let mut b0: Vec<C64> = b.amplitudes().to_vec();
        for (b0i, ai) in b0.iter_mut().zip(a.amplitudes().iter()) {
            *b0i += shrink * ai;
        }
        let b1: Vec<C64> = a.amplitudes().iter().map(|ai| kick * ai).collect();
        [b0, b1]
    };

    let mut meter = Array2::<C64>::zeros((2, 2));
    for mu in 0..2 {
        for nu in 0..2 {
            let mut s = C64::new(0.0, 0.0);
            for r in 0..dim {
                let mut row = C64::new(0.0, 0.0);
                for c in 0..dim {
                    row += rho.matrix()[[r, c]] * kraus_b[nu][c];
                }
                s += kraus_b[mu][r].conj() * row;
            }
            meter[[mu, nu]] = s;
        }
    }

    let probability = meter[[0, 0]].re + meter[[1, 1]].re;
    if probability <= tol.postselect_floor {
        return Err(Error::PostselectionImpossible { probability });
    }
    meter.mapv_inplace(|z| z / probability);
    Ok((meter, probability))
}

/// One weak-value estimate together with its exact target.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakValueEstimate {
    /// Pointer readout (⟨X⟩ + i⟨Y⟩)/(2g).
    pub value: C64,
    /// The ideal conditional ⟨b|Π_a ρ|b⟩ / ⟨b|ρ|b⟩ this readout approaches.
    pub reference: C64,
    /// |value − reference|.
    pub error: f64,
    /// Postselection success rate at this coupling.
    pub postselection_probability: f64,
    pub coupling: f64,
    /// Standard error of the readout; present only in `Sampled` mode.
    pub standard_error: Option<f64>,
}

/// Runs one weak measurement of Π_a between ρ and postselection |b⟩.
pub fn estimate_weak_value(
    rho: &DensityOperator,
    a: &StateVector,
    b: &StateVector,
    config: &MeterConfig,
    tol: &Tolerances,
) -> Result<WeakValueEstimate> {
    config.validate()?;
    let (meter, probability) = couple_and_postselect(rho, a, b, config.coupling, tol)?;

    let born = rho.born_probability(b)?;
    if born <= tol.born_floor {
        return Err(Error::PostselectionImpossible { probability: born });
    }
    let ab = inner_product(a, b)?;
    let arho_b = {
        // ⟨b|Π_a ρ|b⟩ = ⟨b|a⟩⟨a|ρ|b⟩
        let av = rho.apply(b)?;
        let a_rho_b: C64 = a
            .amplitudes()
            .iter()
            .zip(av.iter())
            .map(|(x, y)| x.conj() * y)
            .sum();
        ab.conj() * a_rho_b
    };
    let reference = arho_b / born;

    let g = config.coupling;
    let exact_x = 2.0 * meter[[1, 0]].re;
    let exact_y = 2.0 * meter[[1, 0]].im;

    let (value, standard_error) = match config.mode {
        MeterMode::Exact => (C64::new(exact_x, exact_y) / (2.0 * g), None),
        MeterMode::Sampled { shots } => {
            let mut stream = SeededStream::from_seed(config.seed);
            let n_x = shots - shots / 2;
            let n_y = shots / 2;
            let (mean_x, se_x) = sample_quadrature(&mut stream, exact_x, n_x, g);
            let (mean_y, se_y) = sample_quadrature(&mut stream, exact_y, n_y, g);
            let se = (se_x * se_x + se_y * se_y).sqrt();
            (C64::new(mean_x, mean_y) / (2.0 * g), Some(se))
        }
    };

    Ok(WeakValueEstimate {
        value,
        reference,
        error: (value - reference).norm(),
        postselection_probability: probability,
        coupling: g,
        standard_error,
    })
}

/// Draws `n` ±1 readings with mean `target`, returning the sample mean and
/// the standard error of the mean scaled by 1/(2g) (the scale at which the
/// quadrature enters the weak-value readout). With fewer than two draws
/// the spread is unmeasurable and the a-priori bound (population variance
/// of a ±1 variable ≤ 1) is reported instead.
fn sample_quadrature(stream: &mut SeededStream, target: f64, n: u64, g: f64) -> (f64, f64) {
    let p_plus = (0.5 * (1.0 + target)).clamp(0.0, 1.0);
    let mut sum = 0.0f64;
    for _ in 0..n {
        sum += stream.sign_with_probability(p_plus);
    }
    if n >= 2 {
        let mean = sum / n as f64;
        let variance = (1.0 - mean * mean).max(0.0);
        let se = (variance / (n as f64 - 1.0)).sqrt() / (2.0 * g);
        (mean, se)
    } else {
        let mean = if n == 1 { sum } else { 0.0 };
        (mean, 1.0 / (2.0 * g))
    }
}

/// A full joint-distribution estimate from weak measurements, one cell per
/// basis pair (a_j, b_k).
#[derive(Debug, Clone)]
pub struct KDEstimate {
    /// Estimated cells: pointer readout × postselection rate.
    pub values: Array2<C64>,
    /// The ideal distribution the estimates approach as g → 0.
    pub reference: KDDistribution,
    /// Largest |estimate − reference| over all cells.
    pub max_error: f64,
    /// Per-cell postselection rates at this coupling.
    pub postselection: Array2<f64>,
    /// Per-cell standard errors; present only in `Sampled` mode.
    pub standard_errors: Option<Array2<f64>>,
    pub coupling: f64,
}

impl KDEstimate {
    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    /// Σ over all estimated cells; approaches 1 as g → 0.
    pub fn total(&self) -> C64 {
        self.values.iter().sum()
    }
}

/// Estimates every cell of the joint distribution of (A, B) by weak
/// measurement: cell (j,k) couples Π_{a_j}, postselects b_k, and scales
/// the readout by the postselection rate. In `Sampled` mode each cell
/// draws from its own decorrelated substream of `config.seed`, so cell
/// order does not affect the result.
///
/// Fails on the first cell whose postselection never succeeds; callers
/// that prefer partial tables should drive `estimate_weak_value` per cell.
pub fn estimate_kd(
    rho: &DensityOperator,
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
    config: &MeterConfig,
    tol: &Tolerances,
) -> Result<KDEstimate> {
    config.validate()?;
    let reference = kd_distribution(rho, basis_a, basis_b, tol)?;
    let dim = reference.dim();

    let mut values = Array2::<C64>::zeros((dim, dim));
    let mut postselection = Array2::<f64>::zeros((dim, dim));
    let sampled = matches!(config.mode, MeterMode::Sampled { .. });
    let mut standard_errors = sampled.then(|| Array2::<f64>::zeros((dim, dim)));
    let mut max_error = 0.0f64;

    for j in 0..dim {
        for k in 0..dim {
            let cell_config = MeterConfig {
                seed: substream_seed(config.seed, ((j as u64) << 32) | k as u64),
                ..*config
            };
            let est = estimate_weak_value(
                rho,
                basis_a.vector(j),
                basis_b.vector(k),
                &cell_config,
                tol,
            )?;
            let cell = est.value * est.postselection_probability;
            values[[j, k]] = cell;
            postselection[[j, k]] = est.postselection_probability;
            if let (Some(table), Some(se)) = (standard_errors.as_mut(), est.standard_error) {
                table[[j, k]] = se * est.postselection_probability;
            }
            max_error = max_error.max((cell - reference.value(j, k)).norm());
        }
    }

    Ok(KDEstimate {
        values,
        reference,
        max_error,
        postselection,
        standard_errors,
        coupling: config.coupling,
    })
}
