//! Seeded random states and bases.
//!
//! Reproducibility contract: a given (seed, call sequence) pair yields
//! bit-identical output on every platform and in every release. That is why
//! the uniform and Gaussian transforms are spelled out here instead of
//! delegating to a distributions crate whose internals may change.

use ndarray::Array2;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use super::{C64, OrthonormalBasis, StateVector};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Deterministic random stream (ChaCha12, seeded from a `u64`).
#[derive(Debug, Clone)]
pub struct SeededStream {
    rng: ChaCha12Rng,
}

impl SeededStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex normal: E[z] = 0, E[|z|²] = 1, via the polar
    /// Box–Muller transform. Real and imaginary parts are N(0, 1/2).
    pub fn standard_complex(&mut self) -> C64 {
        let u1 = 1.0 - self.uniform(); // (0, 1], keeps the log finite
        let u2 = self.uniform();
        let r = (-u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        C64::new(r * angle.cos(), r * angle.sin())
    }

    /// ±1 draw with P(+1) = p, consuming one uniform.
    pub fn sign_with_probability(&mut self, p: f64) -> f64 {
        if self.uniform() < p {
            1.0
        } else {
            -1.0
        }
    }
}

/// Mixes a stream tag into a base seed so that parallel substreams are
/// decorrelated (splitmix64 finalizer). Used for per-cell sampling seeds;
/// public so drivers can reproduce any single substream in isolation.
pub fn substream_seed(seed: u64, tag: u64) -> u64 {
    let mut z = tag.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    seed ^ (z ^ (z >> 31))
}

/// A Haar-distributed random orthonormal basis of the given dimension,
/// labeled "u0" … "u{d−1}".
///
/// Draws a Ginibre matrix and orthonormalizes it with modified
/// Gram–Schmidt (two re-orthogonalization passes). The positive-diagonal
/// phase convention of Gram–Schmidt is exactly the one under which the
/// resulting unitary is Haar-distributed.
pub fn haar_random_basis(dim: usize, stream: &mut SeededStream) -> Result<OrthonormalBasis> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut v: Vec<C64> = (0..dim).map(|_| stream.standard_complex()).collect();
        // Ginibre columns are almost surely independent; the retry only
        // fires if a draw is numerically degenerate.
        loop {
            for _pass in 0..2 {
                for q in &columns {
                    let overlap: C64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                    for (vi, qi) in v.iter_mut().zip(q.iter()) {
                        *vi -= overlap * qi;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for vi in v.iter_mut() {
                    *vi /= norm;
                }
                break;
            }
            v = (0..dim).map(|_| stream.standard_complex()).collect();
        }
        columns.push(v);
    }
    let vectors = columns
        .into_iter()
        .map(|c| StateVector::new(c, &Tolerances::default()))
        .collect::<Result<Vec<_>>>()?;
    let labels = (0..dim).map(|j| format!("u{j}")).collect();
    OrthonormalBasis::new(vectors, labels, &Tolerances::default())
}

/// A random density operator of the given rank: ρ = GG†/tr(GG†) with G a
/// dim×rank Ginibre matrix. `rank = 1` gives a Haar-random pure state.
pub fn random_density(
    dim: usize,
    rank: usize,
    stream: &mut SeededStream,
) -> Result<super::DensityOperator> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let g: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..rank).map(|_| stream.standard_complex()).collect())
        .collect();
    let mut m = Array2::<C64>::zeros((dim, dim));
    let mut trace = 0.0f64;
    for j in 0..dim {
        for k in 0..dim {
            let mut s = C64::new(0.0, 0.0);
            for r in 0..rank {
                s += g[j][r] * g[k][r].conj();
            }
            m[[j, k]] = s;
        }
        trace += m[[j, j]].re;
    }
    if trace <= f64::MIN_POSITIVE {
        return Err(Error::NonFinite {
            context: "random density trace",
        });
    }
    m.mapv_inplace(|z| z / trace);
    // Exact Gram structure, so validation can only fail on float pathology.
    super::DensityOperator::new(m, &Tolerances::default())
}
