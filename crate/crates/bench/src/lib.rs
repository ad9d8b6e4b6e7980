//! Shared fixture builders for the benchmark suite.

use kdcalc_core::linalg::{substream_seed, SeededStream};
use kdcalc_core::{haar_random_basis, random_density, DensityOperator, OrthonormalBasis};

/// A deterministic random (state, basis, basis) triple at the given size.
pub fn instance(dim: usize, tag: u64) -> (DensityOperator, OrthonormalBasis, OrthonormalBasis) {
    let mut s = SeededStream::from_seed(substream_seed(0xbe9c, tag));
    let rho = random_density(dim, dim, &mut s).expect("dim > 0");
    let a = haar_random_basis(dim, &mut s).expect("dim > 0");
    let b = haar_random_basis(dim, &mut s).expect("dim > 0");
    (rho, a, b)
}
