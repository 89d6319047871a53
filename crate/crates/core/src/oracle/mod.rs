//! Dense linear algebra used to brute-force check the closed forms.
//!
//! Everything here works on full `N^k × N^k` matrices and is bounded by a
//! size guard ([`DEFAULT_SIZE_GUARD`] unless overridden). Multi-indices are
//! flattened row-major with party 1 most significant.

mod dense;
mod eigen;
mod ops;

pub use dense::DenseMatrix;
pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen, MAX_SWEEPS};
pub(crate) use ops::sparse_su_generators;
pub use ops::{
    hermitian_trace_norm, partial_transpose, realign, reduced_density, relative_entropy_dense, su_generators,
    trace_norm, von_neumann_entropy, xlogx, LogBase, PartySubset, LOG_CLAMP,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{PureSCState, SCState};

/// Largest dense dimension `N^k` the verification path will build.
pub const DEFAULT_SIZE_GUARD: usize = 4096;

/// `N^k` checked against `guard`.
pub fn guarded_dim(local_dim: usize, parties: usize, guard: usize) -> Result<usize> {
    let dim = (local_dim as u128)
        .checked_pow(parties as u32)
        .ok_or(Error::SizeGuard { dim: u128::MAX, guard })?;
    if dim > guard as u128 {
        return Err(Error::SizeGuard { dim, guard });
    }
    Ok(dim as usize)
}

/// Flat index of `|m m ⋯ m⟩` (k copies).
pub fn repeated_index(m: usize, local_dim: usize, parties: usize) -> usize {
    (0..parties).fold(0, |acc, _| acc * local_dim + m)
}

/// Full density matrix of an SC state.
pub fn dense_from_sc(state: &SCState, guard: usize) -> Result<DenseMatrix> {
    let (n, k) = (state.local_dim(), state.parties());
    let dim = guarded_dim(n, k, guard)?;
    let mut out = DenseMatrix::zeros(dim, dim);
    for m in 0..n {
        for j in 0..n {
            out[(repeated_index(m, n, k), repeated_index(j, n, k))] = state.coeffs().entry(m, j);
        }
    }
    Ok(out)
}

/// State vector `Σ_m c_m |m⋯m⟩`.
pub fn dense_vector_from_pure(psi: &PureSCState, guard: usize) -> Result<Vec<Complex64>> {
    let (n, k) = (psi.local_dim(), psi.parties());
    let dim = guarded_dim(n, k, guard)?;
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    for (m, c) in psi.amplitudes().iter().enumerate() {
        v[repeated_index(m, n, k)] = *c;
    }
    Ok(v)
}
