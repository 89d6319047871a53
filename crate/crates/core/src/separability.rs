//! Separability of SC states.
//!
//! Every partial transpose of an SC state has the same spectrum: the
//! diagonal `a_mm`, a pair `±|a_mn|` for each `m < n`, and `N^k - N²` zeros.
//! The state is therefore fully separable exactly when all coherences
//! vanish, which is also when the realignment norm `Σ|a_mn|` equals 1 and
//! when the off-diagonal block of the Bloch correlation tensor is zero.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{dense_from_sc, guarded_dim, partial_transpose, sparse_su_generators, DenseMatrix, PartySubset};
use crate::state::SCState;

/// Default threshold for the Bloch-tensor test.
pub const COHERENCE_BLOCK_TOL: f64 = 1e-9;

/// Coherences at or below this magnitude do not contribute a witness term.
pub const WITNESS_PAIR_TOL: f64 = 1e-12;

/// Closed-form spectrum of a partial transpose of an SC state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PtSpectrum {
    /// `a_mm`, the block `A`.
    pub diagonal: Vec<f64>,
    /// `|a_mn|` for `m < n`; each contributes `+|a_mn|` and `-|a_mn|` (block `B`).
    pub pair_magnitudes: Vec<f64>,
    /// Size of the zero block `C`, `N^k - N²`.
    pub zero_multiplicity: u64,
}

impl PtSpectrum {
    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        let min_diag = self.diagonal.iter().copied().fold(f64::INFINITY, f64::min);
        let max_pair = self.pair_magnitudes.iter().copied().fold(0.0, f64::max);
        let mut min = min_diag.min(-max_pair);
        if self.zero_multiplicity > 0 {
            min = min.min(0.0);
        }
        min
    }

    /// Sum of the negative eigenvalues, `-Σ_{m<n} |a_mn|`.
    pub fn negative_sum(&self) -> f64 {
        -self.pair_magnitudes.iter().sum::<f64>()
    }

    pub fn len(&self) -> u64 {
        self.diagonal.len() as u64 + 2 * self.pair_magnitudes.len() as u64 + self.zero_multiplicity
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The full multiset, ascending. Fails if it has more than `guard` entries.
    pub fn sorted_values(&self, guard: usize) -> Result<Vec<f64>> {
        let len = self.len();
        if len > guard as u64 {
            return Err(Error::SizeGuard {
                dim: len as u128,
                guard,
            });
        }
        let mut v: Vec<f64> = self.diagonal.clone();
        for &p in &self.pair_magnitudes {
            v.push(p);
            v.push(-p);
        }
        v.extend(std::iter::repeat_n(0.0, self.zero_multiplicity as usize));
        v.sort_by(f64::total_cmp);
        Ok(v)
    }
}

pub fn pt_spectrum(state: &SCState) -> Result<PtSpectrum> {
    let n = state.local_dim() as u64;
    let total = state.total_dim()?;
    Ok(PtSpectrum {
        diagonal: state.coeffs().diagonal(),
        pair_magnitudes: state.coeffs().pair_magnitudes(),
        zero_multiplicity: total - n * n,
    })
}

/// True iff every coherence `|a_mn|`, `m < n`, is at most `tol`.
pub fn is_fully_separable(state: &SCState, tol: f64) -> bool {
    state.coeffs().pair_magnitudes().iter().all(|&p| p <= tol)
}

/// `Σ_{m,n} |a_mn|`, the trace norm of the realigned state for any bipartition.
pub fn realignment_norm(state: &SCState) -> f64 {
    let n = state.local_dim();
    (0..n)
        .flat_map(|m| (0..n).map(move |j| (m, j)))
        .map(|(m, j)| state.coeffs().entry(m, j).norm())
        .sum()
}

/// One nonzero entry of a witness operator, indices flattened row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessTerm {
    pub row: u64,
    pub col: u64,
    pub value: Complex64,
}

/// `W = Σ_{m<n} (|Ψ_mn⟩⟨Ψ_mn|)^{T_1}` stored as a sparse term list, where
/// `|Ψ_mn⟩ = (|m n⋯n⟩ - e^{iθ_mn} |n m⋯m⟩)/√2`, `θ_mn = arg a_mn`, is the
/// eigenvector of `ρ^{T_1}` with eigenvalue `-|a_mn|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    parties: usize,
    local_dim: usize,
    terms: Vec<WitnessTerm>,
    source_pairs: Vec<(usize, usize)>,
    source_expectation: f64,
}

impl Witness {
    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn terms(&self) -> &[WitnessTerm] {
        &self.terms
    }

    pub fn source_pairs(&self) -> &[(usize, usize)] {
        &self.source_pairs
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Tr[W ρ]` on the state the witness was built from: `-Σ |a_mn|` over the source pairs.
    pub fn source_expectation(&self) -> f64 {
        self.source_expectation
    }

    /// Local digits of a flat index, party 1 first.
    pub fn digits(&self, index: u64) -> Vec<usize> {
        let n = self.local_dim as u64;
        let mut d = vec![0; self.parties];
        let mut x = index;
        for slot in d.iter_mut().rev() {
            *slot = (x % n) as usize;
            x /= n;
        }
        d
    }

    pub fn to_dense(&self, guard: usize) -> Result<DenseMatrix> {
        let dim = guarded_dim(self.local_dim, self.parties, guard)?;
        let mut m = DenseMatrix::zeros(dim, dim);
        for t in &self.terms {
            m[(t.row as usize, t.col as usize)] += t.value;
        }
        Ok(m)
    }
}

/// Flat index of the basis vector with party 1 at `first` and the rest at `rest`.
fn split_index(first: u64, rest: u64, n: u64, parties: usize) -> Result<u64> {
    let mut idx = first;
    for _ in 1..parties {
        idx = idx
            .checked_mul(n)
            .and_then(|x| x.checked_add(rest))
            .ok_or(Error::Overflow)?;
    }
    Ok(idx)
}

/// Builds the witness from the negative-eigenvalue eigenvectors of `ρ^{T_1}`.
/// Separable states give an empty witness.
pub fn build_witness(state: &SCState) -> Result<Witness> {
    let (k, n) = (state.parties(), state.local_dim());
    state.total_dim()?;
    let nn = n as u64;
    let mut terms = Vec::new();
    let mut source_pairs = Vec::new();
    let mut expectation = 0.0;
    for m in 0..n {
        for j in m + 1..n {
            let a = state.coeffs().entry(m, j);
            if a.norm() <= WITNESS_PAIR_TOL {
                continue;
            }
            let phase = a / a.norm();
            let (mu, ju) = (m as u64, j as u64);
            // |u⟩ = |m j⋯j⟩, |v⟩ = |j m⋯m⟩; the T_1 image of |u⟩⟨v| is |j⋯j⟩⟨m⋯m|.
            let u = split_index(mu, ju, nn, k)?;
            let v = split_index(ju, mu, nn, k)?;
            let all_m = split_index(mu, mu, nn, k)?;
            let all_j = split_index(ju, ju, nn, k)?;
            let half = Complex64::new(0.5, 0.0);
            terms.push(WitnessTerm {
                row: u,
                col: u,
                value: half,
            });
            terms.push(WitnessTerm {
                row: v,
                col: v,
                value: half,
            });
            terms.push(WitnessTerm {
                row: all_j,
                col: all_m,
                value: -phase.conj() * 0.5,
            });
            terms.push(WitnessTerm {
                row: all_m,
                col: all_j,
                value: -phase * 0.5,
            });
            source_pairs.push((m, j));
            expectation -= a.norm();
        }
    }
    Ok(Witness {
        parties: k,
        local_dim: n,
        terms,
        source_pairs,
        source_expectation: expectation,
    })
}

/// What a witness can be evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum WitnessTarget<'a> {
    State(&'a SCState),
    Dense(&'a DenseMatrix),
}

impl<'a> From<&'a SCState> for WitnessTarget<'a> {
    fn from(s: &'a SCState) -> Self {
        WitnessTarget::State(s)
    }
}

impl<'a> From<&'a DenseMatrix> for WitnessTarget<'a> {
    fn from(m: &'a DenseMatrix) -> Self {
        WitnessTarget::Dense(m)
    }
}

/// `Tr[W · target]`. SC targets are evaluated without building dense matrices.
pub fn witness_expectation<'a>(w: &Witness, target: impl Into<WitnessTarget<'a>>) -> Result<f64> {
    match target.into() {
        WitnessTarget::State(s) => {
            if s.parties() != w.parties || s.local_dim() != w.local_dim {
                return Err(Error::DimMismatch {
                    expected: w.local_dim,
                    found: s.local_dim(),
                });
            }
            let n = w.local_dim as u64;
            // flat index of |j⋯j⟩ is j times this unit
            let unit = (0..w.parties).fold(0u64, |acc, _| acc * n + 1);
            let level = |idx: u64| idx.is_multiple_of(unit).then(|| (idx / unit) as usize);
            let mut sum = Complex64::new(0.0, 0.0);
            for t in &w.terms {
                if let (Some(r), Some(c)) = (level(t.row), level(t.col)) {
                    sum += t.value * s.coeffs().entry(c, r);
                }
            }
            Ok(sum.re)
        }
        WitnessTarget::Dense(m) => {
            let dim = (w.local_dim as u64)
                .checked_pow(w.parties as u32)
                .ok_or(Error::Overflow)?;
            if !m.is_square() || m.rows() as u64 != dim {
                return Err(Error::DimMismatch {
                    expected: dim as usize,
                    found: m.rows(),
                });
            }
            let sum: Complex64 = w
                .terms
                .iter()
                .map(|t| t.value * m[(t.col as usize, t.row as usize)])
                .sum();
            Ok(sum.re)
        }
    }
}

/// Bloch coefficients of an SC state viewed as a bipartite state across the
/// split `1..l | l+1..k`, with local dimensions `M = N^l` and `D = N^{k-l}`.
///
/// `r_i = (M/2) Tr(ρ λ_i ⊗ I)`, `s_j = (D/2) Tr(ρ I ⊗ λ_j)` and
/// `t_ij = (M D / 4) Tr(ρ λ_i ⊗ λ_j)`, using the generator ordering of
/// [`crate::oracle::su_generators`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlochDecomposition {
    pub split: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    /// Row-major `(M² - 1) × (D² - 1)`.
    pub t: Vec<f64>,
    /// Largest imaginary part discarded from any coefficient.
    pub max_imag_residue: f64,
}

impl BlochDecomposition {
    pub fn t_rows(&self) -> usize {
        self.dim_a * self.dim_a - 1
    }

    pub fn t_cols(&self) -> usize {
        self.dim_b * self.dim_b - 1
    }

    pub fn t(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.t_cols() + j]
    }

    /// Largest `|t_ij|` over the block `i >= M - 1`, `j >= D - 1` where both
    /// generators are off-diagonal.
    pub fn coherence_block_max(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in self.dim_a - 1..self.t_rows() {
            for j in self.dim_b - 1..self.t_cols() {
                worst = worst.max(self.t(i, j).abs());
            }
        }
        worst
    }
}

pub fn bloch_decomposition(state: &SCState, split: usize, guard: usize) -> Result<BlochDecomposition> {
    let (k, n) = (state.parties(), state.local_dim());
    if split == 0 || split >= k {
        return Err(Error::InvalidSplit { l: split, k });
    }
    let rho = dense_from_sc(state, guard)?;
    let dim_a = n.pow(split as u32);
    let dim_b = n.pow((k - split) as u32);
    let gen_a = sparse_su_generators(dim_a);
    let gen_b = sparse_su_generators(dim_b);
    let mut imag = 0.0_f64;
    let mut take_real = |z: Complex64| {
        imag = imag.max(z.im.abs());
        z.re
    };

    // reduced operators on each side
    let mut rho_a = DenseMatrix::zeros(dim_a, dim_a);
    let mut rho_b = DenseMatrix::zeros(dim_b, dim_b);
    for a in 0..dim_a {
        for a2 in 0..dim_a {
            for b in 0..dim_b {
                rho_a[(a, a2)] += rho[(a * dim_b + b, a2 * dim_b + b)];
            }
        }
    }
    for b in 0..dim_b {
        for b2 in 0..dim_b {
            for a in 0..dim_a {
                rho_b[(b, b2)] += rho[(a * dim_b + b, a * dim_b + b2)];
            }
        }
    }
    let ma = dim_a as f64;
    let mb = dim_b as f64;
    let r: Vec<f64> = gen_a
        .iter()
        .map(|g| {
            take_real(
                g.entries
                    .iter()
                    .map(|&(row, col, v)| v * rho_a[(col, row)])
                    .sum::<Complex64>()
                    * (ma / 2.0),
            )
        })
        .collect();
    let s: Vec<f64> = gen_b
        .iter()
        .map(|g| {
            take_real(
                g.entries
                    .iter()
                    .map(|&(row, col, v)| v * rho_b[(col, row)])
                    .sum::<Complex64>()
                    * (mb / 2.0),
            )
        })
        .collect();

    let cols = gen_b.len();
    let mut t = vec![0.0; gen_a.len() * cols];
    let scale = ma * mb / 4.0;
    for (i, ga) in gen_a.iter().enumerate() {
        // K[b, b'] = Σ_{(a', a, x) ∈ λ_i} x ρ[(a b), (a' b')]
        let mut kmat = DenseMatrix::zeros(dim_b, dim_b);
        for &(a2, a, x) in &ga.entries {
            for b in 0..dim_b {
                for b2 in 0..dim_b {
                    let v = rho[(a * dim_b + b, a2 * dim_b + b2)];
                    if v.re != 0.0 || v.im != 0.0 {
                        kmat[(b, b2)] += x * v;
                    }
                }
            }
        }
        for (j, gb) in gen_b.iter().enumerate() {
            let z: Complex64 = gb.entries.iter().map(|&(b2, b, y)| y * kmat[(b, b2)]).sum();
            t[i * cols + j] = take_real(z * scale);
        }
    }
    Ok(BlochDecomposition {
        split,
        dim_a,
        dim_b,
        r,
        s,
        t,
        max_imag_residue: imag,
    })
}

/// True iff the off-diagonal-generator block of `t` vanishes within `tol`.
pub fn coherence_block_vanishes(b: &BlochDecomposition, tol: f64) -> bool {
    b.coherence_block_max() <= tol
}

/// Dense `ρ^{T_S}` for an SC state.
pub fn dense_partial_transpose(state: &SCState, subset: &PartySubset, guard: usize) -> Result<DenseMatrix> {
    let rho = dense_from_sc(state, guard)?;
    let dims = vec![state.local_dim(); state.parties()];
    partial_transpose(&rho, subset, &dims)
}
