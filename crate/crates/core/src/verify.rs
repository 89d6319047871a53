//! Dense cross-checks of every closed form, reported as residuals.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::measures::{negativity, relative_entropy};
use crate::oracle::{
    dense_from_sc, dense_vector_from_pure, guarded_dim, hermitian_eigenvalues, hermitian_trace_norm, partial_transpose,
    realign, relative_entropy_dense, repeated_index, sparse_su_generators, trace_norm, DenseMatrix, LogBase,
    PartySubset,
};
use crate::separability::{
    bloch_decomposition, build_witness, coherence_block_vanishes, is_fully_separable, pt_spectrum, realignment_norm,
    witness_expectation, BlochDecomposition, COHERENCE_BLOCK_TOL, WITNESS_PAIR_TOL,
};
use crate::slocc::{apply_filter, build_filter, classify_pure, FilterOperator, SUPPORT_TOL};
use crate::state::{random_pure_sc_state_with, random_sc_state_with, spectral_ensemble, PureSCState, SCState};

const EIGEN_TOL: f64 = 1e-9;

/// Largest absolute disagreement between closed form and dense computation,
/// one entry per check.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Residuals {
    pub pt_spectrum: f64,
    pub realignment: f64,
    pub negativity: f64,
    pub relative_entropy: f64,
    pub spectrum: f64,
    pub witness: f64,
    pub bloch: f64,
    pub slocc: Option<f64>,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        [
            self.pt_spectrum,
            self.realignment,
            self.negativity,
            self.relative_entropy,
            self.spectrum,
            self.witness,
            self.bloch,
            self.slocc.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Entrywise maximum.
    pub fn combine(self, o: Residuals) -> Residuals {
        let slocc = match (self.slocc, o.slocc) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        Residuals {
            pt_spectrum: self.pt_spectrum.max(o.pt_spectrum),
            realignment: self.realignment.max(o.realignment),
            negativity: self.negativity.max(o.negativity),
            relative_entropy: self.relative_entropy.max(o.relative_entropy),
            spectrum: self.spectrum.max(o.spectrum),
            witness: self.witness.max(o.witness),
            bloch: self.bloch.max(o.bloch),
            slocc,
        }
    }
}

fn sorted_diff(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs every dense check on one state. `split` selects the bipartition used
/// for the realignment and Bloch checks. The SLOCC check runs only for
/// rank-one coefficient matrices.
pub fn verify_state(state: &SCState, split: usize, base: LogBase, guard: usize) -> Result<Residuals> {
    let (k, n) = (state.parties(), state.local_dim());
    let dim = guarded_dim(n, k, guard)?;
    let rho = dense_from_sc(state, guard)?;
    let dims = vec![n; k];
    // spectra and trace norms below are invariant under a product unitary;
    // rotating makes the dense eigenproblems full rather than block-sparse
    let u = product_unitary(n, k);
    let rotate = |m: &DenseMatrix| u.matmul(m).and_then(|x| x.matmul(&u.adjoint()));
    let rotated = rotate(&rho)?;

    let closed = pt_spectrum(state)?;
    let closed_values = closed.sorted_values(guard)?;
    let mut pt = 0.0_f64;
    let mut neg = 0.0;
    for subset in PartySubset::all_proper(k) {
        let rt = partial_transpose(&rotated, &subset, &dims)?;
        let values = hermitian_eigenvalues(&rt, EIGEN_TOL)?;
        pt = pt.max(sorted_diff(values, closed_values.clone()));
        if subset.indices() == [1] {
            let dense_neg = (hermitian_trace_norm(&rt, EIGEN_TOL)? - 1.0) / 2.0;
            neg = (dense_neg - negativity(state)).abs();
        }
    }

    let dim_a = n.pow(split as u32);
    let realigned = realign(&rotated, dim_a, dim / dim_a)?;
    let realignment = (trace_norm(&realigned)? - realignment_norm(state)).abs();

    let sigma = DenseMatrix::diagonal(&(0..dim).map(|i| rho[(i, i)]).collect::<Vec<_>>());
    let dense_re = relative_entropy_dense(&rotated, &rotate(&sigma)?, base)?;
    let relative = (dense_re - relative_entropy(state, base)?).abs();

    let mut coeff_values = state.coeffs().eigenvalues()?;
    coeff_values.resize(dim, 0.0);
    let spectrum = sorted_diff(hermitian_eigenvalues(&rotated, EIGEN_TOL)?, coeff_values);

    let w = build_witness(state)?;
    let closed_w = witness_expectation(&w, state)?;
    let dense_w = witness_expectation(&w, &rho)?;
    let witness = (closed_w - dense_w).abs().max((closed_w + negativity(state)).abs());

    let b = bloch_decomposition(state, split, guard)?;
    let mut bloch = bloch_reconstruction_error(&b, &rho).max(b.max_imag_residue);
    if coherence_block_vanishes(&b, COHERENCE_BLOCK_TOL) != is_fully_separable(state, WITNESS_PAIR_TOL) {
        bloch = bloch.max(1.0);
    }

    let slocc = if state.coeffs().rank()? == 1 {
        let psi = spectral_ensemble(state)?.components.swap_remove(0).1;
        if classify_pure(&psi, SUPPORT_TOL).t >= 2 {
            Some(verify_slocc(&psi, guard)?)
        } else {
            None
        }
    } else {
        None
    };

    Ok(Residuals {
        pt_spectrum: pt,
        realignment,
        negativity: neg,
        relative_entropy: relative,
        spectrum,
        witness,
        bloch,
        slocc,
    })
}

/// `V^{⊗k}` with `V = F diag(e^{i m² / 3})`, `F` the unitary DFT of size `n`.
pub fn product_unitary(n: usize, k: usize) -> DenseMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    let v = DenseMatrix::from_fn(n, n, |r, c| {
        let angle = 2.0 * std::f64::consts::PI * (r * c) as f64 / n as f64 + (c * c) as f64 / 3.0;
        Complex64::from_polar(scale, angle)
    });
    (1..k).fold(v.clone(), |acc, _| acc.kron(&v))
}

/// `‖ρ - (I + Σ r_i λ_i⊗I + Σ s_j I⊗λ_j + Σ t_ij λ_i⊗λ_j)/(MD)‖_max`.
fn bloch_reconstruction_error(b: &BlochDecomposition, rho: &DenseMatrix) -> f64 {
    let (ma, mb) = (b.dim_a, b.dim_b);
    let ga = sparse_su_generators(ma);
    let gb = sparse_su_generators(mb);
    let mut acc = DenseMatrix::identity(ma * mb);
    for (i, g) in ga.iter().enumerate() {
        for &(a, a2, x) in &g.entries {
            for bb in 0..mb {
                acc[(a * mb + bb, a2 * mb + bb)] += x * b.r[i];
            }
        }
    }
    for (j, g) in gb.iter().enumerate() {
        for &(bb, bb2, y) in &g.entries {
            for a in 0..ma {
                acc[(a * mb + bb, a * mb + bb2)] += y * b.s[j];
            }
        }
    }
    for (i, g1) in ga.iter().enumerate() {
        for (j, g2) in gb.iter().enumerate() {
            let t = b.t(i, j);
            if t == 0.0 {
                continue;
            }
            for &(a, a2, x) in &g1.entries {
                for &(bb, bb2, y) in &g2.entries {
                    acc[(a * mb + bb, a2 * mb + bb2)] += x * y * t;
                }
            }
        }
    }
    let acc = acc.scale(Complex64::new(1.0 / (ma * mb) as f64, 0.0));
    acc.max_abs_diff(rho).unwrap_or(f64::INFINITY)
}

/// Applies `F^{⊗k}` to the dense state vector and compares with the closed
/// form and with `GHZ(k, t)` up to a global phase.
pub fn verify_slocc(psi: &PureSCState, guard: usize) -> Result<f64> {
    let (k, n) = (psi.parties(), psi.local_dim());
    let f = build_filter(psi)?;
    let closed = apply_filter(&f, psi)?;
    let dense_in = dense_vector_from_pure(psi, guard)?;
    let mut dense_out: Vec<Complex64> = dense_in
        .iter()
        .enumerate()
        .map(|(i, &z)| local_product(&f, i, n, k) * z)
        .collect();
    let norm = dense_out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    dense_out.iter_mut().for_each(|z| *z /= norm);
    let closed_dense = dense_vector_from_pure(&closed, guard)?;
    let mut worst = dense_out
        .iter()
        .zip(&closed_dense)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    let t = classify_pure(psi, SUPPORT_TOL).t;
    let target = 1.0 / (t as f64).sqrt();
    let amps = closed.amplitudes();
    let reference = amps
        .iter()
        .copied()
        .find(|z| z.norm() > SUPPORT_TOL)
        .unwrap_or_default();
    let phase = reference / reference.norm();
    for (m, &c) in psi.amplitudes().iter().enumerate() {
        let expect = if c.norm() > SUPPORT_TOL {
            phase * target
        } else {
            Complex64::default()
        };
        worst = worst.max((amps[m] - expect).norm());
        worst = worst.max((dense_out[repeated_index(m, n, k)] - expect).norm());
    }
    Ok(worst)
}

fn local_product(f: &FilterOperator, mut index: usize, n: usize, k: usize) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for _ in 0..k {
        out *= f.diagonal[index % n];
        index /= n;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub residuals: Residuals,
    pub max_residual: f64,
    pub pass: bool,
}

/// Sample `i` draws from stream `i` of `ChaCha8Rng::seed_from_u64(seed)`:
/// first a mixed state, then a pure state with random support of size at
/// least 2 for the SLOCC check.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Verifies `samples` random states concurrently; results do not depend on
/// scheduling.
pub fn verify_random(k: usize, n: usize, samples: usize, seed: u64, tol: f64, guard: usize) -> Result<VerifySummary> {
    guarded_dim(n, k, guard)?;
    let residuals = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Residuals> {
            let mut rng = sample_rng(seed, i);
            let state = random_sc_state_with(k, n, &mut rng)?;
            let split = if k > 2 { 1 + i % (k - 1) } else { 1 };
            let mut r = verify_state(&state, split, LogBase::Two, guard)?;
            let t = rng.gen_range(2..=n);
            let psi = random_pure_sc_state_with(k, n, t, &mut rng)?;
            r.slocc = Some(verify_slocc(&psi, guard)?);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(Residuals::default(), Residuals::combine);
    let max_residual = residuals.max();
    Ok(VerifySummary {
        k,
        n,
        samples,
        seed,
        tol,
        residuals,
        max_residual,
        pass: max_residual <= tol,
    })
}
