//! Schmidt-correlated states `ρ = Σ a_mn |m⋯m⟩⟨n⋯n|` and their pure
//! components.
//!
//! A state is fully described by its party count `k`, local dimension `N`
//! and the `N × N` coefficient matrix `a`. Construction validates that `a` is
//! Hermitian, unit-trace and positive semidefinite; inputs that are Hermitian
//! only up to tolerance are replaced by their Hermitian part.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::oracle::{hermitian_eigen, DenseMatrix};

/// Scalar field of all coefficients and amplitudes.
pub type ComplexScalar = Complex64;

/// Eigenvalues of the coefficient matrix at or below this are dropped from
/// ensembles and rank counts.
pub const EIGEN_DROP: f64 = 1e-12;

/// Validation tolerances. All default to `1e-10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            trace: 1e-10,
            psd: 1e-10,
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace `N × N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    inner: DenseMatrix,
}

impl CoeffMatrix {
    pub fn new(matrix: DenseMatrix, tol: Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDims(format!(
                "coefficient matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if let Some(pos) = matrix
            .as_slice()
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: pos / matrix.cols(),
                col: pos % matrix.cols(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol.herm {
            return Err(Error::NotHermitian { worst: defect });
        }
        let mut inner = matrix.hermitian_part();
        for i in 0..inner.rows() {
            inner[(i, i)].im = 0.0;
        }
        let trace_err = (inner.trace().re - 1.0).abs();
        if trace_err > tol.trace {
            return Err(Error::NotUnitTrace { worst: trace_err });
        }
        let min_eig = hermitian_eigen(&inner, 0.0)?.values[0];
        if min_eig < -tol.psd {
            return Err(Error::NotPsd { worst: min_eig });
        }
        Ok(Self { inner })
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    /// `a_mn`.
    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.inner[(m, n)]
    }

    /// `(a_00, …, a_{N-1,N-1})` as reals.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|m| self.inner[(m, m)].re).collect()
    }

    /// `|a_mn|` for `m < n`, lexicographic in `(m, n)`.
    pub fn pair_magnitudes(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .flat_map(|m| (m + 1..n).map(move |j| (m, j)))
            .map(|(m, j)| self.inner[(m, j)].norm())
            .collect()
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.inner
    }

    /// Eigenvalues ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigen(&self.inner, 0.0)?.values)
    }

    /// Number of eigenvalues above [`EIGEN_DROP`].
    pub fn rank(&self) -> Result<usize> {
        Ok(self.eigenvalues()?.iter().filter(|&&v| v > EIGEN_DROP).count())
    }
}

/// A `k`-partite Schmidt-correlated state on `(C^N)^{⊗k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SCState {
    parties: usize,
    coeffs: CoeffMatrix,
}

impl SCState {
    pub fn new(parties: usize, local_dim: usize, a: DenseMatrix, tol: Tolerances) -> Result<Self> {
        check_dims(parties, local_dim)?;
        if a.rows() != local_dim || a.cols() != local_dim {
            return Err(Error::InvalidDims(format!(
                "expected a {local_dim}x{local_dim} coefficient matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        Ok(Self {
            parties,
            coeffs: CoeffMatrix::new(a, tol)?,
        })
    }

    /// Convenience constructor from nested rows with default tolerances.
    pub fn from_rows(parties: usize, rows: &[Vec<Complex64>]) -> Result<Self> {
        let a = DenseMatrix::from_rows(rows)?;
        Self::new(parties, rows.len(), a, Tolerances::default())
    }

    /// Real-valued rows, for the many examples whose coefficients are real.
    pub fn from_real_rows(parties: usize, rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(parties, &rows)
    }

    /// Diagonal (fully separable) state `Σ p_m |m⋯m⟩⟨m⋯m|`.
    pub fn diagonal(parties: usize, probs: &[f64]) -> Result<Self> {
        let d: Vec<Complex64> = probs.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        Self::new(parties, probs.len(), DenseMatrix::diagonal(&d), Tolerances::default())
    }

    /// Number of parties `k`.
    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Local dimension `N`.
    pub fn local_dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn coeffs(&self) -> &CoeffMatrix {
        &self.coeffs
    }

    /// `N^k`, or [`Error::Overflow`] if it does not fit in a `u64`.
    pub fn total_dim(&self) -> Result<u64> {
        (self.local_dim() as u64)
            .checked_pow(self.parties as u32)
            .ok_or(Error::Overflow)
    }

    /// `p·self + (1 - p)·other`.
    pub fn mix(&self, other: &SCState, p: f64) -> Result<SCState> {
        if self.parties != other.parties || self.local_dim() != other.local_dim() {
            return Err(Error::DimMismatch {
                expected: self.local_dim(),
                found: other.local_dim(),
            });
        }
        let a = self
            .coeffs
            .as_dense()
            .scale(Complex64::new(p, 0.0))
            .add(&other.coeffs.as_dense().scale(Complex64::new(1.0 - p, 0.0)))?;
        SCState::new(self.parties, self.local_dim(), a, Tolerances::default())
    }

    /// Re-runs validation; always succeeds for a constructed state.
    pub fn revalidate(&self, tol: Tolerances) -> Result<SCState> {
        SCState::new(self.parties, self.local_dim(), self.coeffs.as_dense().clone(), tol)
    }
}

/// `Σ_m c_m |m⋯m⟩` with unit-norm amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureSCState {
    parties: usize,
    amps: Vec<Complex64>,
}

impl PureSCState {
    pub fn new(parties: usize, amps: Vec<Complex64>, tol: Tolerances) -> Result<Self> {
        check_dims(parties, amps.len())?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            let pos = amps
                .iter()
                .position(|z| !z.re.is_finite() || !z.im.is_finite())
                .unwrap_or(0);
            return Err(Error::NonFinite { row: pos, col: 0 });
        }
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol.trace {
            return Err(Error::NotNormalized {
                worst: (norm_sq - 1.0).abs(),
            });
        }
        Ok(Self { parties, amps })
    }

    /// Normalizes `amps` before validating. Fails on the zero vector.
    pub fn normalized(parties: usize, amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { worst: 1.0 });
        }
        let amps = amps.into_iter().map(|z| z / norm).collect();
        Self::new(parties, amps, Tolerances::default())
    }

    pub fn from_real(parties: usize, amps: &[f64]) -> Result<Self> {
        Self::new(
            parties,
            amps.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Tolerances::default(),
        )
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn local_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `Σ_m |c_m|^4`, the purity of every single-party reduction.
    pub fn reduced_purity(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr().powi(2)).sum()
    }
}

/// `GHZ(k, N) = N^{-1/2} Σ_m |m⋯m⟩`.
pub fn ghz(parties: usize, local_dim: usize) -> Result<PureSCState> {
    check_dims(parties, local_dim)?;
    let c = Complex64::new(1.0 / (local_dim as f64).sqrt(), 0.0);
    PureSCState::new(parties, vec![c; local_dim], Tolerances::default())
}

/// Rank-one state `a_mn = c_m conj(c_n)`.
pub fn pure_to_mixed(psi: &PureSCState) -> SCState {
    let a = DenseMatrix::outer(psi.amplitudes(), psi.amplitudes());
    SCState::new(psi.parties(), psi.local_dim(), a, Tolerances::default())
        .expect("outer product of a unit vector is a valid coefficient matrix")
}

/// Convex decomposition `ρ = Σ_i p_i |Φ_i⟩⟨Φ_i|` into pure SC states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub components: Vec<(f64, PureSCState)>,
}

impl Ensemble {
    /// `Σ_i p_i c^(i) c^(i)†`.
    pub fn reconstruct(&self) -> Option<DenseMatrix> {
        let n = self.components.first()?.1.local_dim();
        let mut acc = DenseMatrix::zeros(n, n);
        for (p, psi) in &self.components {
            let term = DenseMatrix::outer(psi.amplitudes(), psi.amplitudes()).scale(Complex64::new(*p, 0.0));
            acc = acc.add(&term).ok()?;
        }
        Some(acc)
    }

    /// Largest entrywise deviation of the reconstruction from `a`.
    pub fn reconstruction_error(&self, a: &CoeffMatrix) -> f64 {
        self.reconstruct()
            .and_then(|r| r.max_abs_diff(a.as_dense()).ok())
            .unwrap_or(f64::INFINITY)
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|(p, _)| p).sum()
    }
}

/// Eigendecomposition of the coefficient matrix, dropping components with
/// weight at or below [`EIGEN_DROP`]. Components are ordered by decreasing weight.
pub fn spectral_ensemble(state: &SCState) -> Result<Ensemble> {
    let eig = hermitian_eigen(state.coeffs().as_dense(), 0.0)?;
    let mut components = Vec::new();
    for i in (0..eig.values.len()).rev() {
        let w = eig.values[i];
        if w > EIGEN_DROP {
            let psi = PureSCState::normalized(state.parties(), eig.vector(i))?;
            components.push((w, psi));
        }
    }
    Ok(Ensemble { components })
}

/// Two equal-weight components with amplitude moduli `(√a_00, √a_11)` and
/// relative phases `-arg(a_01) ± φ`, `cos φ = |a_01| / √(a_00 a_11)`.
///
/// Pure states and states with an empty diagonal entry come back as a single
/// component. Only `N = 2` is supported.
pub fn equal_modulus_ensemble(state: &SCState) -> Result<Ensemble> {
    let n = state.local_dim();
    if n != 2 {
        return Err(Error::UnsupportedDim { n });
    }
    let k = state.parties();
    let a = state.coeffs();
    let (a00, a11) = (a.entry(0, 0).re.max(0.0), a.entry(1, 1).re.max(0.0));
    let a01 = a.entry(0, 1);

    if a00 <= EIGEN_DROP || a11 <= EIGEN_DROP {
        let amps = if a00 >= a11 {
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        };
        return Ok(Ensemble {
            components: vec![(1.0, PureSCState::new(k, amps, Tolerances::default())?)],
        });
    }

    let cos_phi = (a01.norm() / (a00 * a11).sqrt()).clamp(-1.0, 1.0);
    let alpha = a01.arg();
    let make = |phase: f64| {
        PureSCState::normalized(
            k,
            vec![
                Complex64::new(a00.sqrt(), 0.0),
                Complex64::from_polar(a11.sqrt(), phase),
            ],
        )
    };
    if 1.0 - cos_phi <= 1e-15 {
        return Ok(Ensemble {
            components: vec![(1.0, make(-alpha)?)],
        });
    }
    let phi = cos_phi.acos();
    Ok(Ensemble {
        components: vec![(0.5, make(-alpha + phi)?), (0.5, make(-alpha - phi)?)],
    })
}

/// Draws `G` with i.i.d. standard complex Gaussian entries and returns the
/// state with coefficient matrix `G G† / Tr(G G†)`.
///
/// The generator is ChaCha8 seeded through `seed_from_u64(seed)`; entries are
/// drawn row-major, real part before imaginary part, each from a standard
/// normal distribution.
pub fn random_sc_state(parties: usize, local_dim: usize, seed: u64) -> Result<SCState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_sc_state_with(parties, local_dim, &mut rng)
}

/// [`random_sc_state`] drawing from a caller-supplied generator.
pub fn random_sc_state_with<R: Rng + ?Sized>(parties: usize, local_dim: usize, rng: &mut R) -> Result<SCState> {
    check_dims(parties, local_dim)?;
    let g = DenseMatrix::from_fn(local_dim, local_dim, |_, _| gaussian(rng));
    let gg = g.matmul(&g.adjoint())?;
    let tr = gg.trace().re;
    let mut a = gg.scale(Complex64::new(1.0 / tr, 0.0)).hermitian_part();
    for i in 0..local_dim {
        a[(i, i)].im = 0.0;
    }
    SCState::new(parties, local_dim, a, Tolerances::default())
}

/// Random pure SC state supported on exactly `support` levels, chosen
/// uniformly, with Gaussian amplitudes on the support.
pub fn random_pure_sc_state_with<R: Rng + ?Sized>(
    parties: usize,
    local_dim: usize,
    support: usize,
    rng: &mut R,
) -> Result<PureSCState> {
    check_dims(parties, local_dim)?;
    if support == 0 || support > local_dim {
        return Err(Error::InvalidDims(format!("support {support} outside 1..={local_dim}")));
    }
    let mut levels: Vec<usize> = (0..local_dim).collect();
    for i in 0..support {
        let j = rng.gen_range(i..local_dim);
        levels.swap(i, j);
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); local_dim];
    for &m in &levels[..support] {
        let mut z = gaussian(rng);
        while z.norm() < 1e-3 {
            z = gaussian(rng);
        }
        amps[m] = z;
    }
    PureSCState::normalized(parties, amps)
}

pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn check_dims(parties: usize, local_dim: usize) -> Result<()> {
    if parties < 2 {
        return Err(Error::InvalidDims(format!("need k >= 2 parties, got {parties}")));
    }
    if local_dim < 2 {
        return Err(Error::InvalidDims(format!(
            "need local dimension N >= 2, got {local_dim}"
        )));
    }
    Ok(())
}
