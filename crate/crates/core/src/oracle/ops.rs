use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense::DenseMatrix;
use super::eigen::{hermitian_eigen, hermitian_eigenvalues};
use crate::error::{Error, Result};

/// Eigenvalues below this are treated as exact zeros inside logarithms.
pub const LOG_CLAMP: f64 = 1e-15;

/// Nonempty set of 1-based party labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartySubset {
    indices: Vec<usize>,
}

impl PartySubset {
    /// Validates `1 <= index <= k` for every entry; duplicates are merged.
    pub fn new(indices: impl IntoIterator<Item = usize>, k: usize) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        if let Some(bad) = indices.iter().find(|&&i| i == 0 || i > k) {
            return Err(Error::InvalidSubset(format!("party {bad} outside 1..={k}")));
        }
        Ok(Self { indices })
    }

    pub fn single(party: usize, k: usize) -> Result<Self> {
        Self::new([party], k)
    }

    /// Parties `1..=l`.
    pub fn leading(l: usize, k: usize) -> Result<Self> {
        Self::new(1..=l, k)
    }

    /// Every nonempty proper subset of `{1..k}`.
    pub fn all_proper(k: usize) -> Vec<Self> {
        (1u64..(1u64 << k) - 1)
            .map(|mask| Self {
                indices: (0..k).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect(),
            })
            .collect()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, party: usize) -> bool {
        self.indices.binary_search(&party).is_ok()
    }

    fn is_proper(&self, k: usize) -> bool {
        self.indices.len() < k
    }
}

/// Logarithm base used for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
    #[serde(rename = "10")]
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
            LogBase::Ten => x.log10(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
            LogBase::Ten => "10",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" | "ln" | "natural" => Ok(LogBase::E),
            "10" => Ok(LogBase::Ten),
            other => Err(Error::Parse(format!(
                "unknown log base '{other}' (expected 2, e or 10)"
            ))),
        }
    }
}

/// `x log x` with the `0 log 0 = 0` convention and dust clamping.
pub fn xlogx(x: f64, base: LogBase) -> f64 {
    if x <= LOG_CLAMP {
        0.0
    } else {
        x * base.log(x)
    }
}

fn check_dims(m: &DenseMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimMismatch {
            expected: total,
            found: m.rows(),
        });
    }
    Ok(())
}

/// Row-major strides with party 1 most significant.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for p in (0..dims.len().saturating_sub(1)).rev() {
        s[p] = s[p + 1] * dims[p + 1];
    }
    s
}

/// Part of each flat index carried by the parties in `subset`.
fn selected_component(dims: &[usize], subset: &PartySubset) -> Vec<usize> {
    let st = strides(dims);
    let total: usize = dims.iter().product();
    (0..total)
        .map(|x| {
            subset
                .indices()
                .iter()
                .map(|&p| (x / st[p - 1]) % dims[p - 1] * st[p - 1])
                .sum()
        })
        .collect()
}

/// Transposes the local indices of the parties in `subset`.
pub fn partial_transpose(m: &DenseMatrix, subset: &PartySubset, dims: &[usize]) -> Result<DenseMatrix> {
    check_dims(m, dims)?;
    if !subset.is_proper(dims.len()) || subset.indices().iter().any(|&p| p > dims.len()) {
        return Err(Error::InvalidSubset(format!(
            "{:?} is not a proper subset of 1..={}",
            subset.indices(),
            dims.len()
        )));
    }
    let sel = selected_component(dims, subset);
    let n = m.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let r2 = r - sel[r] + sel[c];
            let c2 = c - sel[c] + sel[r];
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Partial trace over every party not in `keep`.
pub fn reduced_density(m: &DenseMatrix, keep: &PartySubset, dims: &[usize]) -> Result<DenseMatrix> {
    check_dims(m, dims)?;
    if keep.indices().iter().any(|&p| p > dims.len()) {
        return Err(Error::InvalidSubset(format!(
            "{:?} outside 1..={}",
            keep.indices(),
            dims.len()
        )));
    }
    let st = strides(dims);
    let kept_dims: Vec<usize> = keep.indices().iter().map(|&p| dims[p - 1]).collect();
    let kept_st = strides(&kept_dims);
    let sel = selected_component(dims, keep);
    let n = m.rows();
    let kept_index: Vec<usize> = (0..n)
        .map(|x| {
            keep.indices()
                .iter()
                .zip(&kept_st)
                .map(|(&p, &ks)| (x / st[p - 1]) % dims[p - 1] * ks)
                .sum()
        })
        .collect();
    let d: usize = kept_dims.iter().product();
    let mut out = DenseMatrix::zeros(d, d);
    for r in 0..n {
        for c in 0..n {
            if r - sel[r] == c - sel[c] {
                out[(kept_index[r], kept_index[c])] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Realignment `R(ρ)_{(i j),(k l)} = ρ_{(i k),(j l)}` for a `dim_a ⊗ dim_b` split.
pub fn realign(m: &DenseMatrix, dim_a: usize, dim_b: usize) -> Result<DenseMatrix> {
    check_dims(m, &[dim_a, dim_b])?;
    let mut out = DenseMatrix::zeros(dim_a * dim_a, dim_b * dim_b);
    for i in 0..dim_a {
        for j in 0..dim_a {
            for k in 0..dim_b {
                for l in 0..dim_b {
                    out[(i * dim_a + j, k * dim_b + l)] = m[(i * dim_b + k, j * dim_b + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Sum of singular values, taken as square roots of the Gram-matrix
/// eigenvalues (the smaller of `M†M` and `MM†`). Negative dust is clamped.
pub fn trace_norm(m: &DenseMatrix) -> Result<f64> {
    let gram = if m.cols() <= m.rows() {
        m.adjoint().matmul(m)?
    } else {
        m.matmul(&m.adjoint())?
    };
    let tol = 1e-8 * (1.0 + gram.max_abs());
    let values = hermitian_eigenvalues(&gram, tol)?;
    Ok(values.iter().map(|&v| v.max(0.0).sqrt()).sum())
}

/// `Σ |λ_i|` for a Hermitian matrix; an independent route to the trace norm.
pub fn hermitian_trace_norm(m: &DenseMatrix, tol: f64) -> Result<f64> {
    Ok(hermitian_eigenvalues(m, tol)?.iter().map(|v| v.abs()).sum())
}

/// `-Tr ρ log ρ`.
pub fn von_neumann_entropy(m: &DenseMatrix, base: LogBase) -> Result<f64> {
    let values = hermitian_eigenvalues(m, 1e-10)?;
    if let Some(&min) = values.first() {
        if min < -1e-10 {
            return Err(Error::NotPsd { worst: min });
        }
    }
    Ok(-values.iter().map(|&v| xlogx(v, base)).sum::<f64>())
}

/// `Tr[ρ log ρ - ρ log σ]`, evaluated in the eigenbases of both operands.
///
/// Returns `f64::INFINITY` when `ρ` has weight outside the support of `σ`.
pub fn relative_entropy_dense(rho: &DenseMatrix, sigma: &DenseMatrix, base: LogBase) -> Result<f64> {
    if rho.rows() != sigma.rows() || !rho.is_square() || !sigma.is_square() {
        return Err(Error::DimMismatch {
            expected: rho.rows(),
            found: sigma.rows(),
        });
    }
    let rho_values = hermitian_eigenvalues(rho, 1e-10)?;
    let sigma_eig = hermitian_eigen(sigma, 1e-10)?;
    let neg_entropy: f64 = rho_values.iter().map(|&v| xlogx(v, base)).sum();
    let mut cross = 0.0;
    for (j, &mu) in sigma_eig.values.iter().enumerate() {
        let v = sigma_eig.vector(j);
        let rv = rho.apply(&v)?;
        let weight: f64 = v.iter().zip(&rv).map(|(a, b)| (a.conj() * b).re).sum();
        if mu > LOG_CLAMP {
            cross += weight * base.log(mu);
        } else if weight > 1e-10 {
            return Ok(f64::INFINITY);
        }
    }
    Ok(neg_entropy - cross)
}

/// A traceless Hermitian generator in sparse form.
#[derive(Debug, Clone)]
pub(crate) struct SparseGenerator {
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseGenerator {
    fn to_dense(&self, d: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(d, d);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}

/// Generators of SU(d) in the order: `d-1` diagonal ones, then the symmetric
/// `|j><k| + |k><j|`, then the antisymmetric `-i(|j><k| - |k><j|)`, both
/// pair blocks enumerating `(j, k)`, `j < k`, lexicographically.
pub(crate) fn sparse_su_generators(d: usize) -> Vec<SparseGenerator> {
    let mut out = Vec::with_capacity(d * d - 1);
    for i in 0..d - 1 {
        let norm = (2.0 / ((i + 1) * (i + 2)) as f64).sqrt();
        let mut entries: Vec<_> = (0..=i).map(|a| (a, a, Complex64::new(norm, 0.0))).collect();
        entries.push((i + 1, i + 1, Complex64::new(-norm * (i + 1) as f64, 0.0)));
        out.push(SparseGenerator { entries });
    }
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        out.push(SparseGenerator {
            entries: vec![(j, k, Complex64::new(1.0, 0.0)), (k, j, Complex64::new(1.0, 0.0))],
        });
    }
    for &(j, k) in &pairs {
        out.push(SparseGenerator {
            entries: vec![(j, k, Complex64::new(0.0, -1.0)), (k, j, Complex64::new(0.0, 1.0))],
        });
    }
    out
}

/// Dense SU(d) generators: `d-1` diagonal ones, then the symmetric and the
/// antisymmetric off-diagonal pairs, each block in lexicographic `(j, k)` order.
pub fn su_generators(d: usize) -> Result<Vec<DenseMatrix>> {
    if d < 2 {
        return Err(Error::InvalidDims(format!("SU(d) needs d >= 2, got {d}")));
    }
    Ok(sparse_su_generators(d).iter().map(|g| g.to_dense(d)).collect())
}
