//! Cyclic Jacobi diagonalization of complex Hermitian matrices.
//!
//! Each rotation conjugates the `(p, q)` plane by `J = D R D†`, where `D`
//! removes the phase of `a_pq` and `R` is the classical real Jacobi rotation.
//! Sweeps continue until the off-diagonal Frobenius norm drops below
//! `1e-12 * ||A||_F` (followed by one polishing sweep) or `MAX_SWEEPS` is
//! exhausted.

use num_complex::Complex64;

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
pub const RELATIVE_OFF_TOL: f64 = 1e-12;

/// Eigenvalues in ascending order together with the matching orthonormal
/// eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.column(i)
    }

    /// `V diag(values) V†`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.values.len();
        DenseMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| self.vectors[(r, k)] * self.values[k] * self.vectors[(c, k)].conj())
                .sum()
        })
    }
}

/// Diagonalizes a Hermitian matrix. The input must be Hermitian within
/// `tol` (absolute, entrywise); it is symmetrized before rotating.
pub fn hermitian_eigen(m: &DenseMatrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(Error::NotHermitian { worst: defect });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = DenseMatrix::identity(n);
    let scale = a.frobenius_norm();
    let threshold = RELATIVE_OFF_TOL * scale;

    let mut sweeps = 0;
    let mut polished = false;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            // one more sweep takes the residual from the threshold down to rounding level
            if polished || off == 0.0 {
                break;
            }
            polished = true;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &DenseMatrix, tol: f64) -> Result<Vec<f64>> {
    hermitian_eigen(m, tol).map(|e| e.values)
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                sum += a[(r, c)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J_pp = J_qq = c, J_pq = s e^{iφ}, J_qp = -s e^{-iφ}
    let jpq = phase * s;
    let jqp = -phase.conj() * s;
    let n = a.rows();

    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * c + arq * jqp;
        a[(r, q)] = arp * jpq + arq * c;
    }
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = apc * c + aqc * jqp.conj();
        a[(q, col)] = apc * jpq.conj() + aqc * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * c + vrq * jqp;
        v[(r, q)] = vrp * jpq + vrq * c;
    }
}
