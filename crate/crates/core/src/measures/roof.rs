//! Numerical upper bound on the concurrence convex roof.
//!
//! Every decomposition `a = Σ_i x_i x_i†` with `K >= r = rank(a)` terms is
//! `x_i = Σ_j U_ij √λ_j v_j` for a `K × r` isometry `U` and the spectral pairs
//! `(λ_j, v_j)`. `U` is taken as the first `r` columns of a product of complex
//! Givens rotations, so every parameter vector is a valid decomposition and
//! the smallest average found is a true upper bound on the roof.
//!
//! The weighted pure-state concurrence `p_i C(x_i/√p_i)` is homogeneous of
//! degree two in `x_i`: it equals `2 √(Σ_{m<n} |x_im|² |x_in|²)` for the
//! bipartite measure and `√(k/2)` times that for the k-partite one.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::oracle::{hermitian_eigen, DenseMatrix};
use crate::state::{SCState, EIGEN_DROP};

/// Which pure-state concurrence is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum RoofObjective {
    /// `√(2(1 - Σ|c_m|⁴))`.
    #[default]
    Bipartite,
    /// `√(k(1 - Σ|c_m|⁴))`.
    Multipartite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub objective: RoofObjective,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iter: 2000,
            seed: 0,
            objective: RoofObjective::Bipartite,
        }
    }
}

/// Sweeps without at least this much improvement before a run is considered converged.
const STALL_WINDOW: usize = 50;
const STALL_TOL: f64 = 1e-10;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoofResult {
    /// Smallest average concurrence found; an upper bound on the roof.
    pub value: f64,
    /// Whether the winning run met the stall criterion before `max_iter`.
    pub converged: bool,
    /// Ensemble size `K` of the winning decomposition.
    pub ensemble_size: usize,
    /// `(sweep, value)` samples of the winning run.
    pub trace: Vec<(usize, f64)>,
    /// Entrywise deviation of the winning decomposition from the coefficient matrix.
    pub reconstruction_error: f64,
}

struct Problem {
    /// `√λ_j v_j` as rows, `r × N`.
    weighted: Vec<Vec<Complex64>>,
    objective_scale: f64,
}

impl Problem {
    fn rank(&self) -> usize {
        self.weighted.len()
    }

    fn pair_count(size: usize) -> usize {
        size * (size - 1) / 2
    }

    /// Rows of the `K × r` isometry for the given angles.
    fn isometry(&self, size: usize, params: &[f64]) -> Vec<Vec<Complex64>> {
        let r = self.rank();
        let mut u: Vec<Vec<Complex64>> = (0..size)
            .map(|i| {
                (0..r)
                    .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        let mut idx = 0;
        for p in 0..size {
            for q in p + 1..size {
                let (theta, phi) = (params[idx], params[idx + 1]);
                idx += 2;
                let (s, c) = theta.sin_cos();
                let e = Complex64::from_polar(1.0, phi);
                let (head, tail) = u.split_at_mut(q);
                for (xp, xq) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (up, uq) = (*xp, *xq);
                    *xp = up * c - e * s * uq;
                    *xq = e.conj() * s * up + uq * c;
                }
            }
        }
        u
    }

    fn decomposition(&self, size: usize, params: &[f64]) -> Vec<Vec<Complex64>> {
        let n = self.weighted[0].len();
        self.isometry(size, params)
            .iter()
            .map(|row| {
                let mut x = vec![Complex64::new(0.0, 0.0); n];
                for (coef, w) in row.iter().zip(&self.weighted) {
                    for (xm, wm) in x.iter_mut().zip(w) {
                        *xm += coef * wm;
                    }
                }
                x
            })
            .collect()
    }

    fn evaluate(&self, size: usize, params: &[f64]) -> f64 {
        self.decomposition(size, params)
            .iter()
            .map(|x| self.objective_scale * weighted_pair_sum(x).sqrt())
            .sum()
    }
}

/// `Σ_{m<n} |x_m|² |x_n|²`.
fn weighted_pair_sum(x: &[Complex64]) -> f64 {
    let mut tail = 0.0;
    let mut acc = 0.0;
    for z in x.iter().rev() {
        let w = z.norm_sqr();
        acc += w * tail;
        tail += w;
    }
    acc
}

struct RunOutcome {
    value: f64,
    converged: bool,
    size: usize,
    params: Vec<f64>,
    trace: Vec<(usize, f64)>,
}

fn run(problem: &Problem, size: usize, mut params: Vec<f64>, max_iter: usize) -> RunOutcome {
    let mut best = problem.evaluate(size, &params);
    let mut steps = vec![0.5; params.len()];
    let mut history = vec![best];
    let mut trace = vec![(0, best)];
    let mut converged = params.is_empty();
    let mut sweep = 0;
    while !converged && sweep < max_iter {
        sweep += 1;
        for i in 0..params.len() {
            let orig = params[i];
            let mut improved = false;
            for dir in [1.0, -1.0] {
                params[i] = orig + dir * steps[i];
                let v = problem.evaluate(size, &params);
                if v < best {
                    best = v;
                    improved = true;
                    break;
                }
            }
            if improved {
                steps[i] = (steps[i] * 1.5).min(std::f64::consts::PI);
            } else {
                params[i] = orig;
                steps[i] *= 0.5;
            }
        }
        history.push(best);
        if sweep % 10 == 0 {
            trace.push((sweep, best));
        }
        if sweep >= STALL_WINDOW && history[sweep - STALL_WINDOW] - best < STALL_TOL {
            converged = true;
        }
        if steps.iter().all(|&s| s < MIN_STEP) {
            converged = true;
        }
    }
    if trace.last().map(|t| t.0) != Some(sweep) {
        trace.push((sweep, best));
    }
    RunOutcome {
        value: best,
        converged,
        size,
        params,
        trace,
    }
}

/// Minimizes the average pure-state concurrence over decompositions of the
/// coefficient matrix. Restarts run in parallel and the minimum is taken,
/// with ties broken by restart index, so the result depends only on `seed`.
pub fn roof_optimizer(state: &SCState, options: RoofOptions) -> Result<RoofResult> {
    let eig = hermitian_eigen(state.coeffs().as_dense(), 0.0)?;
    let weighted: Vec<Vec<Complex64>> = (0..eig.values.len())
        .rev()
        .filter(|&j| eig.values[j] > EIGEN_DROP)
        .map(|j| {
            let s = eig.values[j].sqrt();
            eig.vector(j).into_iter().map(|z| z * s).collect()
        })
        .collect();
    let objective_scale = match options.objective {
        RoofObjective::Bipartite => 2.0,
        RoofObjective::Multipartite => (2.0 * state.parties() as f64).sqrt(),
    };
    let problem = Problem {
        weighted,
        objective_scale,
    };
    let r = problem.rank();

    let outcome = if r == 1 {
        run(&problem, 1, Vec::new(), 0)
    } else {
        let restarts = options.restarts.max(1);
        (0..restarts)
            .into_par_iter()
            .map(|restart| {
                let size = r + restart % (r + 1);
                let n_params = 2 * Problem::pair_count(size);
                let params = if restart == 0 {
                    vec![0.0; n_params]
                } else {
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(options.seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                    (0..n_params)
                        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                        .collect()
                };
                (restart, run(&problem, size, params, options.max_iter))
            })
            .min_by(|(ia, a), (ib, b)| a.value.total_cmp(&b.value).then(ia.cmp(ib)))
            .map(|(_, o)| o)
            .expect("at least one restart")
    };

    let decomposition = problem.decomposition(outcome.size, &outcome.params);
    let n = state.local_dim();
    let mut rebuilt = DenseMatrix::zeros(n, n);
    for x in &decomposition {
        rebuilt = rebuilt.add(&DenseMatrix::outer(x, x))?;
    }
    let reconstruction_error = rebuilt.max_abs_diff(state.coeffs().as_dense())?;

    Ok(RoofResult {
        value: outcome.value,
        converged: outcome.converged,
        ensemble_size: outcome.size,
        trace: outcome.trace,
        reconstruction_error,
    })
}
