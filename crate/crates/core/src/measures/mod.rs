//! Entanglement measures of SC states: negativity, concurrence and the
//! relative entropy of entanglement.

mod roof;

pub use roof::{roof_optimizer, RoofObjective, RoofOptions, RoofResult};

use serde::Serialize;

use crate::error::Result;
use crate::oracle::{xlogx, LogBase};
use crate::separability::{is_fully_separable, realignment_norm, WITNESS_PAIR_TOL};
use crate::state::{PureSCState, SCState};

/// `Σ_{m<n} |a_mn|`, the absolute sum of the negative partial-transpose eigenvalues.
pub fn negativity(state: &SCState) -> f64 {
    state.coeffs().pair_magnitudes().iter().sum()
}

/// `√(2(1 - Σ_m |c_m|⁴))`.
pub fn concurrence_pure_bipartite(psi: &PureSCState) -> f64 {
    (2.0 * (1.0 - psi.reduced_purity())).max(0.0).sqrt()
}

/// `√(k - Σ_i Tr ρ_i²)`; every single-party reduction of a pure SC state is
/// `diag(|c_m|²)`, so this is `√(k(1 - Σ_m |c_m|⁴))`.
pub fn concurrence_pure_multipartite(psi: &PureSCState) -> f64 {
    (psi.parties() as f64 * (1.0 - psi.reduced_purity())).max(0.0).sqrt()
}

/// `√(2(1 - 1/N))`, attained by GHZ(k, N).
pub fn concurrence_upper_limit(local_dim: usize) -> f64 {
    (2.0 * (1.0 - 1.0 / local_dim as f64)).sqrt()
}

/// `2√2 / √(N(N-1)) · negativity`.
pub fn concurrence_lower_bound(state: &SCState) -> f64 {
    let n = state.local_dim() as f64;
    2.0 * 2f64.sqrt() / (n * (n - 1.0)).sqrt() * negativity(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConcurrenceMethod {
    PureClosedForm,
    QubitClosedForm,
    BoundsOnly,
    RoofOptimizer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcurrenceReport {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    pub method: ConcurrenceMethod,
    pub roof_trace: Option<Vec<(usize, f64)>>,
    pub roof_converged: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConcurrenceOptions {
    /// Run the roof optimizer when no closed form applies.
    pub roof: Option<RoofOptions>,
}

/// Bounds on the mixed-state concurrence, with the exact value when the
/// coefficient matrix has rank one or `N = 2`.
///
/// For `N = 2` the lower bound `2|a_01|` is attained: the real matrix
/// `[[a_00, |a_01|], [|a_01|, a_11]]` splits into nonnegative rank-one terms,
/// and giving each term the phase of `a_01` yields pure components that
/// share one relative phase and average exactly `2|a_01|`.
pub fn concurrence(state: &SCState, options: ConcurrenceOptions) -> Result<ConcurrenceReport> {
    let lower = concurrence_lower_bound(state);
    let mut upper = concurrence_upper_limit(state.local_dim());
    let mut exact = None;
    let mut method = ConcurrenceMethod::BoundsOnly;
    let mut roof_trace = None;
    let mut roof_converged = None;

    if is_fully_separable(state, WITNESS_PAIR_TOL) {
        // all coherences vanish, so the diagonal ensemble is a product decomposition
        exact = Some(0.0);
    } else if state.coeffs().rank()? <= 1 {
        let psi = crate::state::spectral_ensemble(state)?
            .components
            .into_iter()
            .next()
            .map(|(_, psi)| psi);
        if let Some(psi) = psi {
            exact = Some(concurrence_pure_bipartite(&psi));
            method = ConcurrenceMethod::PureClosedForm;
        }
    } else if state.local_dim() == 2 {
        exact = Some(2.0 * state.coeffs().entry(0, 1).norm());
        method = ConcurrenceMethod::QubitClosedForm;
    }
    if exact.is_none() {
        if let Some(opts) = options.roof {
            let res = roof_optimizer(
                state,
                RoofOptions {
                    objective: RoofObjective::Bipartite,
                    ..opts
                },
            )?;
            upper = upper.min(res.value);
            roof_trace = Some(res.trace);
            roof_converged = Some(res.converged);
            method = ConcurrenceMethod::RoofOptimizer;
        }
    }
    if let Some(e) = exact {
        upper = upper.min(e);
    }
    Ok(ConcurrenceReport {
        lower: lower.min(upper),
        upper,
        exact,
        method,
        roof_trace,
        roof_converged,
    })
}

/// Upper bound on the convex roof of the k-partite concurrence: the closed
/// form for rank one, otherwise the optimizer value capped by `√(k(1 - 1/N))`.
pub fn multipartite_concurrence_upper(state: &SCState, options: RoofOptions) -> Result<f64> {
    let cap = (state.parties() as f64 * (1.0 - 1.0 / state.local_dim() as f64)).sqrt();
    let res = roof_optimizer(
        state,
        RoofOptions {
            objective: RoofObjective::Multipartite,
            ..options
        },
    )?;
    Ok(res.value.min(cap))
}

/// The closest fully separable state `σ* = Σ_m a_mm |m⋯m⟩⟨m⋯m|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalSeparable {
    pub diag: Vec<f64>,
}

impl OptimalSeparable {
    pub fn to_state(&self, parties: usize) -> Result<SCState> {
        SCState::diagonal(parties, &self.diag)
    }
}

pub fn optimal_separable(state: &SCState) -> OptimalSeparable {
    OptimalSeparable {
        diag: state.coeffs().diagonal().into_iter().map(|x| x.max(0.0)).collect(),
    }
}

/// `S(ρ‖σ*) = Σ_i λ_i log λ_i - Σ_m a_mm log a_mm`, with `λ_i` the
/// eigenvalues of the coefficient matrix.
pub fn relative_entropy(state: &SCState, base: LogBase) -> Result<f64> {
    let spectrum: f64 = state.coeffs().eigenvalues()?.iter().map(|&l| xlogx(l, base)).sum();
    let cross: f64 = optimal_separable(state).diag.iter().map(|&d| xlogx(d, base)).sum();
    Ok((spectrum - cross).max(0.0))
}

/// `(‖R(ρ)‖ - 1)/2`; agrees with [`negativity`] for every SC state.
pub fn negativity_from_realignment(state: &SCState) -> f64 {
    (realignment_norm(state) - 1.0) / 2.0
}

/// `GHZ(k, N)` as a mixed state, with every coefficient exactly `1/N`.
pub fn ghz_state(parties: usize, local_dim: usize) -> Result<SCState> {
    crate::state::ghz(parties, local_dim)?;
    let v = 1.0 / local_dim as f64;
    let rows: Vec<Vec<f64>> = vec![vec![v; local_dim]; local_dim];
    let rows: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    SCState::from_real_rows(parties, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ghz, random_sc_state};

    fn mixture_example() -> SCState {
        SCState::from_real_rows(3, &[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 1.0 / 3.0]]).unwrap()
    }

    fn psi_third() -> PureSCState {
        PureSCState::from_real(3, &[(1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt()]).unwrap()
    }

    #[test]
    fn negativity_examples() {
        assert!((negativity(&ghz_state(2, 4).unwrap()) - 1.5).abs() < 1e-12);
        assert!((negativity(&mixture_example()) - 1.0 / 3.0).abs() < 1e-15);
        assert!((negativity(&ghz_state(3, 2).unwrap()) - 0.5).abs() < 1e-15);
        assert_eq!(negativity(&SCState::diagonal(2, &[0.5, 0.5]).unwrap()), 0.0);
        let s = random_sc_state(3, 3, 4).unwrap();
        assert!((negativity(&s) - negativity_from_realignment(&s)).abs() < 1e-15);
    }

    #[test]
    fn pure_concurrence_examples() {
        assert!((concurrence_pure_bipartite(&psi_third()) - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);
        let g = ghz(4, 3).unwrap();
        assert!((concurrence_pure_bipartite(&g) - (2.0f64 * (2.0 / 3.0)).sqrt()).abs() < 1e-15);
        let product = PureSCState::from_real(2, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(concurrence_pure_bipartite(&product), 0.0);
        assert_eq!(concurrence_pure_multipartite(&product), 0.0);
        assert!((concurrence_pure_multipartite(&ghz(3, 2).unwrap()) - 1.5f64.sqrt()).abs() < 1e-15);
        let psi4 = PureSCState::from_real(4, &[(1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt()]).unwrap();
        assert!((concurrence_pure_multipartite(&psi4) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pure_concurrence_pair_form() {
        for seed in 0..20 {
            let s = random_sc_state(2, 4, seed).unwrap();
            let psi = &crate::state::spectral_ensemble(&s).unwrap().components[0].1;
            let c = psi.amplitudes();
            let mut acc = 0.0;
            for m in 0..4 {
                for n in m + 1..4 {
                    acc += (c[m] * c[n]).norm_sqr();
                }
            }
            assert!((concurrence_pure_bipartite(psi) - 2.0 * acc.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn concurrence_report_cases() {
        let r = concurrence(&mixture_example(), ConcurrenceOptions::default()).unwrap();
        assert_eq!(r.method, ConcurrenceMethod::QubitClosedForm);
        assert!((r.exact.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.exact.unwrap() - 2.0 * negativity(&mixture_example())).abs() < 1e-15);

        let r = concurrence(
            &crate::state::pure_to_mixed(&psi_third()),
            ConcurrenceOptions::default(),
        )
        .unwrap();
        assert_eq!(r.method, ConcurrenceMethod::PureClosedForm);
        assert!((r.exact.unwrap() - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);

        let r = concurrence(
            &SCState::diagonal(3, &[0.2, 0.3, 0.5]).unwrap(),
            ConcurrenceOptions::default(),
        )
        .unwrap();
        assert_eq!((r.lower, r.upper, r.exact), (0.0, 0.0, Some(0.0)));
        assert_eq!(r.method, ConcurrenceMethod::BoundsOnly);

        let r = concurrence(&random_sc_state(2, 3, 1).unwrap(), ConcurrenceOptions::default()).unwrap();
        assert_eq!((r.exact, r.method), (None, ConcurrenceMethod::BoundsOnly));
        assert_eq!(r.upper, concurrence_upper_limit(3));

        let r = concurrence(
            &SCState::diagonal(2, &[0.4, 0.6]).unwrap(),
            ConcurrenceOptions::default(),
        )
        .unwrap();
        assert_eq!((r.lower, r.upper, r.exact), (0.0, 0.0, Some(0.0)));
    }

    #[test]
    fn concurrence_bounds_are_ordered() {
        let opts = ConcurrenceOptions {
            roof: Some(RoofOptions {
                restarts: 4,
                max_iter: 400,
                ..RoofOptions::default()
            }),
        };
        for seed in 0..8 {
            for (k, n) in [(2, 2), (3, 3), (2, 4)] {
                let r = concurrence(&random_sc_state(k, n, seed).unwrap(), opts).unwrap();
                assert!(0.0 <= r.lower && r.lower <= r.upper + 1e-9, "{r:?}");
                if let Some(e) = r.exact {
                    assert!(r.lower - 1e-9 <= e && e <= r.upper + 1e-9);
                }
            }
        }
    }

    #[test]
    fn relative_entropy_examples() {
        for k in 2..=4 {
            let e = relative_entropy(&ghz_state(k, 2).unwrap(), LogBase::Two).unwrap();
            assert!((e - 1.0).abs() < 1e-12);
        }
        let e = relative_entropy(&ghz_state(2, 3).unwrap(), LogBase::Two).unwrap();
        assert!((e - 3f64.log2()).abs() < 1e-12);
        assert!((relative_entropy(&ghz_state(2, 3).unwrap(), LogBase::E).unwrap() - 3f64.ln()).abs() < 1e-12);

        // eigenvalues (1 ± √5/3)/2 from trace 1 and determinant 1/9
        let r = 5f64.sqrt() / 3.0;
        let (l1, l2) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
        let expect = l1 * l1.log2() + l2 * l2.log2()
            - ((2.0 / 3.0) * (2.0f64 / 3.0).log2() + (1.0 / 3.0) * (1.0f64 / 3.0).log2());
        let got = relative_entropy(&mixture_example(), LogBase::Two).unwrap();
        assert!((got - expect).abs() < 1e-14, "{got} vs {expect}");

        let d = SCState::diagonal(3, &[0.1, 0.9]).unwrap();
        assert_eq!(relative_entropy(&d, LogBase::Two).unwrap(), 0.0);
    }

    #[test]
    fn optimal_separable_examples() {
        assert_eq!(optimal_separable(&ghz_state(3, 4).unwrap()).diag.len(), 4);
        assert!(optimal_separable(&ghz_state(3, 4).unwrap())
            .diag
            .iter()
            .all(|&d| (d - 0.25).abs() < 1e-15));
        let d = SCState::diagonal(2, &[0.3, 0.7]).unwrap();
        assert_eq!(optimal_separable(&d).to_state(2).unwrap(), d);
        assert_eq!(optimal_separable(&mixture_example()).diag, vec![2.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn mixing_towards_ghz_is_monotone() {
        for (k, n) in [(2, 2), (3, 3)] {
            let g = ghz_state(k, n).unwrap();
            let sigma = optimal_separable(&g).to_state(k).unwrap();
            let mut last = (-1.0, -1.0);
            for step in 0..=10 {
                let p = step as f64 / 10.0;
                let s = g.mix(&sigma, p).unwrap();
                let cur = (negativity(&s), relative_entropy(&s, LogBase::Two).unwrap());
                assert!(cur.0 >= last.0 - 1e-15 && cur.1 >= last.1 - 1e-15);
                last = cur;
            }
        }
    }
}
