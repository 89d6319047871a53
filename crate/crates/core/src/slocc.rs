//! SLOCC classification of pure SC states.
//!
//! A pure SC state `Σ_m c_m |m⋯m⟩` with `t` nonzero amplitudes is either a
//! product state (`t = 1`) or equivalent to `GHZ(k, t)` through the local
//! diagonal filter `F = Σ_m (√t c_m)^{-1/k} |m⟩⟨m|` applied on every party.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{PureSCState, Tolerances};

/// Default threshold on `|c_m|` for counting a level as supported.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SloccKind {
    FullySeparable,
    GhzClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SloccClass {
    pub kind: SloccKind,
    /// Support size; 1 for product states.
    pub t: usize,
}

pub fn classify_pure(psi: &PureSCState, tol: f64) -> SloccClass {
    let t = psi.amplitudes().iter().filter(|z| z.norm() > tol).count();
    let kind = if t <= 1 {
        SloccKind::FullySeparable
    } else {
        SloccKind::GhzClass
    };
    SloccClass { kind, t }
}

/// Local diagonal operator, identical on every party.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOperator {
    pub diagonal: Vec<Complex64>,
}

impl FilterOperator {
    pub fn identity(local_dim: usize) -> Self {
        Self {
            diagonal: vec![Complex64::new(1.0, 0.0); local_dim],
        }
    }

    /// Invertible on the levels where it is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.diagonal.len())
            .filter(|&m| self.diagonal[m].norm() > 0.0)
            .collect()
    }
}

/// `f_m = (√t · c_m)^{-1/k}` on the support (principal branch), 0 elsewhere.
pub fn build_filter(psi: &PureSCState) -> Result<FilterOperator> {
    let class = classify_pure(psi, SUPPORT_TOL);
    if class.kind == SloccKind::FullySeparable {
        return Err(Error::NotEntangled { t: class.t });
    }
    let k = psi.parties() as f64;
    let sqrt_t = (class.t as f64).sqrt();
    let diagonal = psi
        .amplitudes()
        .iter()
        .map(|&c| {
            if c.norm() > SUPPORT_TOL {
                let z = c * sqrt_t;
                Complex64::from_polar(z.norm().powf(-1.0 / k), -z.arg() / k)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(FilterOperator { diagonal })
}

/// `F^{⊗k} |ψ⟩`, renormalized: `c'_m ∝ f_m^k c_m`.
pub fn apply_filter(f: &FilterOperator, psi: &PureSCState) -> Result<PureSCState> {
    if f.diagonal.len() != psi.local_dim() {
        return Err(Error::DimMismatch {
            expected: psi.local_dim(),
            found: f.diagonal.len(),
        });
    }
    let k = psi.parties() as i32;
    let amps: Vec<Complex64> = f
        .diagonal
        .iter()
        .zip(psi.amplitudes())
        .map(|(fm, c)| fm.powi(k) * c)
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= SUPPORT_TOL {
        return Err(Error::ZeroOutput);
    }
    PureSCState::new(
        psi.parties(),
        amps.into_iter().map(|z| z / norm).collect(),
        Tolerances::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::concurrence_pure_bipartite;
    use crate::state::{ghz, random_pure_sc_state_with};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn third() -> f64 {
        (1.0f64 / 3.0).sqrt()
    }

    #[test]
    fn classification_examples() {
        let product = PureSCState::from_real(2, &[1.0, 0.0]).unwrap();
        assert_eq!(
            classify_pure(&product, SUPPORT_TOL),
            SloccClass {
                kind: SloccKind::FullySeparable,
                t: 1
            }
        );
        assert_eq!(
            classify_pure(&ghz(3, 2).unwrap(), SUPPORT_TOL),
            SloccClass {
                kind: SloccKind::GhzClass,
                t: 2
            }
        );
        let psi = PureSCState::from_real(3, &[third(), (2.0f64 / 3.0).sqrt(), 0.0]).unwrap();
        assert_eq!(classify_pure(&psi, SUPPORT_TOL).t, 2);
        let out = apply_filter(&build_filter(&psi).unwrap(), &psi).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((out.amplitudes()[0] - Complex64::new(h, 0.0)).norm() < 1e-15);
        assert!((out.amplitudes()[1] - Complex64::new(h, 0.0)).norm() < 1e-15);
        assert_eq!(out.amplitudes()[2], Complex64::new(0.0, 0.0));
        assert_eq!(build_filter(&product).unwrap_err(), Error::NotEntangled { t: 1 });
    }

    #[test]
    fn filter_entries_for_two_level_example() {
        let psi = PureSCState::from_real(2, &[third(), (2.0f64 / 3.0).sqrt()]).unwrap();
        let f = build_filter(&psi).unwrap();
        let f0 = (2f64.sqrt() * third()).powf(-0.5);
        let f1 = (2f64.sqrt() * (2.0f64 / 3.0).sqrt()).powf(-0.5);
        assert!((f.diagonal[0] - Complex64::new(f0, 0.0)).norm() < 1e-15);
        assert!((f.diagonal[1] - Complex64::new(f1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ghz_filter_acts_as_identity() {
        let g = ghz(4, 3).unwrap();
        let out = apply_filter(&build_filter(&g).unwrap(), &g).unwrap();
        for (a, b) in out.amplitudes().iter().zip(g.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        let id = apply_filter(&FilterOperator::identity(3), &g).unwrap();
        assert_eq!(id.amplitudes(), g.amplitudes());
    }

    #[test]
    fn complex_phases_are_removed() {
        let h = 1.0 / 2f64.sqrt();
        let psi = PureSCState::new(
            3,
            vec![
                Complex64::from_polar(h, std::f64::consts::FRAC_PI_3),
                Complex64::new(h, 0.0),
            ],
            Tolerances::default(),
        )
        .unwrap();
        let out = apply_filter(&build_filter(&psi).unwrap(), &psi).unwrap();
        let ratio = out.amplitudes()[0] / out.amplitudes()[1];
        assert!((ratio - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((out.amplitudes()[0].norm() - h).abs() < 1e-15);
    }

    #[test]
    fn disjoint_support_annihilates() {
        let f = FilterOperator {
            diagonal: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        };
        let psi = PureSCState::from_real(2, &[0.0, 1.0]).unwrap();
        assert_eq!(apply_filter(&f, &psi).unwrap_err(), Error::ZeroOutput);
        assert!(apply_filter(&FilterOperator::identity(3), &psi).is_err());
    }

    #[test]
    fn random_states_map_to_uniform_ghz_and_change_concurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let k = rng.gen_range(2..=5);
            let n = rng.gen_range(2..=5);
            let t = rng.gen_range(2..=n);
            let psi = random_pure_sc_state_with(k, n, t, &mut rng).unwrap();
            let out = apply_filter(&build_filter(&psi).unwrap(), &psi).unwrap();
            assert_eq!(classify_pure(&out, SUPPORT_TOL), classify_pure(&psi, SUPPORT_TOL));
            let support: Vec<Complex64> = out.amplitudes().iter().copied().filter(|z| z.norm() > 1e-12).collect();
            for z in &support {
                assert!((z.norm() - 1.0 / (t as f64).sqrt()).abs() < 1e-10);
                assert!((z / support[0] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            }
            let moduli: Vec<f64> = psi
                .amplitudes()
                .iter()
                .map(|z| z.norm())
                .filter(|&m| m > 1e-12)
                .collect();
            let spread = moduli.iter().cloned().fold(0.0, f64::max) - moduli.iter().cloned().fold(1.0, f64::min);
            if spread > 1e-6 {
                assert!(concurrence_pure_bipartite(&out) > concurrence_pure_bipartite(&psi));
            }
        }
    }
}
