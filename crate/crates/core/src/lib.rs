//! Separability, entanglement witnesses, SLOCC filters and entanglement
//! measures for multipartite Schmidt-correlated (SC) states
//! `ρ = Σ_{m,n} a_mn |m⋯m⟩⟨n⋯n|`.
//!
//! Every quantity has a closed form in terms of the `N × N` coefficient
//! matrix `a`. The [`oracle`] module rebuilds the full `N^k`-dimensional
//! operators and recomputes the same quantities by brute force so the closed
//! forms can be cross-checked.

pub mod cli;
pub mod error;
pub mod io;
pub mod measures;
pub mod oracle;
pub mod separability;
pub mod slocc;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use state::{CoeffMatrix, ComplexScalar, Ensemble, PureSCState, SCState, Tolerances};
