use thiserror::Error;

/// Errors produced by state construction, the closed-form routines and the
/// dense verification path.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("coefficient matrix is not Hermitian (worst |a_mn - conj(a_nm)| = {worst:e})")]
    NotHermitian { worst: f64 },

    #[error("coefficient matrix trace is not 1 (|tr - 1| = {worst:e})")]
    NotUnitTrace { worst: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {worst:e})")]
    NotPsd { worst: f64 },

    #[error("amplitudes are not normalized (|sum |c_m|^2 - 1| = {worst:e})")]
    NotNormalized { worst: f64 },

    #[error("Hermitian eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dense dimension {dim} exceeds the size guard {guard}")]
    SizeGuard { dim: u128, guard: usize },

    #[error("N^k overflows the supported integer range")]
    Overflow,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("invalid split l = {l} for k = {k} parties (need 1 <= l <= k - 1)")]
    InvalidSplit { l: usize, k: usize },

    #[error("invalid party subset: {0}")]
    InvalidSubset(String),

    #[error("operation supports N = 2 only, got N = {n}")]
    UnsupportedDim { n: usize },

    #[error("state is not entangled (support size {t})")]
    NotEntangled { t: usize },

    #[error("filter annihilates the state")]
    ZeroOutput,

    #[error("unknown example '{0}' (expected one of ghz32, example41, psi-onethird)")]
    UnknownExample(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
