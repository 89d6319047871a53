//! Command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 invalid input, 3 oracle
//! residual above tolerance, 4 size guard exceeded.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::io::{state_from_json, state_to_json, to_canonical_string, witness_to_json};
use crate::measures::{
    concurrence, ghz_state, negativity, relative_entropy, ConcurrenceMethod, ConcurrenceOptions, RoofOptions,
};
use crate::oracle::{LogBase, DEFAULT_SIZE_GUARD};
use crate::separability::{
    bloch_decomposition, build_witness, coherence_block_vanishes, pt_spectrum, realignment_norm, PtSpectrum,
    COHERENCE_BLOCK_TOL,
};
use crate::slocc::{classify_pure, SloccClass, SUPPORT_TOL};
use crate::state::{pure_to_mixed, random_sc_state_with, spectral_ensemble, PureSCState, SCState, Tolerances};
use crate::verify::{sample_rng, verify_random, verify_state, Residuals};

pub const SIZE_GUARD_ENV: &str = "SC_SIZE_GUARD";

#[derive(Debug, Parser)]
#[command(
    name = "schmidt",
    version,
    about = "Separability and entanglement of Schmidt-correlated states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a state file and print a JSON report.
    Analyze(AnalyzeArgs),
    /// Write the GHZ(k, N) state file.
    Ghz(GhzArgs),
    /// Write reproducible random states.
    Random(RandomArgs),
    /// Cross-check every closed form against dense computations.
    OracleVerify(OracleArgs),
    /// Print a named example state.
    Examples(ExamplesArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    /// Bipartition 1..l | l+1..k used by the Bloch test.
    #[arg(long, default_value_t = 1)]
    pub split: usize,
    #[arg(long, default_value = "2")]
    pub log_base: LogBase,
    /// Recompute every closed form with dense matrices.
    #[arg(long)]
    pub oracle: bool,
    /// Run the convex-roof optimizer when no closed form applies.
    #[arg(long)]
    pub roof: bool,
    /// Separability threshold on the negativity.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Largest accepted oracle residual.
    #[arg(long, default_value_t = 1e-9)]
    pub oracle_tol: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the witness operator to this file.
    #[arg(long)]
    pub witness_output: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GhzArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ExamplesArgs {
    /// ghz32, example41 or psi-onethird.
    #[arg(long)]
    pub which: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::SizeGuard { .. }) => 4,
            CliError::Lib(
                Error::InvalidDims(_)
                | Error::NonFinite { .. }
                | Error::NotHermitian { .. }
                | Error::NotUnitTrace { .. }
                | Error::NotPsd { .. }
                | Error::NotNormalized { .. }
                | Error::DimMismatch { .. }
                | Error::InvalidSplit { .. }
                | Error::InvalidSubset(_)
                | Error::UnknownExample(_)
                | Error::Parse(_),
            )
            | CliError::Usage(_) => 2,
            CliError::Lib(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::Usage(m) => f.write_str(m),
        }
    }
}

/// Text for stdout plus the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: 0 }
    }
}

#[derive(Debug, Serialize)]
pub struct WitnessSummary {
    pub pairs: usize,
    pub expectation: f64,
}

#[derive(Debug, Serialize)]
pub struct BlochTestSummary {
    pub split: usize,
    pub block_max: f64,
    pub vanishes: bool,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub separable: bool,
    pub pt_spectrum: PtSpectrum,
    pub pt_min_eigenvalue: f64,
    pub realignment_norm: f64,
    pub negativity: f64,
    pub concurrence_lower: f64,
    pub concurrence_upper: f64,
    pub concurrence_exact: Option<f64>,
    pub concurrence_method: ConcurrenceMethod,
    pub concurrence_roof_converged: Option<bool>,
    pub relative_entropy: f64,
    pub log_base: LogBase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slocc: Option<SloccClass>,
    pub witness: WitnessSummary,
    /// Absent when `N^k` exceeds the size guard.
    pub bloch_test: Option<BlochTestSummary>,
    pub oracle_checked: bool,
    pub oracle_max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_residuals: Option<Residuals>,
}

/// Reads `SC_SIZE_GUARD`, falling back to the default.
pub fn size_guard() -> Result<usize, CliError> {
    match std::env::var(SIZE_GUARD_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SIZE_GUARD_ENV}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_SIZE_GUARD),
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let guard = size_guard()?;
    match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, guard),
        Command::Ghz(a) => {
            let state = ghz_state(a.k, a.n)?;
            emit(&state_to_json(&state)?, a.output.as_deref())
        }
        Command::Random(a) => cmd_random(&a),
        Command::OracleVerify(a) => {
            let summary = verify_random(a.k, a.n, a.samples, a.seed, a.tol, guard)?;
            let code = if summary.pass { 0 } else { 3 };
            Ok(Outcome {
                stdout: to_canonical_string(&summary)?,
                code,
            })
        }
        Command::Examples(a) => emit(&state_to_json(&example(&a.which)?)?, a.output.as_deref()),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<Outcome, CliError> {
    match output {
        Some(path) => {
            write_file(path, text)?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text.to_string())),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads and validates a state file.
pub fn load_state(path: &Path) -> Result<SCState, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    state_from_json(&text, Tolerances::default()).map_err(|e| match e {
        Error::Overflow => CliError::Lib(e),
        _ => CliError::Usage(format!("{}: {e}", path.display())),
    })
}

pub fn analyze(state: &SCState, a: &AnalyzeArgs, guard: usize) -> Result<AnalysisReport, CliError> {
    let (k, n) = (state.parties(), state.local_dim());
    if a.split == 0 || a.split >= k {
        return Err(Error::InvalidSplit { l: a.split, k }.into());
    }
    let roof = a.roof.then(|| RoofOptions {
        restarts: a.restarts,
        max_iter: a.max_iter,
        seed: a.seed,
        ..RoofOptions::default()
    });
    let conc = concurrence(state, ConcurrenceOptions { roof })?;
    let neg = negativity(state);
    let spectrum = pt_spectrum(state)?;
    let witness = build_witness(state)?;

    let slocc = if state.coeffs().rank()? == 1 {
        spectral_ensemble(state)?
            .components
            .first()
            .map(|(_, psi)| classify_pure(psi, SUPPORT_TOL))
    } else {
        None
    };

    let bloch_test = match bloch_decomposition(state, a.split, guard) {
        Ok(b) => Some(BlochTestSummary {
            split: a.split,
            block_max: b.coherence_block_max(),
            vanishes: coherence_block_vanishes(&b, COHERENCE_BLOCK_TOL),
        }),
        Err(Error::SizeGuard { .. }) => None,
        Err(e) => return Err(e.into()),
    };

    let residuals = if a.oracle {
        Some(verify_state(state, a.split, a.log_base, guard)?)
    } else {
        None
    };

    Ok(AnalysisReport {
        k,
        n,
        separable: neg <= a.tol,
        pt_min_eigenvalue: spectrum.min_eigenvalue(),
        pt_spectrum: spectrum,
        realignment_norm: realignment_norm(state),
        negativity: neg,
        concurrence_lower: conc.lower,
        concurrence_upper: conc.upper,
        concurrence_exact: conc.exact,
        concurrence_method: conc.method,
        concurrence_roof_converged: conc.roof_converged,
        relative_entropy: relative_entropy(state, a.log_base)?,
        log_base: a.log_base,
        slocc,
        witness: WitnessSummary {
            pairs: witness.source_pairs().len(),
            expectation: witness.source_expectation(),
        },
        bloch_test,
        oracle_checked: a.oracle,
        oracle_max_residual: residuals.map(|r| r.max()),
        oracle_residuals: residuals,
    })
}

fn cmd_analyze(a: &AnalyzeArgs, guard: usize) -> Result<Outcome, CliError> {
    let state = load_state(&a.input)?;
    let report = analyze(&state, a, guard)?;
    if let Some(path) = &a.witness_output {
        write_file(path, &witness_to_json(&build_witness(&state)?)?)?;
    }
    let code = match report.oracle_max_residual {
        Some(r) if r.is_nan() || r > a.oracle_tol => 3,
        _ => 0,
    };
    let mut out = emit(&to_canonical_string(&report)?, a.output.as_deref())?;
    out.code = code;
    Ok(out)
}

/// File name of random state `index` drawn with `seed`.
pub fn random_file_name(k: usize, n: usize, seed: u64, index: usize) -> String {
    format!("sc-k{k}-N{n}-seed{seed}-{index}.json")
}

fn cmd_random(a: &RandomArgs) -> Result<Outcome, CliError> {
    fs::create_dir_all(&a.output_dir).map_err(|e| CliError::Io(format!("{}: {e}", a.output_dir.display())))?;
    let mut listing = String::new();
    for i in 0..a.count {
        let state = random_sc_state_with(a.k, a.n, &mut sample_rng(a.seed, i))?;
        let path = a.output_dir.join(random_file_name(a.k, a.n, a.seed, i));
        write_file(&path, &state_to_json(&state)?)?;
        listing.push_str(&format!("{}\n", path.display()));
    }
    Ok(Outcome::ok(listing))
}

/// The worked examples: `ghz32` is GHZ(3, 2), `example41` the three-qubit
/// mixture `(2/3)|GHZ⟩⟨GHZ| + (1/3)|000⟩⟨000|`, and `psi-onethird` the
/// three-party pure state `√(1/3)|000⟩ + √(2/3)|111⟩`.
pub fn example(which: &str) -> Result<SCState, Error> {
    match which {
        "ghz32" => ghz_state(3, 2),
        "example41" => SCState::from_real_rows(3, &[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 1.0 / 3.0]]),
        "psi-onethird" => Ok(pure_to_mixed(&PureSCState::from_real(
            3,
            &[(1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt()],
        )?)),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}
