//! Run reports: deterministic JSON envelopes with input digests, plus the
//! exit-code mapping for the library error families.

use serde_json::json;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::PathBuf;
use symindex::iteration::IterationError;
use symindex::kronecker::KroneckerError;
use symindex::modsolve::ModSolveError;
use symindex::morse::MorseError;
use symindex::numeric::NumericError;
use symindex::oracle::OracleError;
use symindex::symplectic::SymplecticError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Parse = 2,
    Precondition = 3,
    SearchExhausted = 4,
    Guard = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn new(code: ExitCode, message: String) -> Self {
        CliError { code, message }
    }
}

fn from_numeric(e: &NumericError) -> ExitCode {
    match e {
        NumericError::GuardViolation(_) => ExitCode::Guard,
        NumericError::Parse(_) => ExitCode::Parse,
        _ => ExitCode::Precondition,
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        CliError::new(from_numeric(&e), e.to_string())
    }
}

impl From<SymplecticError> for CliError {
    fn from(e: SymplecticError) -> Self {
        let code = match &e {
            SymplecticError::Numeric(n) => from_numeric(n),
            _ => ExitCode::Precondition,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<IterationError> for CliError {
    fn from(e: IterationError) -> Self {
        let code = match &e {
            IterationError::Numeric(n) => from_numeric(n),
            IterationError::Symplectic(SymplecticError::Numeric(n)) => from_numeric(n),
            _ => ExitCode::Precondition,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<KroneckerError> for CliError {
    fn from(e: KroneckerError) -> Self {
        let code = match &e {
            KroneckerError::SearchExhausted(_) => ExitCode::SearchExhausted,
            KroneckerError::Numeric(n) => from_numeric(n),
            KroneckerError::Iteration(IterationError::Numeric(n)) => from_numeric(n),
            _ => ExitCode::Precondition,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<ModSolveError> for CliError {
    fn from(e: ModSolveError) -> Self {
        let code = match &e {
            ModSolveError::NotFound(_) | ModSolveError::WindowSearchExhausted { .. } => {
                ExitCode::SearchExhausted
            }
            ModSolveError::Numeric(n) => from_numeric(n),
            _ => ExitCode::Precondition,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<MorseError> for CliError {
    fn from(e: MorseError) -> Self {
        let code = match &e {
            MorseError::Numeric(n) => from_numeric(n),
            _ => ExitCode::Precondition,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        let code = match &e {
            OracleError::ResolutionFailure(..) | OracleError::NoStabilization(_) => {
                ExitCode::SearchExhausted
            }
            OracleError::Numeric(n) => from_numeric(n),
            _ => ExitCode::Precondition,
        };
        CliError::new(code, e.to_string())
    }
}

/// SHA-256 digests of the input files, keyed by file name.
pub fn digest_inputs(paths: &[&PathBuf]) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for p in paths {
        let bytes = std::fs::read(p)
            .map_err(|e| CliError::new(ExitCode::Parse, format!("{}: {e}", p.display())))?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        out.insert(
            p.file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
            hex::encode(hasher.finalize()),
        );
    }
    Ok(out)
}

/// Print the deterministic report envelope. Timing goes to stderr so that a
/// fixed seed yields byte-identical stdout.
pub fn emit(
    command: &str,
    inputs: BTreeMap<String, String>,
    seed: Option<i64>,
    results: serde_json::Value,
) -> Result<(), CliError> {
    let report = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs,
        "seed": seed,
        "results": results,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::new(ExitCode::Parse, e.to_string()))?
    );
    Ok(())
}
