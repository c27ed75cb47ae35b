//! Run configuration for the command-line front end: command selection,
//! defaults, JSON config files, and flag merging with a fixed precedence
//! (command-line flags, then the config file, then the environment, then
//! built-in defaults).

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::parse_rational;

/// The batch commands the front end offers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Involutions,
    Normalize,
    Linearize,
    CertifyDivergence,
    Perturb,
    Profile,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Involutions => "involutions",
            Command::Normalize => "normalize",
            Command::Linearize => "linearize",
            Command::CertifyDivergence => "certify-divergence",
            Command::Perturb => "perturb",
            Command::Profile => "profile",
        }
    }

    pub fn parse(s: &str) -> Result<Command> {
        match s {
            "validate" => Ok(Command::Validate),
            "involutions" => Ok(Command::Involutions),
            "normalize" => Ok(Command::Normalize),
            "linearize" => Ok(Command::Linearize),
            "certify-divergence" => Ok(Command::CertifyDivergence),
            "perturb" => Ok(Command::Perturb),
            "profile" => Ok(Command::Profile),
            other => Err(Error::invalid(format!("unknown command '{other}'"))),
        }
    }

    /// Default working degree. Certification wants a long coefficient
    /// range for a stable growth estimate; the per-degree elimination
    /// commands dominate cost much earlier.
    fn default_degree(&self) -> usize {
        match self {
            Command::CertifyDivergence => 48,
            _ => 12,
        }
    }
}

/// Report format for the emitted stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<OutputFormat> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::invalid(format!(
                "unknown output format '{other}' (expected 'json' or 'csv')"
            ))),
        }
    }
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub degree: usize,
    pub epsilon: BigRational,
    pub input_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    /// Worker thread count; `None` leaves the pool at its default size.
    pub threads: Option<usize>,
    /// Stage degrees for the perturbation search.
    pub seed_degrees: Vec<usize>,
}

/// The JSON config file. Every field is optional and mirrors a flag;
/// unknown fields are rejected.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub degree: Option<usize>,
    pub epsilon: Option<String>,
    pub input_path: Option<PathBuf>,
    pub output_format: Option<String>,
    pub threads: Option<usize>,
    pub seed_degrees: Option<Vec<usize>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Flag-level overrides, exactly as given on the command line.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub degree: Option<usize>,
    pub epsilon: Option<String>,
    pub input_path: Option<PathBuf>,
    pub output_format: Option<String>,
    pub threads: Option<usize>,
    pub seed_degrees: Option<Vec<usize>>,
}

/// Merge flags over the config file over the environment over defaults and
/// validate the result. The command comes from the command line; a config
/// file may restate it, but a contradiction is rejected rather than
/// silently resolved.
pub fn resolve(
    command: Command,
    file: &ConfigFile,
    flags: &Overrides,
    env_threads: Option<usize>,
) -> Result<RunConfig> {
    if let Some(name) = &file.command {
        let from_file = Command::parse(name)?;
        if from_file != command {
            return Err(Error::invalid(format!(
                "config file names command '{}' but the command line runs '{}'",
                name,
                command.name()
            )));
        }
    }

    let degree = flags
        .degree
        .or(file.degree)
        .unwrap_or_else(|| command.default_degree());
    if degree < 4 {
        return Err(Error::invalid(format!(
            "degree must be at least 4, got {degree}"
        )));
    }

    let epsilon = match flags.epsilon.as_ref().or(file.epsilon.as_ref()) {
        Some(s) => parse_rational(s)?,
        None => BigRational::one(),
    };
    if !epsilon.is_positive() {
        return Err(Error::invalid(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }

    let output_format = match flags.output_format.as_ref().or(file.output_format.as_ref()) {
        Some(s) => OutputFormat::parse(s)?,
        None => OutputFormat::Json,
    };

    let threads = flags.threads.or(file.threads).or(env_threads);
    if threads == Some(0) {
        return Err(Error::invalid("thread count must be at least 1"));
    }

    let input_path = flags.input_path.clone().or_else(|| file.input_path.clone());
    let seed_degrees = flags
        .seed_degrees
        .clone()
        .or_else(|| file.seed_degrees.clone())
        .unwrap_or_default();

    Ok(RunConfig {
        command,
        degree,
        epsilon,
        input_path,
        output_format,
        threads,
        seed_degrees,
    })
}

/// Read a thread-count override from the environment variable
/// `INVOLUTE_THREADS` (ignored when unset; rejected when unparsable).
pub fn env_threads() -> Result<Option<usize>> {
    match std::env::var("INVOLUTE_THREADS") {
        Ok(v) => {
            let n: usize = v.parse().map_err(|_| {
                Error::invalid(format!(
                    "INVOLUTE_THREADS must be a positive integer, got '{v}'"
                ))
            })?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}
