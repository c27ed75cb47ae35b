//! Command-line front end: batch validation, involution extraction,
//! normalization, linearization, certification, perturbation, profiling.
//!
//! Exit codes: `0` success, `1` invalid input (including unachievable
//! perturbation thresholds), `2` internal consistency failure — the latter
//! always indicates a bug, never bad input.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use involute::config::{
    self, Command as RunCommand, ConfigFile, OutputFormat, Overrides, RunConfig,
};
use involute::error::{Error, Result};
use involute::involution::{a_series, pair_from_surface};
use involute::linearized::{divergence_certificate, k_apply, solve_difference_direct};
use involute::normalform::{normalize_pair, perturb_to_large_coeffs};
use involute::report::{certificate_to_csv, certificate_to_json, to_canonical_string};
use involute::scalar::{rational_pair, BernoulliTable, GaussRational};
use involute::series::{Series2, VARS_XY, VARS_ZW};
use involute::surface::{r_star, Surface};

#[derive(Parser, Debug)]
#[command(
    name = "involute",
    version,
    about = "Exact involution pairs, normalized transforms, and divergence certificates \
             for real surfaces with a parabolic complex tangent"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug, Default, Clone)]
struct Common {
    /// JSON config file mirroring the flags (explicit flags win).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Surface input file; defaults to the built-in family surface.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Working degree (series truncation order).
    #[arg(long, value_name = "N")]
    degree: Option<usize>,
    /// Exact scale parameter, written as "p/q" or "p".
    #[arg(long, value_name = "RATIONAL")]
    epsilon: Option<String>,
    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Report format: "json" (default) or "csv".
    #[arg(long, value_name = "FORMAT")]
    output_format: Option<String>,
    /// Worker thread count (beats the config file and INVOLUTE_THREADS).
    #[arg(long, value_name = "COUNT")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a surface against its structural constraints.
    Validate(Common),
    /// Extract the involution pair of a surface and certify it.
    Involutions(Common),
    /// Compute the unique normalized transform conjugating the pair to its
    /// linear models.
    Normalize(Common),
    /// Reduce a surface to its difference-equation data and solve exactly.
    Linearize(Common),
    /// Run the two-route divergence certificate for the canonical family.
    #[command(name = "certify-divergence")]
    CertifyDivergence(Common),
    /// Staged coefficient-growth perturbation search.
    Perturb {
        #[command(flatten)]
        common: Common,
        /// Comma-separated surface degrees, one search stage each.
        #[arg(long, value_name = "D1,D2,...", value_delimiter = ',')]
        seed_degrees: Option<Vec<usize>>,
    },
    /// Time the main phases and report peak coefficient bit sizes.
    Profile(Common),
}

fn main() -> ExitCode {
    // Argument mistakes are input validation (exit 1), not internal errors;
    // help and version remain successful exits.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let (cmd, common, seeds) = match cli.command {
        Cmd::Validate(c) => (RunCommand::Validate, c, None),
        Cmd::Involutions(c) => (RunCommand::Involutions, c, None),
        Cmd::Normalize(c) => (RunCommand::Normalize, c, None),
        Cmd::Linearize(c) => (RunCommand::Linearize, c, None),
        Cmd::CertifyDivergence(c) => (RunCommand::CertifyDivergence, c, None),
        Cmd::Perturb {
            common,
            seed_degrees,
        } => (RunCommand::Perturb, common, seed_degrees),
        Cmd::Profile(c) => (RunCommand::Profile, c, None),
    };
    let file = match &common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let flags = Overrides {
        degree: common.degree,
        epsilon: common.epsilon.clone(),
        input_path: common.input.clone(),
        output_format: common.output_format.clone(),
        threads: common.threads,
        seed_degrees: seeds,
    };
    let cfg = config::resolve(cmd, &file, &flags, config::env_threads()?)?;

    let (report, code) = match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(format!("cannot build a {t}-thread pool: {e}")))?;
            pool.install(|| execute(&cfg))?
        }
        None => execute(&cfg)?,
    };

    match &common.output {
        Some(path) => std::fs::write(path, report)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(report.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(code)
}

fn execute(cfg: &RunConfig) -> Result<(String, u8)> {
    match cfg.command {
        RunCommand::Validate => cmd_validate(cfg),
        RunCommand::Involutions => cmd_involutions(cfg),
        RunCommand::Normalize => cmd_normalize(cfg),
        RunCommand::Linearize => cmd_linearize(cfg),
        RunCommand::CertifyDivergence => cmd_certify(cfg),
        RunCommand::Perturb => cmd_perturb(cfg),
        RunCommand::Profile => cmd_profile(cfg),
    }
}

/// The surface a command works on: the input file when given, otherwise
/// the canonical family surface at the configured degree and scale.
fn load_surface(cfg: &RunConfig) -> Result<Surface> {
    match &cfg.input_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Surface::from_json_str(&text)
        }
        None => Ok(r_star(cfg.degree, &cfg.epsilon)),
    }
}

/// Commands other than `validate` treat structural violations as bad input.
fn require_valid(s: &Surface) -> Result<()> {
    let violations = s.validate();
    if violations.is_empty() {
        return Ok(());
    }
    Err(Error::invalid(format!(
        "surface fails validation with {} violation(s); first: {}",
        violations.len(),
        violations[0]
    )))
}

fn cmd_validate(cfg: &RunConfig) -> Result<(String, u8)> {
    let s = load_surface(cfg)?;
    let violations = s.validate();
    let report = serde_json::json!({
        "trunc": s.trunc(),
        "epsilon": rational_pair(s.epsilon()),
        "valid": violations.is_empty(),
        "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    });
    let code = if violations.is_empty() { 0 } else { 1 };
    Ok((to_canonical_string(&report), code))
}

fn cmd_involutions(cfg: &RunConfig) -> Result<(String, u8)> {
    let s = load_surface(cfg)?;
    require_valid(&s)?;
    let pair = pair_from_surface(&s, cfg.degree)?;
    let report = serde_json::json!({
        "degree": cfg.degree,
        "pair": pair.to_json_value(),
    });
    Ok((to_canonical_string(&report), 0))
}

fn cmd_normalize(cfg: &RunConfig) -> Result<(String, u8)> {
    let s = load_surface(cfg)?;
    require_valid(&s)?;
    let pair = pair_from_surface(&s, cfg.degree)?;
    let nt = normalize_pair(&pair, cfg.degree)?;
    let report = serde_json::json!({
        "degree": cfg.degree,
        "transform": nt.to_json_value(),
    });
    Ok((to_canonical_string(&report), 0))
}

fn cmd_linearize(cfg: &RunConfig) -> Result<(String, u8)> {
    let s = load_surface(cfg)?;
    require_valid(&s)?;
    let n = cfg.degree;
    // One degree of headroom so the derivative identity below can be
    // checked through the reported degree.
    let a_full = a_series(&s, n + 1)?;
    let u_full = solve_difference_direct(&a_full)?;
    let table = BernoulliTable::new(n + 1);
    let four_x = Series2::monomial(n, VARS_XY, 1, 0, GaussRational::from_int(4));
    let lhs = four_x.mul(&u_full.d_second());
    let rhs = k_apply(&a_full, &table)?.neg().reduce_trunc(n);
    if lhs != rhs {
        return Err(Error::internal(
            "Bernoulli-operator route disagrees with the difference-equation solution",
        ));
    }
    let report = serde_json::json!({
        "degree": n,
        "a": a_full.reduce_trunc(n).to_json_value(),
        "u": u_full.reduce_trunc(n).to_json_value(),
        "k_route_consistent": true,
    });
    Ok((to_canonical_string(&report), 0))
}

fn cmd_certify(cfg: &RunConfig) -> Result<(String, u8)> {
    if cfg.input_path.is_some() {
        return Err(Error::invalid(
            "certify-divergence always works on the built-in family; --input is not accepted",
        ));
    }
    let cert = divergence_certificate(cfg.degree, &cfg.epsilon)?;
    let report = match cfg.output_format {
        OutputFormat::Json => to_canonical_string(&certificate_to_json(&cert)),
        OutputFormat::Csv => certificate_to_csv(&cert),
    };
    Ok((report, 0))
}

fn cmd_perturb(cfg: &RunConfig) -> Result<(String, u8)> {
    if cfg.seed_degrees.is_empty() {
        return Err(Error::invalid(
            "perturb needs at least one stage degree (--seed-degrees)",
        ));
    }
    let base = match &cfg.input_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let s = Surface::from_json_str(&text)?;
            require_valid(&s)?;
            s
        }
        None => Surface::zero(4, cfg.epsilon.clone()),
    };
    let result = perturb_to_large_coeffs(&base, &cfg.seed_degrees)?;
    let report = serde_json::json!({
        "stages": cfg.seed_degrees,
        "changed": result != base,
        "surface": result.to_json_value(),
    });
    Ok((to_canonical_string(&report), 0))
}

fn cmd_profile(cfg: &RunConfig) -> Result<(String, u8)> {
    if cfg.degree < 10 {
        return Err(Error::invalid(
            "profile runs the certificate phase and needs degree >= 10",
        ));
    }
    let mut phases = Vec::new();

    let t = Instant::now();
    let surface = load_surface(cfg)?;
    require_valid(&surface)?;
    let sv = surface.to_json_value();
    let round = Surface::from_json_value(&sv)?;
    let dt = t.elapsed();
    if round != surface {
        return Err(Error::internal("surface JSON round-trip changed the data"));
    }
    phases.push(phase_row(
        "parse",
        dt,
        surface.to_series(VARS_ZW).max_coeff_bits(),
        &sv,
    ));

    let t = Instant::now();
    let pair = pair_from_surface(&surface, cfg.degree)?;
    let dt = t.elapsed();
    let bits = pair
        .tau1()
        .comp1()
        .max_coeff_bits()
        .max(pair.tau1().comp2().max_coeff_bits())
        .max(pair.tau2().comp1().max_coeff_bits())
        .max(pair.tau2().comp2().max_coeff_bits());
    phases.push(phase_row("involutions", dt, bits, &pair.to_json_value()));

    let t = Instant::now();
    let nt = normalize_pair(&pair, cfg.degree)?;
    let dt = t.elapsed();
    let bits = nt.u().max_coeff_bits().max(nt.v().max_coeff_bits());
    phases.push(phase_row("normalize", dt, bits, &nt.to_json_value()));

    let t = Instant::now();
    let cert = divergence_certificate(cfg.degree, &cfg.epsilon)?;
    let dt = t.elapsed();
    let bits = cert
        .coeffs()
        .iter()
        .map(GaussRational::bit_size)
        .max()
        .unwrap_or(0);
    phases.push(phase_row("certify", dt, bits, &certificate_to_json(&cert)));

    let report = serde_json::json!({
        "degree": cfg.degree,
        "epsilon": rational_pair(&cfg.epsilon),
        "threads": cfg.threads,
        "phases": phases,
    });
    Ok((to_canonical_string(&report), 0))
}

fn phase_row(
    name: &str,
    wall: Duration,
    peak_coeff_bits: u64,
    result: &serde_json::Value,
) -> serde_json::Value {
    let mut h = Sha256::new();
    h.update(to_canonical_string(result).as_bytes());
    serde_json::json!({
        "phase": name,
        "wall_ms": wall.as_secs_f64() * 1e3,
        "peak_coeff_bits": peak_coeff_bits,
        "result_hash": format!("{:x}", h.finalize()),
    })
}
