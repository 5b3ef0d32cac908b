//! The `grdm` command line: `check`, `fuzz`, `quasifree` and `selftest`.
//!
//! Exit codes: 0 when everything passes, 1 when a condition or identity fails, 2 on
//! usage or input errors. `GRDM_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::conditions::{
    check_first_order, check_first_order_form, check_g, check_g_form, check_p, check_p_form,
    check_q, check_q_form, check_t1_closed, check_t1_full, check_t2_closed, check_t2_full,
    fuzz_conditions, pdm1_from_density, ConditionReport, FuzzOptions, GrassmannDensity,
    PSD_REL_TOL,
};
use crate::error::Error;
use crate::fock::FOCK_MAX_MODES;
use crate::grassmann::DerivativeSide;
use crate::io::{
    parse_check_input, write_json_atomic, ElementJson, FuzzSummaryJson, QuasifreeOutput,
    QuasifreeReport, ReportJson,
};
use crate::linalg::{max_abs, max_abs_diff};
use crate::quasifree::{build_quasifree, quasifree_words, verify_quasifree};
use crate::selftest::{first_failure, run_selftest, SELFTEST_MAX_MODES};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Longest words the `quasifree` command verifies.
pub const MAX_POINTS_CAP: usize = 6;

#[derive(Debug, Parser)]
#[command(
    name = "grdm",
    version,
    about = "Grassmann-integral checks for fermionic reduced density matrices"
)]
pub struct Cli {
    /// Print one line per condition or identity.
    #[arg(long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the representability conditions on γ (and Γ, or a density ρ) read from JSON.
    Check(CheckArgs),
    /// Run every condition on random genuine densities.
    Fuzz(FuzzArgs),
    /// Build the quasifree density with a given γ and verify Wick factorization.
    Quasifree(QuasifreeArgs),
    /// Check the sign and normalization conventions at m = 1..=4.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// JSON input: a record or array of records with `kind` gamma, Gamma or rho
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Write JSON here (atomically) instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Relative PSD tolerance: pass when margin ≥ −tol·(1 + max|Γ|).
    #[arg(long, default_value_t = PSD_REL_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// Number of modes, 1..=6
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw densities from the N-particle sector.
    #[arg(long, value_name = "N")]
    pub sector: Option<usize>,
    /// Skip the Grassmann-form T1/T2 checks.
    #[arg(long)]
    pub skip_third_order: bool,
    /// Relative PSD tolerance.
    #[arg(long, default_value_t = PSD_REL_TOL)]
    pub tol: f64,
    /// Write JSON here (atomically) instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuasifreeArgs {
    /// JSON input: a record or array of records with `kind` gamma, Gamma or rho
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Write JSON here (atomically) instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Longest generator word compared against the Wick pairing sum.
    #[arg(long, value_name = "2N", default_value_t = MAX_POINTS_CAP)]
    pub max_points: usize,
    /// Absolute tolerance on the γ recovery and Wick deviations.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Largest number of modes, at most 4
    #[arg(long, default_value_t = SELFTEST_MAX_MODES)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Take Grassmann derivatives from the right (wrong for odd m; a negative control).
    #[arg(long)]
    pub flip_sign: bool,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let threads = match std::env::var("GRDM_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                return usage(format!(
                    "GRDM_THREADS must be a positive integer, got `{v}`"
                ))
            }
        },
        Err(_) => None,
    };
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => usage(e),
        },
        None => execute(&cli),
    }
}

pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, cli.verbose),
        Command::Fuzz(a) => cmd_fuzz(a, cli.verbose),
        Command::Quasifree(a) => cmd_quasifree(a, cli.verbose),
        Command::Selftest(a) => cmd_selftest(a, cli.verbose),
    };
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => usage(e),
    }
}

fn usage(msg: impl Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn emit<T: Serialize + ?Sized>(out: Option<&Path>, value: &T) -> Result<(), Error> {
    match out {
        Some(path) => write_json_atomic(path, value),
        None => {
            let text = serde_json::to_string_pretty(value)?;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn log_report(r: &ConditionReport) {
    eprintln!(
        "{} {:<14} {:<15} margin {:+.3e} (tol {:.1e})",
        if r.pass { "PASS" } else { "FAIL" },
        r.condition,
        r.method.as_str(),
        r.margin,
        r.tol
    );
}

fn check_tol(tol: f64) -> Result<(), Error> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "--tol must be finite and nonnegative, got {tol}"
        )))
    }
}

pub fn cmd_check(args: &CheckArgs, verbose: bool) -> Result<bool, Error> {
    check_tol(args.tol)?;
    let text = std::fs::read_to_string(&args.input)?;
    let input = parse_check_input(&text)?;
    let g = &input.gamma;
    let mut reports = vec![check_first_order(g)?];
    let scale = match &input.big_gamma {
        Some(big) => {
            reports.push(check_p(g, big)?);
            reports.push(check_q(g, big)?);
            reports.push(check_g(g, big)?);
            reports.push(check_t1_closed(g, big)?);
            reports.push(check_t2_closed(g, big)?);
            max_abs(&big.0)
        }
        None => max_abs(&g.0),
    };
    if let Some(rho) = &input.rho {
        let density = GrassmannDensity::from_rho(rho)?;
        reports.push(check_first_order_form(&density)?);
        reports.push(check_p_form(&density)?);
        reports.push(check_q_form(&density)?);
        reports.push(check_g_form(&density)?);
        reports.push(check_t1_full(&density)?);
        reports.push(check_t2_full(&density)?);
    }
    let tol = args.tol * (1.0 + scale);
    let reports: Vec<ConditionReport> = reports.into_iter().map(|r| r.with_tol(tol)).collect();
    if verbose {
        reports.iter().for_each(log_report);
    }
    let json: Vec<ReportJson> = reports.iter().map(ReportJson::from).collect();
    emit(args.out.as_deref(), &json)?;
    Ok(reports.iter().all(|r| r.pass))
}

pub fn cmd_fuzz(args: &FuzzArgs, verbose: bool) -> Result<bool, Error> {
    check_tol(args.tol)?;
    if args.m == 0 || args.m > FOCK_MAX_MODES {
        return Err(Error::ModeCount {
            m: args.m,
            max: FOCK_MAX_MODES,
        });
    }
    if args.trials == 0 {
        return Err(Error::Invalid("--trials must be at least 1".into()));
    }
    let options = FuzzOptions {
        sector: args.sector,
        skip_third_order: args.skip_third_order,
    };
    let mut summary = fuzz_conditions(args.m, args.trials, args.seed, options)?;
    for trial in &mut summary.details {
        let tol = args.tol * (1.0 + trial.gamma2_norm);
        trial.reports = trial.reports.drain(..).map(|r| r.with_tol(tol)).collect();
    }
    summary.failures = summary.details.iter().filter(|t| !t.passed()).count();
    if verbose {
        for (key, margin) in &summary.worst_margin {
            eprintln!("worst {key:<30} {margin:+.3e}");
        }
        for t in summary.details.iter().filter(|t| !t.passed()) {
            eprintln!("trial seed {} failed:", t.seed);
            t.reports.iter().filter(|r| !r.pass).for_each(log_report);
        }
    }
    eprintln!(
        "{} trials at m={}: {} failures",
        summary.trials, summary.m, summary.failures
    );
    emit(
        args.out.as_deref(),
        &FuzzSummaryJson::new(&summary, args.seed),
    )?;
    Ok(summary.failures == 0)
}

pub fn cmd_quasifree(args: &QuasifreeArgs, verbose: bool) -> Result<bool, Error> {
    check_tol(args.tol)?;
    if args.max_points == 0 || args.max_points > MAX_POINTS_CAP {
        return Err(Error::Invalid(format!(
            "--max-points must be in 1..={MAX_POINTS_CAP}, got {}",
            args.max_points
        )));
    }
    let input = parse_check_input(&std::fs::read_to_string(&args.input)?)?;
    let (spec, density) = build_quasifree(&input.gamma)?;
    let pdm1_max_dev = max_abs_diff(&pdm1_from_density(&density).0, &input.gamma.0);
    let wick_max_dev = verify_quasifree(&density, &spec, args.max_points)?;
    let report = QuasifreeReport {
        pdm1_max_dev,
        wick_max_dev,
        points_checked: quasifree_words(spec.m, args.max_points).len(),
    };
    if verbose {
        eprintln!("eigenvalues {:?}", spec.lambdas);
        eprintln!(
            "pdm1 deviation {pdm1_max_dev:.3e}, Wick deviation {wick_max_dev:.3e} over {} words",
            report.points_checked
        );
    }
    let pass = pdm1_max_dev <= args.tol && wick_max_dev <= args.tol;
    let out = QuasifreeOutput {
        density: ElementJson::from(density.element()),
        report,
    };
    emit(args.out.as_deref(), &out)?;
    Ok(pass)
}

pub fn cmd_selftest(args: &SelftestArgs, verbose: bool) -> Result<bool, Error> {
    if args.m == 0 || args.m > SELFTEST_MAX_MODES {
        return Err(Error::ModeCount {
            m: args.m,
            max: SELFTEST_MAX_MODES,
        });
    }
    let side = if args.flip_sign {
        DerivativeSide::Right
    } else {
        DerivativeSide::Left
    };
    let results = run_selftest(side, args.m, args.seed)?;
    if verbose {
        for r in &results {
            eprintln!(
                "{} {:<24} max dev {:.3e}",
                if r.passed { "PASS" } else { "FAIL" },
                r.label(),
                r.max_dev
            );
        }
    }
    match first_failure(&results) {
        Some(r) => {
            eprintln!(
                "selftest FAILED at {} (max dev {:.3e})",
                r.label(),
                r.max_dev
            );
            Ok(false)
        }
        None => {
            eprintln!("selftest passed: {} identities", results.len());
            Ok(true)
        }
    }
}
