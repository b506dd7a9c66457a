//! Batch driver for the `vrvw` library: identity checks, solves, `t`-scans
//! and bound/index tables.
//!
//! Exit codes: 0 success, 1 verification failure, 2 solver non-convergence,
//! 64 usage or configuration error.

pub mod checks;
pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use vrvw::bounds::{self, BoundsParams};
use nalgebra::Matrix3;
use vrvw::algebra;

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] vrvw::Error),
}

#[derive(Parser, Debug)]
#[command(name = "vrvw-cli", version, about = "Lattice checks, solves and bound tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the pointwise algebra identities on random samples.
    VerifyAlgebra {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check discrete adjointness, Weitzenböck, Chern-Weil, Taylor and gradient identities.
    VerifyOperators {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        h: f64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve the configured problem; writes fields and a JSON report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Homogeneous solves over log-spaced t, tabulated against the bounds.
    ScanT {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Evaluate the a priori bounds as JSON.
    Bounds {
        #[arg(long)]
        t: f64,
        /// λ_τ directly; alternatively give --tau.
        #[arg(long, conflicts_with = "tau")]
        lambda_tau: Option<f64>,
        /// Row-major 3×3 perturbation matrix, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        tau: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0)]
        lambda_x: f64,
        #[arg(long)]
        vol: f64,
        /// Characteristic number κ of the bundle.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        m: f64,
    },
    /// Evaluate the index formula as JSON.
    Index {
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long)]
        b1: i64,
        #[arg(long)]
        b2plus: i64,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::VerifyAlgebra { trials, seed } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            let results = checks::verify_algebra(trials, seed, &checks::AlgebraOps::default());
            report_checks(&results, out, err)
        }
        Command::VerifyOperators { n, h, trials, seed } => {
            if trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            let results = checks::verify_operators(n, h, trials, seed)?;
            report_checks(&results, out, err)
        }
        Command::Solve { config, out: field_path, report } => {
            let cfg = RunConfig::load(&config)?;
            let (c, rep) = commands::run_solve(&cfg)?;
            commands::write_solution(&field_path, &c)?;
            std::fs::write(&report, commands::to_json(&rep))?;
            writeln!(
                out,
                "reason={} iterations={} residual_l2={:e} wall_time_s={:.1}",
                rep.reason, rep.iterations, rep.residual_l2, rep.wall_time_s
            )?;
            Ok(if rep.converged() { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }
        Command::ScanT { config, t_min, t_max, steps, csv } => {
            let cfg = RunConfig::load(&config)?;
            let ts = commands::log_grid(t_min, t_max, steps)?;
            let rows = commands::scan_t(&cfg, &ts)?;
            let mut buf = Vec::new();
            commands::write_scan_csv(&rows, &mut buf)?;
            std::fs::write(&csv, buf)?;
            let converged = rows.iter().filter(|r| r.converged).count();
            writeln!(out, "{converged}/{} rows converged", rows.len())?;
            Ok(if converged > 0 { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }
        Command::Bounds { t, lambda_tau, tau, lambda_x, vol, m } => {
            let lt = match (lambda_tau, tau) {
                (Some(l), None) => l,
                (None, Some(v)) if v.len() == 9 => algebra::lambda_tau(&Matrix3::from_row_slice(&v)),
                (None, Some(v)) => return Err(CliError::Usage(format!("--tau needs 9 values, got {}", v.len()))),
                _ => return Err(CliError::Usage("give exactly one of --lambda-tau and --tau".into())),
            };
            let bp = BoundsParams::new(t, lt, lambda_x, vol, m)?;
            write!(out, "{}", commands::to_json(&bounds::report(&bp)?))?;
            Ok(EXIT_OK)
        }
        Command::Index { kappa, b1, b2plus } => {
            write!(out, "{}", commands::to_json(&commands::index_report(kappa, b1, b2plus)?))?;
            Ok(EXIT_OK)
        }
    }
}

fn report_checks(results: &[checks::IdentityCheck], out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    for c in results {
        let status = if c.pass() { "PASS" } else { "FAIL" };
        writeln!(out, "{:<24} max_error={:.3e} tol={:.0e} {status}", c.name, c.max_error, c.tol)?;
    }
    let failed: Vec<_> = results.iter().filter(|c| !c.pass()).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "identity failed: {}", failed.join(", "))?;
        Ok(EXIT_VERIFICATION)
    }
}
