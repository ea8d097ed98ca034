//! Command-line front end. `main.rs` only forwards to [`main_with_args`].
//!
//! Exit codes: 0 all checks passed, 2 a check failed, 3 input error,
//! 4 numerical non-convergence.

mod commands;
mod report;
mod suite;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{json_number, Entry, Inputs, Provenance, Report, ResidualRow};
pub use suite::{run_suite, Criterion};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "axired", version, about = "Rotational Killing reduction of 3+1 metrics and checks of the reduced system")]
pub struct Cli {
    /// Seed for the quasi-random sample points.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Number of sample points for residual checks.
    #[arg(long, global = true, default_value_t = 20)]
    pub samples: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    /// Catalog metric: minkowski, schwarzschild, kerr, schwarzschild-spatial.
    #[arg(long, conflicts_with = "metric_file")]
    pub metric: Option<String>,
    /// Metric in the plain-text catalog format.
    #[arg(long)]
    pub metric_file: Option<PathBuf>,
    /// Schwarzschild mass parameter.
    #[arg(long)]
    pub m: Option<f64>,
    /// Kerr mass parameter.
    #[arg(long = "M")]
    pub big_m: Option<f64>,
    /// Kerr spin parameter.
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Vacuum,
    Reduced,
    Ewm,
    Conformal,
    Twist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerdictArg {
    Convergent,
    LogDivergent,
    PowerDivergent,
    Inconclusive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a metric along its rotational Killing field.
    Reduce {
        #[command(flatten)]
        metric: MetricArgs,
        /// Replace g by e^{2u} g.
        #[arg(long)]
        conformal: bool,
        /// Tolerance for the reconstruction residual.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Residual checks on a metric and its reduction.
    Verify {
        #[command(flatten)]
        metric: MetricArgs,
        /// Checks to run (repeatable); all of them by default.
        #[arg(long, value_enum)]
        check: Vec<Check>,
        /// Override every residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Cutoff energies of the reduced wave map and their growth in R.
    Energy {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, default_value_t = 3.0)]
        r0: f64,
        /// Comma-separated cutoff radii.
        #[arg(long, value_delimiter = ',', default_values_t = default_radii())]
        rmax_list: Vec<f64>,
        /// Angular cutoff: theta in [eps, pi - eps].
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        eps: f64,
        /// Scalar field (flat target) for a 2+1 metric given directly.
        #[arg(long)]
        field: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        residual_tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        cauchy_tol: f64,
        /// Fail unless the verdict is this one.
        #[arg(long, value_enum)]
        expect: Option<VerdictArg>,
        /// Write the (R, E) curve here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Solve the equivariant Hamiltonian constraint.
    Constraint {
        #[arg(long, default_value = "gaussian_bump")]
        profile: String,
        #[arg(long, default_value_t = 0.1)]
        amp: f64,
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        /// sphere (f = sin u) or hyperbolic (f = sinh u).
        #[arg(long, default_value = "sphere")]
        target: String,
        /// Relative tolerance for the ODE-vs-quadrature energy identity.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write r, chi, gamma, energy_density here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// ADM mass of an asymptotically flat 3-metric in Cartesian components.
    Adm {
        #[command(flatten)]
        metric: MetricArgs,
        /// Fail unless the mass matches this value.
        #[arg(long)]
        expect: Option<f64>,
        /// Relative tolerance for --expect (absolute when the expected value is 0).
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Run every acceptance criterion and print one line per criterion.
    #[command(alias = "paper-suite")]
    Suite,
}

fn default_radii() -> Vec<f64> {
    [2.0, 2.5, 3.0, 3.5, 4.0].iter().map(|k| 10f64.powf(*k)).collect()
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::QuadratureNonConvergence(_) | Error::NonDecayingMetric(_) => EXIT_NONCONVERGENCE,
        _ => EXIT_INPUT,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("AXIRED_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, which is fine.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses `args`, runs the command, prints its output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    configure_threads();
    match run(&cli) {
        Ok(out) => {
            if let Some(text) = out.stdout {
                print!("{}", text);
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {}", e);
            exit_code(&e)
        }
    }
}

/// Parses and runs without printing. `args[0]` is the program name.
/// Usage errors and help requests come back as `Err((exit code, message))`.
pub fn run_args<I, T>(args: I) -> Result<Outcome, (i32, String)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)
        .map_err(|e| (if e.use_stderr() { EXIT_INPUT } else { EXIT_OK }, e.to_string()))?;
    run(&cli).map_err(|e| (exit_code(&e), e.to_string()))
}

/// Text to print and the exit code of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub stdout: Option<String>,
    pub code: i32,
}

pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    let ctx = commands::Context {
        seed: cli.seed,
        samples: cli.samples,
    };
    if let Command::Suite = cli.command {
        let (report, lines) = suite::run_suite(&ctx)?;
        return finish(cli, report, Some(lines));
    }
    let report = match &cli.command {
        Command::Reduce { metric, conformal, tol } => commands::reduce(&ctx, metric, *conformal, *tol)?,
        Command::Verify { metric, check, tol } => commands::verify(&ctx, metric, check, *tol)?,
        Command::Energy {
            metric,
            r0,
            rmax_list,
            eps,
            field,
            residual_tol,
            cauchy_tol,
            expect,
            csv,
        } => commands::energy(
            &ctx,
            metric,
            &commands::EnergyArgs {
                r0: *r0,
                radii: rmax_list.clone(),
                eps: *eps,
                field: field.clone(),
                residual_tol: *residual_tol,
                cauchy_tol: *cauchy_tol,
                expect: *expect,
                csv: csv.clone(),
            },
        )?,
        Command::Constraint {
            profile,
            amp,
            width,
            target,
            tol,
            csv,
        } => commands::constraint(&ctx, profile, *amp, *width, target, *tol, csv.as_deref())?,
        Command::Adm { metric, expect, tol } => commands::adm(&ctx, metric, *expect, *tol)?,
        Command::Suite => unreachable!(),
    };
    finish(cli, report, None)
}

fn finish(cli: &Cli, report: Report, lines: Option<String>) -> Result<Outcome, Error> {
    let code = if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED };
    let json = report.to_json();
    let stdout = match (&cli.out, lines) {
        (Some(path), lines) => {
            std::fs::write(path, json + "\n")?;
            Some(lines.unwrap_or_else(|| {
                format!("{}: {}\n", report.command, if report.pass { "PASS" } else { "FAIL" })
            }))
        }
        (None, Some(lines)) => Some(lines),
        (None, None) => Some(json + "\n"),
    };
    Ok(Outcome { report, stdout, code })
}
