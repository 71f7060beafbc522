//! Command-line front end.
//!
//! Each command writes its report to the supplied sink and returns a process
//! exit code, so the commands can be driven from tests without spawning the
//! binary. Exit codes: 0 success, 1 selftest failure, 2 input error,
//! 3 state-invariant violation.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::detect::analyze;
use crate::error::{Error, Result};
use crate::measures::{total_variance, von_neumann_entropy, QRoutes};
use crate::numfmt;
use crate::qstate::io::{read_bipartite, read_density};
use crate::specfun::MonotoneFunctionSpec;

mod selftest;
mod sweep;

pub use selftest::{run_selftest, Fault, SelftestReport, SuiteReport};
pub use sweep::{run_sweep, write_sweep_csv, Family, ParamGrid, ResultRow, SweepConfig, SweepOutput, SweepTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILURE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_INVARIANT_VIOLATION: i32 = 3;

/// Slack on the `0 <= Q^f <= n - 1` bounds check.
const BOUNDS_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "skewinfo", version, about = "Skew information, quantum uncertainty and entanglement detectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total uncertainty Q^f of a state by three independent routes.
    Uncertainty {
        #[arg(long)]
        state: PathBuf,
        #[arg(long = "f", value_parser = parse_spec)]
        spec: MonotoneFunctionSpec,
    },
    /// Correlation and entanglement detectors of a bipartite state.
    Detect {
        #[arg(long)]
        state: PathBuf,
        /// Subsystem dimensions as `m,n`.
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long = "f", value_parser = parse_spec)]
        spec: MonotoneFunctionSpec,
    },
    /// Evaluate outputs over a parametric state family and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in property suites.
    Selftest {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
}

fn parse_spec(s: &str) -> std::result::Result<MonotoneFunctionSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (m, n) = s.split_once(',').ok_or_else(|| format!("expected `m,n`, got `{s}`"))?;
    let m: usize = m.trim().parse().map_err(|_| format!("bad dimension `{m}`"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad dimension `{n}`"))?;
    if m == 0 || n == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok((m, n))
}

/// Exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_state_invariant() {
        EXIT_INVARIANT_VIOLATION
    } else {
        EXIT_INPUT_ERROR
    }
}

/// Dispatch a parsed command line.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Uncertainty { state, spec } => cmd_uncertainty(state, *spec, out),
        Command::Detect { state, dims, spec } => cmd_detect(state, *dims, *spec, out),
        Command::Sweep { config, out: path } => cmd_sweep(config, path, out),
        Command::Selftest { seed, inject_fault } => {
            return match cmd_selftest(*seed, *inject_fault, out) {
                Ok(code) => code,
                Err(e) => report_error(&e, err),
            };
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e, err),
    }
}

fn report_error(e: &Error, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    exit_code(e)
}

#[derive(Debug, Serialize)]
struct UncertaintyReport {
    dim: usize,
    spec: String,
    q_basis: f64,
    q_spectral: f64,
    q_tilde: f64,
    max_deviation: f64,
    entropy: f64,
    total_variance: f64,
    upper_bound: f64,
    within_bounds: bool,
}

pub fn cmd_uncertainty(state: &Path, spec: MonotoneFunctionSpec, out: &mut dyn Write) -> Result<()> {
    let rho = read_density(state)?;
    let q = QRoutes::compute(spec, &rho)?;
    let n = rho.dim();
    let upper = n as f64 - 1.0;
    let within = [q.basis, q.spectral, q.tilde].iter().all(|&v| v >= -BOUNDS_TOL && v <= upper + BOUNDS_TOL);
    let report = UncertaintyReport {
        dim: n,
        spec: spec.to_string(),
        q_basis: q.basis,
        q_spectral: q.spectral,
        q_tilde: q.tilde,
        max_deviation: q.max_deviation(),
        entropy: von_neumann_entropy(&rho),
        total_variance: total_variance(&rho),
        upper_bound: upper,
        within_bounds: within,
    };
    writeln!(out, "{}", numfmt::to_json_pretty(&report)?)?;
    Ok(())
}

pub fn cmd_detect(state: &Path, dims: (usize, usize), spec: MonotoneFunctionSpec, out: &mut dyn Write) -> Result<()> {
    let st = read_bipartite(state, Some(dims))?;
    let report = analyze(spec, &st)?;
    writeln!(out, "{}", numfmt::to_json_pretty(&report)?)?;
    Ok(())
}

pub fn cmd_sweep(config: &Path, out_path: &Path, out: &mut dyn Write) -> Result<()> {
    let cfg = SweepConfig::read(config)?;
    let table = run_sweep(&cfg)?;
    write_sweep_csv(out_path, &table)?;
    writeln!(out, "wrote {} rows to {}", table.rows.len(), out_path.display())?;
    Ok(())
}

/// Runs the suites and prints the summary. Returns the exit code.
pub fn cmd_selftest(seed: u64, fault: Option<Fault>, out: &mut dyn Write) -> Result<i32> {
    let report = run_selftest(seed, fault);
    write!(out, "{report}")?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_SELFTEST_FAILURE })
}
