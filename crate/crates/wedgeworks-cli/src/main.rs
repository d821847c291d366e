//! Command-line driver: spectra, detector responses and diagnostics.

mod config;
mod output;
mod scenarios;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{Format, Params, Resolved, Scenario};
use output::{Report, Table};

#[derive(Parser)]
#[command(name = "wedgeworks", version, about = "Vacuum spectra and detector responses for superposed accelerated frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conditional particle spectra (default scenario rindler-spectrum).
    Spectrum(RunArgs),
    /// Detector response curves (default scenario desitter-response).
    Response(RunArgs),
    /// Fit an effective KMS temperature to a response curve given by --input.
    KmsCheck(RunArgs),
    /// Compare closed-form coefficients with Klein–Gordon quadrature.
    Oracle(RunArgs),
    /// Run built-in consistency checks.
    Selftest(RunArgs),
    /// Run the scenario named in a config file.
    Run(RunArgs),
    /// Check a configuration without running it.
    Validate(RunArgs),
    #[command(hide = true)]
    SpecfunSelftest(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat JSON config whose keys mirror the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Output format; inferred from the output extension, csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("{0}")]
    Convergence(String),
}

const EXIT_OTHER: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return match f {
                Failure::Validation(_) => EXIT_VALIDATION,
                Failure::Convergence(_) => EXIT_CONVERGENCE,
            };
        }
        if let Some(e) = cause.downcast_ref::<wedgeworks::Error>() {
            return match e {
                wedgeworks::Error::NoConvergence { .. } => EXIT_CONVERGENCE,
                wedgeworks::Error::Domain(_)
                | wedgeworks::Error::PacketWidth { .. }
                | wedgeworks::Error::Dimension { .. }
                | wedgeworks::Error::Degenerate { .. } => EXIT_VALIDATION,
                _ => EXIT_OTHER,
            };
        }
    }
    EXIT_OTHER
}

fn allowed(cmd: &Command, s: Scenario) -> bool {
    match cmd {
        Command::Spectrum(_) => s.is_spectrum(),
        Command::Response(_) => s.is_response(),
        Command::KmsCheck(_) => s == Scenario::KmsCheck,
        Command::Oracle(_) => s == Scenario::Oracle,
        Command::Selftest(_) | Command::SpecfunSelftest(_) => s == Scenario::Selftest,
        Command::Run(_) | Command::Validate(_) => true,
    }
}

fn resolve(cmd: &Command, args: &RunArgs) -> anyhow::Result<Resolved> {
    let file = args
        .config
        .as_deref()
        .map(Params::from_file)
        .transpose()
        .map_err(|e| Failure::Validation(vec![format!("{e:#}")]))?;
    let default = match cmd {
        Command::Spectrum(_) => Some(Scenario::RindlerSpectrum),
        Command::Response(_) => Some(Scenario::DesitterResponse),
        Command::KmsCheck(_) => Some(Scenario::KmsCheck),
        Command::Oracle(_) => Some(Scenario::Oracle),
        Command::Selftest(_) | Command::SpecfunSelftest(_) => Some(Scenario::Selftest),
        Command::Run(_) | Command::Validate(_) => None,
    };
    let (resolved, mut violations) = config::resolve(args.params.clone(), file, default);
    if let Some(r) = &resolved {
        if !allowed(cmd, r.scenario) {
            violations.push(format!("scenario {} is not available for this command", r.scenario.name()));
        }
    }
    match resolved {
        Some(r) if violations.is_empty() => Ok(r),
        _ => Err(Failure::Validation(violations).into()),
    }
}

/// Failures that still produce a report: oracle deviations and failed checks.
fn verdict(report: &Report) -> Option<String> {
    match &report.table {
        Table::Oracle(rows) => {
            let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
            (worst > scenarios::ORACLE_TOL)
                .then(|| format!("oracle deviation {worst:e} exceeds {:e}", scenarios::ORACLE_TOL))
        }
        Table::Check(rows) => {
            let failed: Vec<&str> = rows.iter().filter(|c| !c.pass).map(|c| c.check.as_str()).collect();
            (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", ")))
        }
        _ => None,
    }
}

fn execute(cmd: Command) -> anyhow::Result<()> {
    let args = match &cmd {
        Command::Spectrum(a)
        | Command::Response(a)
        | Command::KmsCheck(a)
        | Command::Oracle(a)
        | Command::Selftest(a)
        | Command::Run(a)
        | Command::Validate(a)
        | Command::SpecfunSelftest(a) => a,
    };
    let resolved = resolve(&cmd, args)?;
    if let Command::Validate(_) = cmd {
        println!("ok: {}", resolved.scenario.name());
        return Ok(());
    }
    let start = Instant::now();
    let report = match cmd {
        Command::SpecfunSelftest(_) => scenarios::selftest(&resolved, true)?,
        _ => scenarios::run(&resolved)?,
    };
    let format = output::format_for(args.output.as_deref(), args.format);
    let bytes = output::render(&report, format)?;
    match &args.output {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    eprintln!(
        "{}: {} rows in {:.3} s",
        report.meta.scenario,
        report.table.len(),
        start.elapsed().as_secs_f64()
    );
    if let Some(msg) = verdict(&report) {
        return Err(Failure::Convergence(msg).into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
