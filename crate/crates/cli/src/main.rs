//! `bmv`: run the mediation protocols, the observable-count analysis, or the
//! full acceptance check.
//!
//! Exit codes: 0 all expectations met, 1 mismatch, 2 usage error, 3 I/O error.

mod report;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bmv_core::bit_antibit::{self, DEFAULT_MEDIATOR_BITS};
use bmv_core::fermion_ssr::{self, MAX_COUNT_MODES};
use bmv_core::ising_anyon;
use bmv_core::verify;
use bmv_core::EPS;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::{Decomposability, RunReport, StepExtras, TomographyReport, VerifyReport};

const MAX_EPS: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "bmv",
    version,
    about = "Entanglement mediated by locally classical systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one protocol and check it against its expected values.
    Run(RunArgs),
    /// Count physical observables per mode count and test decomposability.
    Tomography(TomographyArgs),
    /// Run every acceptance criterion.
    VerifyAll(OutputArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Fermion,
    Anyon,
    Bitantibit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Comparison tolerance, in (0, 1e-6].
    #[arg(long, env = "BMV_EPS")]
    eps: Option<f64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(
        value_enum,
        required_unless_present = "model_flag",
        conflicts_with = "model_flag"
    )]
    model: Option<Model>,

    #[arg(long = "model", value_enum, id = "model_flag")]
    model_flag: Option<Model>,

    /// Mediator bits for the bit/anti-bit model (2 to 6).
    #[arg(long, default_value_t = DEFAULT_MEDIATOR_BITS as u32, value_parser = clap::value_parser!(u32).range(2..=6))]
    mediator_bits: u32,

    /// Include every intermediate state in the report.
    #[arg(long)]
    trace_steps: bool,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct TomographyArgs {
    /// Largest mode count to enumerate (at most 5).
    #[arg(long, default_value_t = 4)]
    k_max: usize,

    #[command(flatten)]
    output: OutputArgs,
}

enum Failure {
    Usage(String),
    Io(String),
    Internal(String),
}

impl From<bmv_core::Error> for Failure {
    fn from(e: bmv_core::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn resolve_eps(eps: Option<f64>) -> Result<f64, Failure> {
    let eps = eps.unwrap_or(EPS);
    if eps > 0.0 && eps <= MAX_EPS {
        Ok(eps)
    } else {
        Err(Failure::Usage(format!(
            "eps must lie in (0, {MAX_EPS:e}], got {eps:e}"
        )))
    }
}

fn render<T: Serialize>(
    report: &T,
    format: Format,
    csv: impl FnOnce() -> Result<Vec<u8>, csv::Error>,
    text: impl FnOnce() -> String,
) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let mut bytes =
                serde_json::to_vec_pretty(report).map_err(|e| Failure::Internal(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => csv().map_err(|e| Failure::Internal(e.to_string())),
        Format::Text => Ok(text().into_bytes()),
    }
}

fn emit(bytes: &[u8], out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

fn cmd_run(args: &RunArgs) -> Result<bool, Failure> {
    let eps = resolve_eps(args.output.eps)?;
    let model = args
        .model
        .or(args.model_flag)
        .expect("clap requires a model");
    let report = match model {
        Model::Fermion => {
            let trace = fermion_ssr::run_fermion_protocol()?;
            let expected = verify::fermion_expectations(&trace, eps);
            RunReport::new(&trace, StepExtras::None, expected, args.trace_steps)
        }
        Model::Anyon => {
            let run = ising_anyon::run_anyon_protocol_detailed()?;
            let expected = verify::anyon_expectations(&run, eps);
            RunReport::new(
                &run.trace,
                StepExtras::Anyon(&run.checkpoints),
                expected,
                args.trace_steps,
            )
        }
        Model::Bitantibit => {
            let run = bit_antibit::run_bit_antibit_protocol_with(args.mediator_bits as usize)?;
            let expected = verify::bit_antibit_expectations(&run, eps);
            RunReport::new(
                &run.trace,
                StepExtras::BitAntibit(&run),
                expected,
                args.trace_steps,
            )
        }
    };
    let bytes = render(
        &report,
        args.output.format,
        || report.to_csv(),
        || report.to_text(),
    )?;
    emit(&bytes, &args.output.out)?;
    Ok(report.pass)
}

fn cmd_tomography(args: &TomographyArgs) -> Result<bool, Failure> {
    let eps = resolve_eps(args.output.eps)?;
    if args.k_max == 0 {
        return Err(Failure::Usage("k-max must be at least 1".into()));
    }
    if args.k_max > MAX_COUNT_MODES {
        return Err(Failure::Usage(format!(
            "state space too large: k-max {} exceeds {MAX_COUNT_MODES}",
            args.k_max
        )));
    }
    let rows = fermion_ssr::count_scaling_check(args.k_max)?;
    let span = fermion_ssr::decomposability_check();
    let pass = rows.iter().all(|r| r.matches) && span.residual > eps;
    let report = TomographyReport {
        rows,
        decomposability: Decomposability {
            target: "f2 f3 + f3^dag f2^dag",
            residual: span.residual,
            decomposable: span.decomposable,
        },
        pass,
    };
    let bytes = render(
        &report,
        args.output.format,
        || report.to_csv(),
        || report.to_text(),
    )?;
    emit(&bytes, &args.output.out)?;
    Ok(pass)
}

fn cmd_verify_all(args: &OutputArgs) -> Result<bool, Failure> {
    let eps = resolve_eps(args.eps)?;
    let criteria = verify::verify_all(eps)?;
    let pass = criteria.iter().all(|c| c.pass);
    let report = VerifyReport {
        eps,
        criteria,
        pass,
    };
    let bytes = render(
        &report,
        args.format,
        || report.to_csv(),
        || report.to_text(),
    )?;
    emit(&bytes, &args.out)?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Tomography(args) => cmd_tomography(args),
        Command::VerifyAll(args) => cmd_verify_all(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
