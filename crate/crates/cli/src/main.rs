//! `biframe` command-line verifier.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use biframe_core::{run_paper_examples, run_property_suite, run_scenario, RunOptions, RunReport, SuiteParams};

#[derive(Debug, Parser)]
#[command(name = "biframe", version)]
#[command(about = "Classify and verify continuous biframes in finite-dimensional spaces")]
struct Cli {
    /// Override the Parseval tolerance (‖T − I‖ bound).
    #[arg(long, global = true, value_parser = positive_f64)]
    tolerance_parseval: Option<f64>,

    /// Override the relative positivity tolerance.
    #[arg(long, global = true, value_parser = positive_f64)]
    tolerance_positivity: Option<f64>,

    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Treat disagreement with a printed claim as failure.
    #[arg(long, global = true)]
    strict_paper: bool,

    /// Run independent fixtures and trials concurrently.
    #[arg(long, global = true)]
    parallel: bool,

    /// Standard output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the checks of a scenario file.
    Analyze {
        file: PathBuf,
    },
    /// Re-check the built-in worked examples.
    PaperExamples,
    /// Run every invariant on seeded random instances.
    Properties {
        #[arg(long, default_value_t = 42)]
        seed: u64,

        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,

        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(2..=64))]
        max_dim: u64,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err("must be finite and positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let options = RunOptions {
        parseval: cli.tolerance_parseval,
        positivity: cli.tolerance_positivity,
        strict_paper: cli.strict_paper,
        parallel: cli.parallel,
    };
    let report = match &cli.command {
        Command::Analyze { file } => run_scenario(file, &options).map_err(|e| e.to_string()),
        Command::PaperExamples => Ok(run_paper_examples(&options)),
        Command::Properties { seed, trials, max_dim } => {
            let params = SuiteParams {
                seed: *seed,
                trials: *trials as usize,
                max_dim: *max_dim as usize,
            };
            run_property_suite(params, &options).map_err(|e| e.to_string())
        }
    };
    match report {
        Ok(report) => emit(&cli, &report),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, report: &RunReport) -> ExitCode {
    let json = report.to_json();
    match cli.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{json}"),
    }
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code as u8)
}
