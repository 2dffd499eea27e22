mod cli;
mod commands;
mod report;
mod verify;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;
use szlab::LabError;

use cli::{Cli, Format};
use report::{ReportEnvelope, Timing};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

fn is_validation(e: &LabError) -> bool {
    matches!(
        e,
        LabError::NotPrime(_)
            | LabError::ModulusTooSmall(_)
            | LabError::Parse { .. }
            | LabError::InvalidPolynomial(_)
            | LabError::InvalidFamily(_)
            | LabError::InadmissibleThresholds(_)
            | LabError::NormTooLarge(_)
            | LabError::OrderOutOfRange(..)
            | LabError::NotOneBounded(..)
            | LabError::LengthMismatch { .. }
            | LabError::ExactTooLarge(..)
            | LabError::InvalidArgument(_)
    )
}

fn configure_threads(threads: Option<usize>) -> Result<usize, CliError> {
    #[cfg(feature = "parallel")]
    {
        if let Some(t) = threads {
            if t == 0 {
                return Err(CliError::Validation("--threads must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::Validation(e.to_string()))?;
        }
        Ok(rayon::current_num_threads())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(1)
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let name = cli.command.name();
    if cli.common.format == Format::Csv && !cli.command.supports_csv() {
        return Err(CliError::Validation(format!("`{name}` has no CSV output")));
    }
    let threads = configure_threads(cli.common.threads)?;
    let start = Instant::now();
    let outcome = commands::dispatch(&cli.common, &cli.command)?;
    let seconds = start.elapsed().as_secs_f64();
    report::validate_payload(name, &outcome.payload)
        .map_err(|e| CliError::Validation(format!("internal schema violation: {e}")))?;

    let text = match (cli.common.format, &outcome.csv) {
        (Format::Csv, Some(csv)) => csv.clone(),
        _ => {
            let mut config = serde_json::to_value(&cli.common).expect("config serializes");
            config["command"] = serde_json::to_value(&cli.command).expect("command serializes");
            let envelope = ReportEnvelope {
                tool: report::TOOL,
                version: report::VERSION,
                schema: report::schema_id(name),
                config,
                timing: Timing { seconds, threads },
                payload: outcome.payload,
            };
            let mut s = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
            s.push('\n');
            s
        }
    };
    match &cli.common.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(!outcome.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            let kind = match &e {
                CliError::Validation(_) => "validation",
                CliError::Lab(err) if is_validation(err) => "validation",
                CliError::Lab(_) => "computation",
                CliError::Io(_) => "io",
            };
            eprintln!("{}", json!({"error": kind, "message": e.to_string()}));
            ExitCode::from(2)
        }
    }
}
