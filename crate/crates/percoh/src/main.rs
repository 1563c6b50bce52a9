//! Command-line front end: parse a session document, run its commands, and
//! print reports.
//!
//! Exit codes: 0 on success, 1 when an asserted property is false, 2 for
//! malformed input, 3 when the mathematics is unsupported (non-CM ring,
//! undeclared generic point, unusable perversity) or a certificate fails.

use clap::{Parser, Subcommand, ValueEnum};
use percoh::report::{
    emit_human, emit_structured_many, run_command, run_selected, run_session, Failure, RunOutcome,
};
use percoh::session::{parse_input, Command, SessionDocument};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Writes to stdout, exiting quietly if the reader went away (e.g. the
/// output is piped into `head`).
fn emit(text: &str) {
    if std::io::stdout().write_all(text.as_bytes()).is_err() {
        std::process::exit(0);
    }
}

#[derive(Parser)]
#[command(
    name = "percoh",
    version,
    about = "Certified perverse coherent truncations over affine coordinate rings"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a session document and report what it declares.
    Validate { file: PathBuf },
    /// Execute the commands in a session document, in order.
    Run {
        file: PathBuf,
        /// Output format; json is the stable machine interface.
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        /// Run only the n-th command of the document (1-based).
        #[arg(long)]
        only: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Human,
    Json,
}

fn load(file: &PathBuf) -> Result<SessionDocument, ExitCode> {
    let text = std::fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", file.display());
        ExitCode::from(2)
    })?;
    parse_input(&text).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(e.exit_code() as u8)
    })
}

fn print_outcome(outcome: &RunOutcome, format: Format) -> ExitCode {
    match format {
        Format::Json => {
            emit(&emit_structured_many(&outcome.reports));
            emit("\n");
        }
        Format::Human => {
            for r in &outcome.reports {
                emit(&emit_human(r));
            }
        }
    }
    match &outcome.failure {
        None => ExitCode::SUCCESS,
        Some(Failure::Assert { line }) => {
            eprintln!("error: asserted property at line {line} is false");
            ExitCode::from(1)
        }
        Some(Failure::Module { line, command, error }) => {
            eprintln!("error (line {line}, `{command}`): {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Validate { file } => {
            let doc = match load(&file) {
                Ok(doc) => doc,
                Err(code) => return code,
            };
            match run_command(&doc, 0, &Command::Validate) {
                Ok(report) => {
                    print!("{}", emit_human(&report));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Cmd::Run { file, format, only } => {
            let doc = match load(&file) {
                Ok(doc) => doc,
                Err(code) => return code,
            };
            let outcome = match only {
                None => run_session(&doc),
                Some(n) => {
                    let Some(chosen) = n.checked_sub(1).and_then(|i| doc.commands.get(i)) else {
                        eprintln!(
                            "error: --only {n} is out of range; the document has {} commands",
                            doc.commands.len()
                        );
                        return ExitCode::from(2);
                    };
                    run_selected(&doc, std::slice::from_ref(chosen))
                }
            };
            print_outcome(&outcome, format)
        }
    }
}
