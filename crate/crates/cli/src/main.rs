//! Command-line front end: parse a timed-automaton model file, run its
//! opacity checks, and emit a verdict report.
//!
//! Exit codes: 0 when every check is positive, 1 when any check is
//! negative, 2 on usage, parse, or configuration errors, 3 on internal
//! invariant failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use opacheck::report::{run_checks, RunOptions};

#[derive(Parser)]
#[command(name = "opacheck", version, about = "Opacity checker for timed-automaton models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model file and run the checks it declares
    Check {
        /// Model file (see the grammar reference in the README)
        file: PathBuf,
        /// Run only the named check
        #[arg(long)]
        only: Option<String>,
        /// Omit timing so identical inputs produce byte-identical reports
        #[arg(long)]
        stable: bool,
        /// Report format
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Maximum number of witnesses to print per check
        #[arg(long, default_value_t = 1)]
        witnesses: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    match std::panic::catch_unwind(run) {
        Ok(code) => ExitCode::from(code),
        Err(_) => {
            eprintln!("opacheck: internal invariant failure");
            ExitCode::from(3)
        }
    }
}

fn run() -> u8 {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            file,
            only,
            stable,
            format,
            witnesses,
        } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(text) => text,
                Err(e) => {
                    eprintln!("opacheck: {}: {e}", file.display());
                    return 2;
                }
            };
            let doc = match opacheck::parse_model(&text) {
                Ok(doc) => doc,
                Err(e) => {
                    eprintln!("opacheck: {}: {e}", file.display());
                    return 2;
                }
            };
            let options = RunOptions {
                only,
                stable,
                witness_limit: witnesses,
            };
            let report = match run_checks(&doc, &text, &options) {
                Ok(report) => report,
                Err(e) => {
                    eprintln!("opacheck: {}: {e}", file.display());
                    return 2;
                }
            };
            let rendered = match format {
                Format::Text => report.to_text(),
                Format::Json => match serde_json::to_string_pretty(&report) {
                    Ok(json) => json + "\n",
                    Err(e) => {
                        eprintln!("opacheck: failed to serialize report: {e}");
                        return 3;
                    }
                },
            };
            print!("{rendered}");
            if report.all_positive() {
                0
            } else {
                1
            }
        }
    }
}
