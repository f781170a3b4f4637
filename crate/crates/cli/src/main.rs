mod args;
mod commands;
mod error;
mod report;
mod source;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::report::write_file;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::run(&cli).and_then(|report| {
        let json = report.to_json()?;
        if let Some(path) = &cli.report {
            write_file(path, &json)?;
        }
        let text = if cli.json { json } else { report.to_text() };
        // a closed pipe is not worth a panic
        let _ = std::io::stdout().write_all(text.as_bytes());
        Ok(())
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.json {
                eprintln!("{}", e.to_json());
            } else {
                eprintln!("error ({}): {e}", e.kind());
            }
            ExitCode::from(e.exit_code())
        }
    }
}
