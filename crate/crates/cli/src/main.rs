//! `gls`: sharp constants, GLS norms and inequality checks from the command
//! line. Exit status: 0 pass, 1 failed inequality check, 2 usage or domain
//! error, 3 numerical failure.

mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{read_config, Cli, Format};
use commands::{run, Failure, Outcome};

fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.report).unwrap_or_default();
            s.push('\n');
            s
        }
        Format::Csv => outcome.table.to_csv(),
        Format::Text => output::text_lines(&outcome.report),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let flags = match &cli.flags.config {
        Some(path) => match read_config(path) {
            Ok(file) => cli.flags.clone().merged_over(file),
            Err(e) => {
                eprintln!("gls: usage error: {e}");
                return ExitCode::from(2);
            }
        },
        None => cli.flags.clone(),
    };
    let format = flags.format.unwrap_or_default();
    let out = flags.out.clone();
    let outcome = match run(cli.command, flags) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("gls: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = render(&outcome, format);
    let written = match &out {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| format!("stdout: {e}")),
    };
    if let Err(e) = written {
        eprintln!("gls: {}", Failure::Usage(e));
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
