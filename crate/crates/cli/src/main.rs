//! `qsep` command-line front end. Exit codes: 0 success, 1 check failure,
//! 2 invalid input, 3 numerical failure. Failures print one JSON line on stderr.

mod args;
mod commands;
mod input;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use output::{CliResult, Failure};

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Scan(a) => commands::scan(a),
        Command::Threshold(a) => commands::threshold_cmd(a),
        Command::Trace(a) => commands::trace(a),
        Command::Tables => commands::tables(),
        Command::Check(a) => commands::check(a),
        Command::Convert(a) => commands::convert(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            let msg = first.trim_start_matches("error: ").trim().to_string();
            let f = Failure::Invalid(msg);
            eprintln!("{f}");
            return ExitCode::from(f.code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}
