mod args;
mod commands;
mod failure;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use failure::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let text = err.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            let failure = Failure::usage(first.trim_start_matches("error: "));
            eprintln!("{failure}");
            return failure.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Certify(a) => commands::certify_cmd(a),
        Command::Bound(a) => commands::bound_cmd(a),
        Command::SearchBound(a) => commands::search_cmd(a),
        Command::Family(a) => commands::family_cmd(a),
        Command::StateGen(a) => commands::state_gen_cmd(a),
    };
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(failure) => {
            eprintln!("{failure}");
            failure.exit_code()
        }
    }
}
