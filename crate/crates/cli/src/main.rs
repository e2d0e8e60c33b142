use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use compat_cli::args::Cli;
use compat_cli::{commands, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    let done = commands::run(&cli.command);
    println!("{}", serde_json::to_string_pretty(&done.report).expect("JSON values serialize"));
    ExitCode::from(done.code)
}
