use std::process::ExitCode;

use clap::Parser;
use dte_cli::commands::print_line;
use dte_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                if let Err(e) = print_line(&p.display().to_string()) {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
