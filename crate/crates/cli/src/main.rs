use std::process::ExitCode;

use causal_control_cli::{run, Cli, EXIT_VERIFY_FAILED};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors share the validation exit status; 2 means a
            // failed verification.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if outcome.failed {
                ExitCode::from(EXIT_VERIFY_FAILED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
