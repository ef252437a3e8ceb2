use std::process::ExitCode;

use clap::Parser;
use mml_cli::{configure_policy, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_policy(cli.trunc).and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mml: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
