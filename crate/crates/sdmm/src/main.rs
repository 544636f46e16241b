use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = sdmm::cli::Cli::parse();
    match sdmm::cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code().clamp(0, 255) as u8)
        }
    }
}
