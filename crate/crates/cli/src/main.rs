use std::process::ExitCode;

use clap::Parser;
use subeig_cli::{execute, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match execute(&args, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(report) if report.all_converged() => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
