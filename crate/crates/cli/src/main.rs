use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use masspcg_cli::experiments::run;
use masspcg_cli::{exit, ExperimentRequest};

fn main() -> ExitCode {
    let req = match ExperimentRequest::parse_from(std::env::args_os()) {
        Ok(req) => req,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::USAGE),
            };
        }
    };

    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    let mut stderr = io::stderr();
    let code = match run(&req, &mut stdout, &mut stderr) {
        Ok(outcome) => outcome.exit_code(),
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.exit_code()
        }
    };
    let _ = stdout.flush();
    ExitCode::from(code)
}
