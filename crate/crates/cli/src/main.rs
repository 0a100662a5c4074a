use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use pmadm_cli::{execute, Cli, CliError, Output, EXIT_INPUT};

fn emit(out: Output) -> Result<(), CliError> {
    match out.path {
        Some(path) => std::fs::write(&path, out.text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(out.text.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli).and_then(emit) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pmadm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
