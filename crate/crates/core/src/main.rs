use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = pcsp_lab::cli::run(std::env::args_os());
    let written = if outcome.code == pcsp_lab::cli::EXIT_USAGE {
        std::io::stderr().write_all(outcome.report.as_bytes())
    } else {
        std::io::stdout().write_all(outcome.report.as_bytes())
    };
    if written.is_err() {
        return ExitCode::from(pcsp_lab::cli::EXIT_USAGE as u8);
    }
    ExitCode::from(outcome.code as u8)
}
