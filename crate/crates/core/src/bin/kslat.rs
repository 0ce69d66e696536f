use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = kslat::cli::run(std::env::args_os());
    // A closed pipe (e.g. `| head`) is not an error of ours.
    let _ = writeln!(std::io::stdout().lock(), "{}", outcome.output);
    ExitCode::from(outcome.exit_code)
}
