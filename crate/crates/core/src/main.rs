use std::io::Write;

fn main() {
    let outcome = witt::cli::run(std::env::args_os());
    // A closed pipe on stdout is not an error worth reporting.
    let _ = writeln!(std::io::stdout(), "{}", outcome.stdout);
    std::process::exit(outcome.code);
}
