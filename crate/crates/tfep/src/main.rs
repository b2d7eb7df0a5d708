use std::process::ExitCode;

fn main() -> ExitCode {
    tfep::cli::main()
}
