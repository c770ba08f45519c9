use std::process::ExitCode;

fn main() -> ExitCode {
    spex::cli::main_with_args(std::env::args_os())
}
