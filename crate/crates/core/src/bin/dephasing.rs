use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(dephasing_core::cli::run_from_args(
        std::env::args().collect(),
    ))
}
