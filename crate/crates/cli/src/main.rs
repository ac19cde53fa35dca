use std::process::ExitCode;

use scalefit_tool::{run, Clock};

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os(), &Clock::from_env()))
}
