use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lindblad2::cli::run(std::env::args()) as u8)
}
