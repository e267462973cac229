use std::process::ExitCode;

fn main() -> ExitCode {
    // Engine invariant violations panic; surface them as exit code 2.
    let result = std::panic::catch_unwind(|| qschubert::cli::main_entry(std::env::args()));
    match result {
        Ok(code) => ExitCode::from(u8::try_from(code).unwrap_or(2)),
        Err(_) => ExitCode::from(2),
    }
}
