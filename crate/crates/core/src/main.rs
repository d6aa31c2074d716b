use std::process::ExitCode;

fn main() -> ExitCode {
    match slabguide::cli::run_from_env() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slabguide: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
