//! Command-line front end: argument and config parsing, dispatch, and
//! serialization of results as CSV tables or single-line JSON documents.

mod config;
mod emit;
mod run;

pub use config::{
    from_params, parse_args, parse_config_text, Command, Format, Params, Parsed, RunConfig, Value,
};
pub use emit::{
    emit, emit_fresnel, emit_index, emit_modes, emit_profile, emit_trajectory, fmt_f64,
    Document, FresnelDocument, FresnelMetadata, FresnelRecord, GiMetadata, IndexDocument,
    IndexMetadata, IndexRecord, ModeRecord, ModesDocument, ModesMetadata, ProfileDocument,
    ProfileMetadata, ProfileRow, TrajectoryDocument, TrajectoryMetadata,
};
pub use run::{compute, render, DEFAULT_LAMBDA0, DEFAULT_S_TARGET, DEFAULT_TAIL_TOL};

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Redirects `--output` files into this directory, keeping the file name.
pub const OUTPUT_DIR_ENV: &str = "SLABGUIDE_OUTPUT_DIR";

pub fn run_from_env() -> Result<()> {
    run(std::env::args_os(), std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
}

/// Runs one invocation; `output_dir` plays the role of the environment override.
pub fn run<I, T>(args: I, output_dir: Option<PathBuf>) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match parse_args(args)? {
        Parsed::Info(text) => {
            print!("{text}");
            return Ok(());
        }
        Parsed::Run(cfg) => cfg,
    };
    let bytes = render(&cfg)?;
    match &cfg.output {
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(&bytes).and_then(|_| out.flush()) {
                // A closed reader (`| head`) is not a failure of the run.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
        Some(path) => write_exclusive(&resolve_output(path, output_dir.as_deref()), &bytes)?,
    }
    Ok(())
}

fn resolve_output(path: &Path, dir: Option<&Path>) -> PathBuf {
    match (dir, path.file_name()) {
        (Some(dir), Some(name)) => dir.join(name),
        _ => path.to_path_buf(),
    }
}

/// Writes through a sibling temporary file and renames it into place, so
/// readers never observe a partial document.
fn write_exclusive(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let result = std::fs::write(&tmp, bytes).and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_dir_keeps_file_name() {
        let p = resolve_output(Path::new("/a/b/out.csv"), Some(Path::new("/tmp/x")));
        assert_eq!(p, Path::new("/tmp/x/out.csv"));
        assert_eq!(resolve_output(Path::new("out.csv"), None), Path::new("out.csv"));
    }

    #[test]
    fn writes_file_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        write_exclusive(&path, b"abc").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"abc");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let missing = dir.path().join("nope").join("t.json");
        assert_eq!(write_exclusive(&missing, b"x").unwrap_err().exit_code(), 4);
    }
}
