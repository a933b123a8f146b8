//! Command-line front end: configuration, mode dispatch and output.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

pub mod config;
pub mod modes;
pub mod table;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use config::{Flags, Format, Mode, ModelSpec, OutputSpec, Preset, RunConfig};
pub use modes::run_mode;
pub use table::Table;

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code for a library error: bad input is a configuration problem,
/// everything else a numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) => EXIT_CONFIG,
        Error::IterationLimit { .. } | Error::Divergence { .. } | Error::Singular(_) => EXIT_NUMERICAL,
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Runs a resolved configuration and writes its output.
pub fn execute(cfg: &RunConfig) -> Result<(), (i32, String)> {
    let table = run_mode(cfg).map_err(|e| {
        let code = exit_code(&e);
        let msg = if code == EXIT_CONFIG {
            format!("error: {}", one_line(&e.to_string()))
        } else {
            format!(
                "error: {}\n  mode: {:?}\n  times: {:?}\n  expansion order: {}\n  config: {}",
                one_line(&e.to_string()),
                cfg.mode,
                cfg.times,
                cfg.expansion.order,
                cfg.to_json()
            )
        };
        (code, msg)
    })?;
    let text = table.render(cfg);
    let written = match &cfg.output.path {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| format!("cannot write output: {e}")),
    };
    written.map_err(|m| (EXIT_CONFIG, format!("error: config error: {m}")))
}

/// Entry point for the `groove` binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let flags = match Flags::try_parse_from(args) {
        Ok(f) => f,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            eprintln!("error: config error: {}", one_line(&first));
            return EXIT_CONFIG;
        }
    };
    let cfg = match flags.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", one_line(&e.to_string()));
            return exit_code(&e);
        }
    };
    match execute(&cfg) {
        Ok(()) => EXIT_OK,
        Err((code, msg)) => {
            eprintln!("{msg}");
            code
        }
    }
}
