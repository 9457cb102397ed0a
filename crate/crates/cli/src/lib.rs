//! Command-line front end: every command returns a [`RunRecord`] that is
//! written as JSON or CSV.

pub mod args;
pub mod commands;
pub mod error;
pub mod record;

use std::io::Write;

pub use args::{Cli, Command, Format};
pub use error::CliError;
pub use record::{RunRecord, Table};
use serde_json::json;

pub fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Sweep(_) | Command::Ldp(_) => Format::Csv,
        _ => Format::Json,
    }
}

/// Serializes `rec` and writes it to `--out` or stdout.
pub fn emit(cmd: &Command, rec: &RunRecord) -> Result<(), CliError> {
    let common = cmd.common();
    let body = match common.format.unwrap_or_else(|| default_format(cmd)) {
        Format::Json => rec.to_json()?,
        Format::Csv => rec.to_csv()?,
    };
    match &common.out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

/// Machine-readable description of a failure, with diagnostics where the
/// error carries them.
pub fn error_report(cmd: &str, err: &CliError) -> serde_json::Value {
    use feedback_core::Error as E;
    let details = match err {
        CliError::Core(E::Consistency {
            residuals, tolerance, ..
        }) => {
            json!({ "residuals": residuals, "tolerance": tolerance })
        }
        CliError::Core(E::Reliability { x, ess, gamma }) => json!({ "x": x, "ess": ess, "gamma": gamma }),
        CliError::Core(E::Budget { work, budget, .. }) => json!({ "work": work, "budget": budget }),
        CliError::Core(E::Numeric { seed, .. }) => json!({ "matrix_seed": seed }),
        _ => serde_json::Value::Null,
    };
    json!({
        "command": cmd,
        "version": record::VERSION,
        "error": err.kind(),
        "exit_code": err.exit_code(),
        "message": err.to_string(),
        "details": details,
    })
}
