//! Command-line verification campaigns for the glued torus/cylinder space.
//!
//! Each subcommand runs one campaign from [`commands`] and renders its
//! report as byte-stable JSON (or CSV for density tables).

pub mod commands;
pub mod config;
pub mod error;
pub mod wire;

use std::path::Path;

use serde_json::Value;

use crate::commands::Outcome;
use crate::config::{Format, RunConfig, Settings};
use crate::error::{CliError, UsageError};

/// Subcommand names, in help order.
pub const COMMANDS: &[&str] = &[
    "verify-metric",
    "counterexample",
    "nearest",
    "isometry-check",
    "lift",
    "density",
    "non-closure",
    "local-isometry",
    "x1-group",
];

/// A finished run: the verdict and the rendered report.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub passed: bool,
    pub text: String,
}

impl Rendered {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Resolves settings from flags, environment seed and file, then runs
/// `command`.
pub fn execute(command: &str, flags: &Settings, env_seed: Option<&str>, config: Option<&Path>) -> Result<Rendered, CliError> {
    let file = match config {
        Some(p) => config::read_config_file(p)?,
        None => Settings::new(),
    };
    let cfg = RunConfig::from_settings(config::merge(flags, env_seed, &file))?;
    let outcome = dispatch(command, &cfg)?;
    render(command, &cfg, &outcome)
}

pub fn dispatch(command: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        "verify-metric" => commands::verify_metric(cfg),
        "counterexample" => commands::counterexample(cfg),
        "nearest" => commands::nearest(cfg),
        "isometry-check" => commands::isometry_check(cfg),
        "lift" => commands::lift(cfg),
        "density" => commands::density(cfg),
        "non-closure" => commands::non_closure(cfg),
        "local-isometry" => commands::local_isometry(cfg),
        "x1-group" => commands::x1_group(cfg),
        other => Err(UsageError::new("command", format!("unknown subcommand `{other}`")).into()),
    }
}

fn render(command: &str, cfg: &RunConfig, out: &Outcome) -> Result<Rendered, CliError> {
    let text = match cfg.format {
        Format::Json => {
            let config = cfg.effective(&out.defaults).into_iter().map(|(k, v)| (k, Value::String(v)));
            wire::to_text(&wire::object([
                ("command".to_string(), command.into()),
                ("config".to_string(), wire::object(config)),
                ("passed".to_string(), out.passed.into()),
                ("report".to_string(), out.report.clone()),
            ]))
        }
        Format::Csv => {
            let rows = out.table.as_ref().ok_or_else(|| UsageError::new("format", format!("{command} has no CSV output")))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["target_u1", "target_u2", "t", "distance"]).map_err(csv_error)?;
            for row in rows {
                w.write_record(row).map_err(csv_error)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.into_error()))?).expect("CSV of UTF-8 fields")
        }
    };
    Ok(Rendered { passed: out.passed, text })
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(e.into())
}
