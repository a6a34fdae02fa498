//! Batch experiments over the multimedia-system learners: TOML configs,
//! seeded parallel runs, the exact-model oracle, CSV and SVG artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregate;
pub mod artifacts;
pub mod config;
pub mod error;
pub mod plot;
pub mod runner;

use std::path::Path;

pub use config::{Algorithm, ExperimentConfig, LearnerConfig, TraceConfig};
pub use error::{ExperimentError, Result};
pub use runner::{run_experiment, solve_oracle, ExperimentOutcome, OracleSolution, SeedRun};

/// Runs one configuration and writes its artifacts into `dir`.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &Path) -> Result<ExperimentOutcome> {
    let outcome = run_experiment(cfg)?;
    artifacts::write_run(&outcome, dir)?;
    Ok(outcome)
}

/// Runs several configurations that share the system and trace settings,
/// each into its own subdirectory, and writes the overlaid comparison.
pub fn compare_to_dir(configs: &[ExperimentConfig], dir: &Path) -> Result<Vec<ExperimentOutcome>> {
    let Some(first) = configs.first() else {
        return Err(ExperimentError::Compare("nothing to compare".into()));
    };
    for (i, c) in configs.iter().enumerate().skip(1) {
        if c.dms != first.dms {
            return Err(ExperimentError::Compare(format!(
                "config {i} differs from config 0 in [dms]"
            )));
        }
        if c.trace != first.trace {
            return Err(ExperimentError::Compare(format!(
                "config {i} differs from config 0 in [trace]"
            )));
        }
    }
    let mut outcomes = Vec::with_capacity(configs.len());
    for (i, c) in configs.iter().enumerate() {
        let sub = dir.join(format!("{i:02}_{}", slug(&c.label())));
        outcomes.push(run_to_dir(c, &sub)?);
    }
    artifacts::write_comparison(&outcomes, dir)?;
    Ok(outcomes)
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect()
}
