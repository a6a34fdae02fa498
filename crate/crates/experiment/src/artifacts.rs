//! CSV and SVG outputs.

use std::fs;
use std::path::{Path, PathBuf};

use dmsrl_core::dms::DmsModel;
use serde::{Deserialize, Serialize};

use crate::aggregate::{mean, mean_curve, median, std_dev};
use crate::config::ExperimentConfig;
use crate::error::{ExperimentError, Result};
use crate::plot::{LineChart, Series};
use crate::runner::{ExperimentOutcome, OracleSolution};

pub const CONFIG_ECHO: &str = "config.toml";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const ERRORS_CSV: &str = "weighted_error.csv";
pub const ORACLE_CSV: &str = "oracle.csv";
pub const REWARD_SVG: &str = "reward.svg";
pub const ERROR_SVG: &str = "weighted_error.svg";
pub const COMPARISON_CSV: &str = "comparison.csv";

pub fn slots_csv_name(seed: u64) -> String {
    format!("slots_seed{seed}.csv")
}

/// One row per seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    pub algorithm: String,
    pub seed: u64,
    pub slots: u64,
    pub avg_reward: f64,
    pub avg_power: f64,
    pub avg_rate_distortion: f64,
    pub avg_gain: f64,
    pub total_overflows: u64,
    pub final_weighted_error: Option<f64>,
    pub messages_per_slot: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub seed: u64,
    pub slots: u64,
    pub weighted_error: f64,
}

/// Optimal action, value and stationary probability of one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub state: usize,
    pub f: usize,
    pub z: String,
    pub q: usize,
    pub u: usize,
    pub h: usize,
    pub value: f64,
    pub stationary: f64,
}

/// One row per configuration of a comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub algorithm: String,
    pub seeds: usize,
    pub slots: u64,
    pub mean_avg_reward: f64,
    pub std_avg_reward: f64,
    pub median_avg_reward: f64,
    pub mean_avg_power: f64,
    pub mean_avg_rate_distortion: f64,
    pub mean_avg_gain: f64,
    pub mean_total_overflows: f64,
    pub median_final_weighted_error: Option<f64>,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| ExperimentError::io(path, e))
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| ExperimentError::io(path, e))
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn summary_rows(outcome: &ExperimentOutcome) -> Vec<SummaryRow> {
    let cfg = &outcome.config;
    outcome
        .runs
        .iter()
        .map(|r| SummaryRow {
            label: cfg.label(),
            algorithm: cfg.learner.algorithm.to_string(),
            seed: r.seed,
            slots: r.summary.slots,
            avg_reward: r.summary.avg_reward,
            avg_power: r.summary.avg_power,
            avg_rate_distortion: r.summary.avg_rate_distortion,
            avg_gain: r.summary.avg_gain,
            total_overflows: r.summary.total_overflows,
            final_weighted_error: r.final_error(),
            messages_per_slot: r.messages_per_slot,
        })
        .collect()
}

pub fn oracle_rows(cfg: &ExperimentConfig, oracle: &OracleSolution) -> Result<Vec<OracleRow>> {
    let model = DmsModel::new(cfg.dms.clone())?;
    let (states, actions) = (model.states(), model.actions());
    Ok((0..states.len())
        .map(|s| {
            let st = states.state(s);
            let a = actions.action(oracle.solution.policy.action(s));
            OracleRow {
                state: s,
                f: st.f,
                z: cfg.dms.type_labels[st.z].clone(),
                q: st.q,
                u: a.u,
                h: a.h,
                value: oracle.solution.values[s],
                stationary: oracle.stationary[s],
            }
        })
        .collect())
}

pub fn write_oracle(
    cfg: &ExperimentConfig,
    oracle: &OracleSolution,
    dir: &Path,
) -> Result<PathBuf> {
    create_dir(dir)?;
    let path = dir.join(ORACLE_CSV);
    write_rows(&path, &oracle_rows(cfg, oracle)?)?;
    Ok(path)
}

/// Writes the resolved-config echo, per-seed summaries, optional per-slot
/// logs, checkpoint errors, oracle table and plots into `dir`.
pub fn write_run(outcome: &ExperimentOutcome, dir: &Path) -> Result<()> {
    let cfg = &outcome.config;
    create_dir(dir)?;
    write_text(&dir.join(CONFIG_ECHO), &cfg.to_toml()?)?;
    write_rows(&dir.join(SUMMARY_CSV), &summary_rows(outcome))?;
    if cfg.output.per_slot {
        for r in &outcome.runs {
            write_rows(&dir.join(slots_csv_name(r.seed)), r.stats.entries())?;
        }
    }
    let errors: Vec<ErrorRow> = outcome
        .runs
        .iter()
        .flat_map(|r| {
            r.errors
                .iter()
                .map(move |&(slots, weighted_error)| ErrorRow {
                    seed: r.seed,
                    slots,
                    weighted_error,
                })
        })
        .collect();
    if !errors.is_empty() {
        write_rows(&dir.join(ERRORS_CSV), &errors)?;
    }
    if let Some(o) = &outcome.oracle {
        write_oracle(cfg, o, dir)?;
    }
    if cfg.output.plots {
        let mut reward = LineChart::new("Cumulative average reward", "time slot", "average reward");
        for r in &outcome.runs {
            reward.push(Series::from_slots(
                format!("seed {}", r.seed),
                r.stats.cumulative_average_reward(),
            ));
        }
        write_text(&dir.join(REWARD_SVG), &reward.render())?;
        if !errors.is_empty() {
            let mut chart =
                LineChart::new("Weighted estimation error", "time slot", "weighted error");
            for r in &outcome.runs {
                chart.push(Series {
                    name: format!("seed {}", r.seed),
                    points: r.errors.iter().map(|&(n, e)| (n as f64, e)).collect(),
                });
            }
            write_text(&dir.join(ERROR_SVG), &chart.render())?;
        }
    }
    Ok(())
}

pub fn comparison_row(outcome: &ExperimentOutcome) -> ComparisonRow {
    let rs = &outcome.runs;
    let pick = |f: &dyn Fn(&crate::runner::SeedRun) -> f64| rs.iter().map(f).collect::<Vec<f64>>();
    let rewards = pick(&|r| r.summary.avg_reward);
    let final_errors: Vec<f64> = rs.iter().filter_map(|r| r.final_error()).collect();
    ComparisonRow {
        label: outcome.config.label(),
        algorithm: outcome.config.learner.algorithm.to_string(),
        seeds: rs.len(),
        slots: outcome.config.horizon(),
        mean_avg_reward: mean(&rewards),
        std_avg_reward: std_dev(&rewards),
        median_avg_reward: median(&rewards),
        mean_avg_power: mean(&pick(&|r| r.summary.avg_power)),
        mean_avg_rate_distortion: mean(&pick(&|r| r.summary.avg_rate_distortion)),
        mean_avg_gain: mean(&pick(&|r| r.summary.avg_gain)),
        mean_total_overflows: mean(&pick(&|r| r.summary.total_overflows as f64)),
        median_final_weighted_error: (!final_errors.is_empty()).then(|| median(&final_errors)),
    }
}

/// Seed-averaged curves of several runs on shared axes.
pub fn write_comparison(outcomes: &[ExperimentOutcome], dir: &Path) -> Result<()> {
    create_dir(dir)?;
    let rows: Vec<ComparisonRow> = outcomes.iter().map(comparison_row).collect();
    write_rows(&dir.join(COMPARISON_CSV), &rows)?;
    let mut reward = LineChart::new("Cumulative average reward", "time slot", "average reward");
    let mut error = LineChart::new("Weighted estimation error", "time slot", "weighted error");
    for o in outcomes {
        let curves: Vec<&[f64]> = o
            .runs
            .iter()
            .map(|r| r.stats.cumulative_average_reward())
            .collect();
        reward.push(Series::from_slots(o.config.label(), &mean_curve(&curves)));
        if o.runs.iter().all(|r| !r.errors.is_empty()) {
            let errs: Vec<Vec<f64>> = o
                .runs
                .iter()
                .map(|r| r.errors.iter().map(|e| e.1).collect())
                .collect();
            let refs: Vec<&[f64]> = errs.iter().map(Vec::as_slice).collect();
            let xs = o.runs[0].errors.iter().map(|e| e.0 as f64);
            error.push(Series {
                name: o.config.label(),
                points: xs.zip(mean_curve(&refs)).collect(),
            });
        }
    }
    write_text(&dir.join(REWARD_SVG), &reward.render())?;
    if !error.series.is_empty() {
        write_text(&dir.join(ERROR_SVG), &error.render())?;
    }
    Ok(())
}
