use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use dmsrl_experiment::config::{parse_seed_list, Horizon};
use dmsrl_experiment::{
    artifacts, compare_to_dir, run_to_dir, solve_oracle, ExperimentConfig, ExperimentError,
};

/// Learning-based power and encoder control experiments.
#[derive(Parser)]
#[command(name = "dmsrl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration over its seeds.
    Run {
        config: PathBuf,
        /// Comma-separated seeds overriding the config.
        #[arg(long)]
        seeds: Option<String>,
        /// Horizon in slots overriding the config.
        #[arg(long)]
        horizon: Option<u64>,
        /// Output directory overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several configurations and overlay their curves.
    Compare {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the exact model and write the optimal policy, values and
    /// stationary distribution.
    Oracle {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run {
            config,
            seeds,
            horizon,
            out,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seeds {
                cfg.run.seeds = parse_seed_list(&s)?;
            }
            if let Some(n) = horizon {
                cfg.run.horizon = Horizon::Slots(n);
            }
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            cfg.output.dir = dir.clone();
            cfg.validate()?;
            let outcome = run_to_dir(&cfg, &dir)?;
            for r in &outcome.runs {
                println!(
                    "{} seed {}: avg reward {:.4}, power {:.4} W, overflows {}",
                    outcome.config.label(),
                    r.seed,
                    r.summary.avg_reward,
                    r.summary.avg_power,
                    r.summary.total_overflows
                );
            }
            println!("artifacts in {}", dir.display());
        }
        Command::Compare { configs, out } => {
            let cfgs = configs
                .iter()
                .map(|p| ExperimentConfig::load(p))
                .collect::<Result<Vec<_>, _>>()?;
            let outcomes = compare_to_dir(&cfgs, &out)?;
            for o in &outcomes {
                let row = artifacts::comparison_row(o);
                println!(
                    "{}: mean avg reward {:.4} (sd {:.4}) over {} seed(s)",
                    row.label, row.mean_avg_reward, row.std_avg_reward, row.seeds
                );
            }
            println!("artifacts in {}", out.display());
        }
        Command::Oracle { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let oracle = solve_oracle(&cfg)?;
            let path = artifacts::write_oracle(&cfg, &oracle, &out)
                .with_context(|| format!("writing oracle table to {}", out.display()))?;
            println!(
                "value iteration converged in {} iterations; wrote {}",
                oracle.solution.iterations,
                path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("DMSRL_LOG", "info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config_error = e.chain().any(|c| {
                c.downcast_ref::<ExperimentError>()
                    .is_some_and(ExperimentError::is_config)
            });
            ExitCode::from(if config_error { 1 } else { 2 })
        }
    }
}
