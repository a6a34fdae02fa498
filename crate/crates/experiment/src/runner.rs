//! Seeded runs and the exact-model pipeline.

use dmsrl_core::dms::{assemble_transition_model, DmsModel, Simulator};
use dmsrl_core::learners::{
    BestResponse, Centralized, Controller, FixedPolicy, Grace, Layered, LearningLayer, TdLambda,
    VirtualEtLearner,
};
use dmsrl_core::mdp::{
    stationary_distribution, value_iteration, TransitionModel, ValueIterationResult,
};
use dmsrl_core::metrics::{summarize, weighted_estimation_error, RunStats, RunSummary};
use dmsrl_core::trace::{
    empirical_arrival_distribution, load_csv, ArrivalDistribution, NonstationarySource,
    ReplaySource, ReplayTrace, ResampleSource, Segment, StationarySource, TraceSource,
    DEFAULT_MIN_TRACE_LEN,
};
use log::{debug, info};
use rayon::prelude::*;

use crate::config::{Algorithm, CsvMode, ExperimentConfig, TraceConfig};
use crate::error::{ExperimentError, Result};

/// Independent stream seeds derived from one run seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Trace,
    Environment,
    Agent,
}

pub fn stream_seed(seed: u64, stream: Stream) -> u64 {
    // splitmix64 finalizer over (seed, stream)
    let mut z = seed
        .wrapping_mul(4)
        .wrapping_add(stream as u64 + 1)
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn build_source(cfg: &ExperimentConfig, seed: u64) -> Result<Box<dyn TraceSource>> {
    let nz = cfg.dms.n_types();
    Ok(match &cfg.trace {
        TraceConfig::Synthetic { params } => Box::new(StationarySource::new(params, seed)?),
        TraceConfig::NonStationary { segments } => {
            let segs: Vec<Segment> = segments.iter().map(|s| s.resolve()).collect();
            Box::new(NonstationarySource::new(&segs, seed)?)
        }
        TraceConfig::Csv { path, mode } => {
            let trace = ReplayTrace::new(load_csv(path, &cfg.dms.type_labels)?)?;
            match mode {
                CsvMode::Replay => Box::new(ReplaySource::new(trace, nz)?),
                CsvMode::Resample => Box::new(ResampleSource::new(trace, nz, seed)?),
            }
        }
    })
}

/// Exact model estimated from the trace, its optimal solution and the
/// stationary distribution under the optimal policy.
#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub distribution: ArrivalDistribution,
    pub model: TransitionModel,
    pub solution: ValueIterationResult,
    pub stationary: Vec<f64>,
}

impl OracleSolution {
    pub fn values(&self) -> &[f64] {
        &self.solution.values
    }
}

pub fn solve_oracle(cfg: &ExperimentConfig) -> Result<OracleSolution> {
    let o = &cfg.oracle;
    let source = build_source(cfg, stream_seed(o.reference_seed, Stream::Trace))?;
    let samples = source.reference_samples(o.reference_samples, o.reference_seed)?;
    let dms = DmsModel::new(cfg.dms.clone())?;
    let distribution = empirical_arrival_distribution(&samples, &cfg.dms, DEFAULT_MIN_TRACE_LEN)?;
    let model = assemble_transition_model(&dms, &distribution)?;
    let solution = value_iteration(&model, cfg.learner.gamma, o.value_tolerance)?;
    let stationary = stationary_distribution(&model, &solution.policy, o.stationary_tolerance)?;
    info!(
        "oracle solved in {} iterations from {} reference samples",
        solution.iterations,
        samples.len()
    );
    Ok(OracleSolution {
        distribution,
        model,
        solution,
        stationary,
    })
}

pub fn build_controller(
    cfg: &ExperimentConfig,
    model: &DmsModel,
    oracle: Option<&OracleSolution>,
    seed: u64,
) -> Result<Box<dyn Controller>> {
    let l = &cfg.learner;
    let schedule = l.schedule();
    let need = |a: Algorithm| {
        oracle.ok_or_else(|| {
            ExperimentError::Config(format!("learner.algorithm: {a} needs the oracle solution"))
        })
    };
    Ok(match l.algorithm {
        Algorithm::Centralized => Box::new(Centralized::new(model, schedule, seed)?),
        Algorithm::Layered => Box::new(Layered::new(model, schedule, seed)?),
        Algorithm::VirtualEt => Box::new(VirtualEtLearner::new(model, schedule, l.psi, seed)?),
        Algorithm::TdLambda => Box::new(TdLambda::new(model, schedule, l.lambda, l.psi, seed)?),
        Algorithm::Grace => Box::new(Grace::new(model, l.grace)?),
        a @ Algorithm::BestResponseApp => {
            let o = need(a)?;
            Box::new(BestResponse::from_joint_policy(
                model,
                LearningLayer::App,
                &o.solution.policy,
                schedule,
                seed,
            )?)
        }
        a @ Algorithm::BestResponseOs => {
            let o = need(a)?;
            Box::new(BestResponse::from_joint_policy(
                model,
                LearningLayer::Os,
                &o.solution.policy,
                schedule,
                seed,
            )?)
        }
        a @ Algorithm::OracleGreedy => {
            let o = need(a)?;
            Box::new(FixedPolicy::new(
                model,
                o.solution.policy.clone(),
                Some(o.solution.values.clone()),
            )?)
        }
    })
}

#[derive(Clone, Debug)]
pub struct SeedRun {
    pub seed: u64,
    pub stats: RunStats,
    pub summary: RunSummary,
    /// `(slots, weighted estimation error)` at each checkpoint, when the
    /// oracle is available and the controller exposes a value estimate.
    pub errors: Vec<(u64, f64)>,
    /// Mean coordination messages per slot, for controllers that count them.
    pub messages_per_slot: Option<f64>,
}

impl SeedRun {
    pub fn final_error(&self) -> Option<f64> {
        self.errors.last().map(|&(_, e)| e)
    }
}

pub fn run_seed(
    cfg: &ExperimentConfig,
    oracle: Option<&OracleSolution>,
    seed: u64,
) -> Result<SeedRun> {
    let model = DmsModel::new(cfg.dms.clone())?;
    let source = build_source(cfg, stream_seed(seed, Stream::Trace))?;
    let mut sim = Simulator::new(
        model.clone(),
        source,
        stream_seed(seed, Stream::Environment),
    )?;
    let mut controller = build_controller(cfg, &model, oracle, stream_seed(seed, Stream::Agent))?;
    let horizon = cfg.horizon();
    let mut stats = RunStats::with_capacity(cfg.run.checkpoint_interval, horizon as usize);
    for _ in 0..horizon {
        let rec = controller.step(&mut sim)?;
        stats.record(&rec);
        if stats.checkpoint_due() {
            if let Some(v) = controller.state_values() {
                stats.checkpoint(v);
            }
        }
    }
    if let Some(v) = controller.state_values() {
        stats.checkpoint(v);
    }
    let errors = match oracle {
        Some(o) => stats
            .checkpoints()
            .iter()
            .map(|c| {
                Ok((
                    c.slots,
                    weighted_estimation_error(o.values(), &c.values, &o.stationary)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let messages_per_slot = controller
        .messages()
        .filter(|m| m.slots() > 0)
        .map(|m| m.total() as f64 / m.slots() as f64);
    let summary = summarize(&stats)?;
    debug!("seed {seed}: avg reward {:.4}", summary.avg_reward);
    Ok(SeedRun {
        seed,
        stats,
        summary,
        errors,
        messages_per_slot,
    })
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    /// Resolved configuration the runs used.
    pub config: ExperimentConfig,
    pub oracle: Option<OracleSolution>,
    pub runs: Vec<SeedRun>,
}

/// Solves the oracle when enabled or required, then runs every seed in
/// parallel. Runs come back in seed-list order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let config = cfg.resolved();
    let oracle = if cfg.oracle.enabled || cfg.learner.algorithm.needs_oracle() {
        Some(solve_oracle(cfg)?)
    } else {
        None
    };
    info!(
        "running {} for {} slots over {} seed(s)",
        config.label(),
        config.horizon(),
        config.run.seeds.len()
    );
    let runs = config
        .run
        .seeds
        .par_iter()
        .map(|&seed| run_seed(&config, oracle.as_ref(), seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutcome {
        config,
        oracle,
        runs,
    })
}
