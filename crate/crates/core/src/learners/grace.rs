//! Myopic baseline: the processor runs at the lowest frequency that should
//! finish the next job before the buffer runs out of room, based on a
//! percentile estimate of recent job sizes; the encoder picks the
//! configuration with the lowest observed mean rate-distortion cost.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Controller, SlotRecord};
use crate::dms::{DmsModel, GlobalAction, Simulator};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraceParams {
    /// Completed jobs kept in the sliding window.
    pub window: usize,
    /// Weight of the previous estimate in the exponential average.
    pub smoothing: f64,
    pub percentile: f64,
}

impl Default for GraceParams {
    fn default() -> Self {
        Self {
            window: 32,
            smoothing: 0.9,
            percentile: 0.95,
        }
    }
}

impl GraceParams {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::Config(
                "grace window must hold at least one job".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.smoothing)
            || !(self.percentile > 0.0 && self.percentile <= 1.0)
        {
            return Err(Error::Config(
                "grace smoothing or percentile out of range".into(),
            ));
        }
        Ok(())
    }
}

/// Index of the lowest frequency (Hz, ascending) that completes `cycles`
/// within `deadline` seconds, or the highest one if none does.
pub fn lowest_frequency_meeting(frequencies_hz: &[f64], cycles: f64, deadline: f64) -> usize {
    frequencies_hz
        .iter()
        .position(|&f| cycles / f <= deadline)
        .unwrap_or(frequencies_hz.len() - 1)
}

/// Nearest-rank percentile of an unsorted sample.
fn percentile(values: &VecDeque<f64>, p: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    let rank = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

pub struct Grace {
    params: GraceParams,
    frequencies_hz: Vec<f64>,
    window: VecDeque<f64>,
    demand: Option<f64>,
    /// Running `(sum, count)` of the rate-distortion cost per (type, config).
    app_costs: Vec<(f64, u64)>,
    n_configs: usize,
}

impl Grace {
    pub fn new(model: &DmsModel, params: GraceParams) -> Result<Self> {
        params.validate()?;
        let cfg = model.config();
        Ok(Self {
            params,
            frequencies_hz: (0..cfg.n_frequencies())
                .map(|i| cfg.frequency_hz(i))
                .collect(),
            window: VecDeque::with_capacity(params.window),
            demand: None,
            app_costs: vec![(0.0, 0); cfg.n_types() * cfg.n_configs],
            n_configs: cfg.n_configs,
        })
    }

    /// Current cycle-demand estimate, if any job has completed.
    pub fn demand(&self) -> Option<f64> {
        self.demand
    }

    fn choose_config(&self, z: usize) -> usize {
        let row = &self.app_costs[z * self.n_configs..(z + 1) * self.n_configs];
        if let Some(h) = row.iter().position(|&(_, n)| n == 0) {
            return h;
        }
        let mut best = 0;
        for (h, &(sum, n)) in row.iter().enumerate() {
            let (bs, bn) = row[best];
            if sum / (n as f64) < bs / (bn as f64) {
                best = h;
            }
        }
        best
    }

    fn observe_job(&mut self, cycles: f64) {
        if self.window.len() == self.params.window {
            self.window.pop_front();
        }
        self.window.push_back(cycles);
        let p = percentile(&self.window, self.params.percentile);
        let rho = self.params.smoothing;
        self.demand = Some(match self.demand {
            Some(prev) => rho * prev + (1.0 - rho) * p,
            None => p,
        });
    }
}

impl Controller for Grace {
    fn step(&mut self, sim: &mut Simulator) -> Result<SlotRecord> {
        let cfg = sim.model().config();
        let state = sim.state();
        let u = match self.demand {
            None => self.frequencies_hz.len() - 1,
            Some(c) => {
                // Time until the buffer fills up once this job starts.
                let headroom = (cfg.buffer_capacity - state.q + 1) as f64;
                lowest_frequency_meeting(&self.frequencies_hz, c, headroom / cfg.arrival_rate)
            }
        };
        let h = self.choose_config(state.z);
        let action = GlobalAction { u, h };
        let outcome = sim.step(action)?;
        self.observe_job(outcome.cycles);
        let cell = &mut self.app_costs[state.z * self.n_configs + h];
        cell.0 += outcome.cost_app;
        cell.1 += 1;
        Ok(SlotRecord {
            state,
            action,
            outcome,
            cells_updated: 0,
        })
    }

    fn state_values(&self) -> Option<Vec<f64>> {
        None
    }
}
