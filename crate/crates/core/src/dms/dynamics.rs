//! Per-slot dynamics: processing delay, arrivals, buffer, gain and reward.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{DmsConfig, GainMode};
use super::space::{ActionSpace, GlobalAction, GlobalState, StateSpace};
use crate::error::{Error, Result};
use crate::trace::{Measurement, TraceSample};

/// `floor(eta * c / f)`: data units arriving while one unit is encoded.
#[inline]
pub fn arrival_count(cycles: f64, f_hz: f64, eta: f64) -> usize {
    ((cycles / f_hz) * eta).floor() as usize
}

/// Rate-distortion Lagrangian `d + lambda * b`.
#[inline]
pub fn app_cost(m: &Measurement, lambda_rd: f64) -> f64 {
    m.distortion + lambda_rd * m.bits
}

/// Returns `(q_next, overflow_count)`.
#[inline]
pub fn buffer_step(q: usize, arrivals: usize, capacity: usize) -> (usize, usize) {
    let raw = q + arrivals;
    let next = raw.saturating_sub(1).min(capacity);
    let overflow = raw.saturating_sub(1 + capacity);
    (next, overflow)
}

pub fn utility_gain(q: usize, arrivals: usize, capacity: usize, mode: GainMode) -> f64 {
    let load = q as f64 + arrivals as f64 - 1.0;
    let n = capacity as f64;
    match mode {
        GainMode::Proposed => 1.0 - (load / n).powi(2),
        GainMode::Conventional => {
            if load <= n {
                1.0
            } else {
                n - load
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub reward: f64,
    pub gain: f64,
    /// Power at the current operating frequency (W).
    pub cost_os: f64,
    pub cost_app: f64,
    pub arrivals: usize,
    /// Seconds.
    pub processing_delay: f64,
    pub overflow_count: usize,
    pub cycles: f64,
    pub next_state: GlobalState,
}

/// The system of one encoder and one frequency-scaled processor.
#[derive(Clone, Debug)]
pub struct DmsModel {
    cfg: DmsConfig,
    states: StateSpace,
    actions: ActionSpace,
    power: Vec<f64>,
}

impl DmsModel {
    pub fn new(cfg: DmsConfig) -> Result<Self> {
        cfg.validate()?;
        let power = (0..cfg.n_frequencies())
            .map(|i| cfg.kappa * cfg.frequency_hz(i).powf(cfg.theta))
            .collect();
        Ok(Self {
            states: StateSpace::of(&cfg),
            actions: ActionSpace::of(&cfg),
            cfg,
            power,
        })
    }

    pub fn config(&self) -> &DmsConfig {
        &self.cfg
    }

    pub fn states(&self) -> StateSpace {
        self.states
    }

    pub fn actions(&self) -> ActionSpace {
        self.actions
    }

    /// `kappa * f^theta` for a frequency in Hz that must be an operating point.
    pub fn power_cost(&self, f_hz: f64) -> Result<f64> {
        (0..self.cfg.n_frequencies())
            .find(|&i| self.cfg.frequency_hz(i) == f_hz)
            .map(|i| self.power[i])
            .ok_or_else(|| Error::InvalidState(format!("{f_hz} Hz is not an operating frequency")))
    }

    pub fn power_at(&self, f: usize) -> f64 {
        self.power[f]
    }

    pub fn app_cost(&self, sample: &TraceSample, h: usize) -> Result<f64> {
        Ok(app_cost(sample.measurement(h)?, self.cfg.lambda_rd))
    }

    pub fn arrivals(&self, cycles: f64, f: usize) -> usize {
        arrival_count(cycles, self.cfg.frequency_hz(f), self.cfg.arrival_rate)
    }

    /// `g - w_os * J1 - w_app * J2`; every reward in the crate goes through here.
    #[inline]
    pub fn stage_reward(&self, gain: f64, cost_os: f64, cost_app: f64) -> f64 {
        gain - self.cfg.omega_os * cost_os - self.cfg.omega_app * cost_app
    }

    /// Samples the frequency switch and next type, then resolves the slot.
    /// Always consumes exactly two uniforms from `rng`.
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: GlobalState,
        action: GlobalAction,
        sample: &TraceSample,
        rng: &mut R,
    ) -> Result<StageOutcome> {
        let switch: f64 = rng.random();
        let type_draw: f64 = rng.random();
        let f_next = if switch < self.cfg.beta {
            action.u
        } else {
            state.f
        };
        let z_next = self.next_type(state.z, type_draw);
        self.forced_step(state, action, sample, f_next, z_next)
    }

    fn next_type(&self, z: usize, u: f64) -> usize {
        let row = &self.cfg.type_transition[z];
        let mut acc = 0.0;
        for (j, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return j;
            }
        }
        // Rounding left a sliver above the cumulative sum: take the last
        // type with positive mass.
        row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
    }

    /// Resolves one slot with the random outcomes (`f_next`, `z_next`) fixed.
    pub fn forced_step(
        &self,
        state: GlobalState,
        action: GlobalAction,
        sample: &TraceSample,
        f_next: usize,
        z_next: usize,
    ) -> Result<StageOutcome> {
        self.states.check(state)?;
        if action.u >= self.actions.n_commands || action.h >= self.actions.n_configs {
            return Err(Error::InvalidInput(format!(
                "{action:?} outside action space"
            )));
        }
        if sample.z != state.z {
            return Err(Error::InvalidInput(format!(
                "sample type {} does not match state type {}",
                sample.z, state.z
            )));
        }
        let m = sample.measurement(action.h)?;
        let f_hz = self.cfg.frequency_hz(state.f);
        let processing_delay = m.cycles / f_hz;
        let arrivals = arrival_count(m.cycles, f_hz, self.cfg.arrival_rate);
        let cost_app = app_cost(m, self.cfg.lambda_rd);
        let mut out = self.resolve(state, arrivals, cost_app, f_next, z_next);
        out.processing_delay = processing_delay;
        out.cycles = m.cycles;
        Ok(out)
    }

    /// Slot outcome from the realized arrivals and costs alone.
    pub fn resolve(
        &self,
        state: GlobalState,
        arrivals: usize,
        cost_app: f64,
        f_next: usize,
        z_next: usize,
    ) -> StageOutcome {
        let cap = self.cfg.buffer_capacity;
        let (q_next, overflow_count) = buffer_step(state.q, arrivals, cap);
        let gain = utility_gain(state.q, arrivals, cap, self.cfg.gain);
        let cost_os = self.power[state.f];
        StageOutcome {
            reward: self.stage_reward(gain, cost_os, cost_app),
            gain,
            cost_os,
            cost_app,
            arrivals,
            processing_delay: 0.0,
            overflow_count,
            cycles: 0.0,
            next_state: GlobalState {
                f: f_next,
                z: z_next,
                q: q_next,
            },
        }
    }
}
