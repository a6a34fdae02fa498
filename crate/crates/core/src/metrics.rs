//! Per-run accounting and evaluation statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::SlotRecord;

pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 500;

/// One row of the per-slot log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotEntry {
    pub slot: u64,
    pub reward: f64,
    pub gain: f64,
    pub power: f64,
    pub rate_distortion: f64,
    pub overflow: usize,
    pub q: usize,
    pub f: usize,
    pub z: usize,
    pub u: usize,
    pub h: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningSums {
    pub reward: f64,
    pub gain: f64,
    pub power: f64,
    pub rate_distortion: f64,
    pub overflow: u64,
}

impl RunningSums {
    fn add(&mut self, e: &SlotEntry) {
        self.reward += e.reward;
        self.gain += e.gain;
        self.power += e.power;
        self.rate_distortion += e.rate_distortion;
        self.overflow += e.overflow as u64;
    }
}

/// Snapshot of a learner's state-value estimate after `slots` slots.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub slots: u64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RunStats {
    interval: u64,
    entries: Vec<SlotEntry>,
    sums: RunningSums,
    /// Cumulative average reward after each slot.
    cumulative: Vec<f64>,
    checkpoints: Vec<Checkpoint>,
}

impl RunStats {
    /// `interval` is the checkpoint spacing in slots; 0 disables periodic
    /// checkpoints.
    pub fn new(interval: u64) -> Self {
        Self {
            interval,
            entries: Vec::new(),
            sums: RunningSums::default(),
            cumulative: Vec::new(),
            checkpoints: Vec::new(),
        }
    }

    pub fn with_capacity(interval: u64, slots: usize) -> Self {
        let mut s = Self::new(interval);
        s.entries.reserve(slots);
        s.cumulative.reserve(slots);
        s
    }

    pub fn record(&mut self, rec: &SlotRecord) {
        let e = SlotEntry {
            slot: self.entries.len() as u64,
            reward: rec.outcome.reward,
            gain: rec.outcome.gain,
            power: rec.outcome.cost_os,
            rate_distortion: rec.outcome.cost_app,
            overflow: rec.outcome.overflow_count,
            q: rec.state.q,
            f: rec.state.f,
            z: rec.state.z,
            u: rec.action.u,
            h: rec.action.h,
        };
        self.push(e);
    }

    pub fn push(&mut self, e: SlotEntry) {
        self.sums.add(&e);
        self.entries.push(e);
        self.cumulative
            .push(self.sums.reward / self.entries.len() as f64);
    }

    /// True when a periodic checkpoint is due after the latest slot.
    pub fn checkpoint_due(&self) -> bool {
        let n = self.entries.len() as u64;
        self.interval > 0 && n > 0 && n.is_multiple_of(self.interval)
    }

    pub fn checkpoint(&mut self, values: Vec<f64>) {
        let slots = self.entries.len() as u64;
        if self.checkpoints.last().is_some_and(|c| c.slots == slots) {
            return;
        }
        self.checkpoints.push(Checkpoint { slots, values });
    }

    pub fn entries(&self) -> &[SlotEntry] {
        &self.entries
    }

    pub fn sums(&self) -> &RunningSums {
        &self.sums
    }

    pub fn cumulative_average_reward(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub slots: u64,
    pub avg_reward: f64,
    pub avg_power: f64,
    pub avg_rate_distortion: f64,
    pub avg_gain: f64,
    pub total_overflows: u64,
}

pub fn summarize(stats: &RunStats) -> Result<RunSummary> {
    if stats.is_empty() {
        return Err(Error::InvalidInput("cannot summarize an empty run".into()));
    }
    let n = stats.len() as f64;
    let s = stats.sums();
    Ok(RunSummary {
        slots: stats.len() as u64,
        avg_reward: s.reward / n,
        avg_power: s.power / n,
        avg_rate_distortion: s.rate_distortion / n,
        avg_gain: s.gain / n,
        total_overflows: s.overflow,
    })
}

/// Stationary-weighted mean relative error of `estimate` against `truth`.
pub fn weighted_estimation_error(truth: &[f64], estimate: &[f64], weights: &[f64]) -> Result<f64> {
    if truth.len() != estimate.len() || truth.len() != weights.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} true values, {} estimates, {} weights",
            truth.len(),
            estimate.len(),
            weights.len()
        )));
    }
    let undefined: Vec<usize> = (0..truth.len())
        .filter(|&s| weights[s] > 0.0 && truth[s] == 0.0)
        .collect();
    if !undefined.is_empty() {
        return Err(Error::UndefinedState { states: undefined });
    }
    Ok((0..truth.len())
        .filter(|&s| weights[s] > 0.0)
        .map(|s| weights[s] * ((truth[s] - estimate[s]) / truth[s]).abs())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(reward: f64, overflow: usize) -> SlotEntry {
        SlotEntry {
            slot: 0,
            reward,
            gain: 0.1,
            power: 0.3,
            rate_distortion: 12.0,
            overflow,
            q: 0,
            f: 0,
            z: 0,
            u: 0,
            h: 0,
        }
    }

    #[test]
    fn identical_estimate_has_zero_error() {
        let v = [1.0, -2.0, 3.5];
        assert_eq!(
            weighted_estimation_error(&v, &v, &[0.2, 0.3, 0.5]).unwrap(),
            0.0
        );
    }

    #[test]
    fn point_mass_error() {
        let e = weighted_estimation_error(&[2.0, 9.0], &[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn doubling_gives_unit_error() {
        let v = [1.0, -4.0, 0.25];
        let d: Vec<f64> = v.iter().map(|x| 2.0 * x).collect();
        for w in [[1.0, 0.0, 0.0], [0.2, 0.3, 0.5]] {
            assert!((weighted_estimation_error(&v, &d, &w).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_truth_on_support_is_reported() {
        match weighted_estimation_error(&[0.0, 1.0, 0.0], &[0.0; 3], &[0.5, 0.5, 0.0]) {
            Err(Error::UndefinedState { states }) => assert_eq!(states, vec![0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_reward_average() {
        let mut st = RunStats::new(0);
        for _ in 0..7 {
            st.push(entry(0.5, 0));
        }
        assert_eq!(summarize(&st).unwrap().avg_reward, 0.5);
    }

    #[test]
    fn overflow_total() {
        let mut st = RunStats::new(0);
        for o in [0, 4, 0] {
            st.push(entry(0.0, o));
        }
        assert_eq!(summarize(&st).unwrap().total_overflows, 4);
    }

    #[test]
    fn empty_run_is_an_error() {
        assert!(summarize(&RunStats::new(500)).is_err());
    }

    #[test]
    fn checkpoints_fall_on_the_interval() {
        let mut st = RunStats::new(3);
        let mut due = Vec::new();
        for n in 1..=7 {
            st.push(entry(0.0, 0));
            if st.checkpoint_due() {
                due.push(n);
                st.checkpoint(vec![n as f64]);
            }
        }
        assert_eq!(due, vec![3, 6]);
        st.checkpoint(vec![0.0]);
        st.checkpoint(vec![1.0]);
        assert_eq!(st.checkpoints().len(), 3);
    }
}
