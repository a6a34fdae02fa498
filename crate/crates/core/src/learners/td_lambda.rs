//! Q-learning with truncated replacing eligibility traces.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Controller, SlotRecord};
use crate::dms::{DmsModel, Simulator};
use crate::error::{Error, Result};
use crate::mdp::{epsilon_greedy, LearningSchedule, QTable, VisitCounter};

/// Replacing traces over the most recently visited distinct cells.
///
/// A cell last visited `k` slots ago has eligibility `(gamma lambda)^k`, so
/// ranking by eligibility is ranking by recency and only the `psi + 1`
/// most recent cells can ever receive a backup.
#[derive(Clone, Debug)]
pub struct EligibilityState {
    decay: f64,
    capacity: usize,
    /// `(cell, slot of last visit)`, most recent first.
    recent: VecDeque<(usize, u64)>,
}

impl EligibilityState {
    pub fn new(gamma: f64, lambda: f64, psi: usize) -> Self {
        Self {
            decay: gamma * lambda,
            capacity: psi + 1,
            recent: VecDeque::with_capacity(psi + 2),
        }
    }

    /// Sets the trace of `cell` to 1 at `slot`.
    pub fn visit(&mut self, cell: usize, slot: u64) {
        if let Some(pos) = self.recent.iter().position(|&(c, _)| c == cell) {
            self.recent.remove(pos);
        }
        self.recent.push_front((cell, slot));
        self.recent.truncate(self.capacity);
    }

    /// Eligibility at `slot` of a cell visited at `visited`.
    pub fn eligibility_at(&self, visited: u64, slot: u64) -> f64 {
        self.decay.powi((slot - visited) as i32)
    }

    pub fn eligibility(&self, cell: usize, slot: u64) -> f64 {
        self.recent
            .iter()
            .find(|&&(c, _)| c == cell)
            .map_or(0.0, |&(_, v)| self.eligibility_at(v, slot))
    }

    /// Tracked cells with their eligibility at `slot`, highest first.
    pub fn ranked(&self, slot: u64) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.recent
            .iter()
            .map(move |&(c, v)| (c, self.eligibility_at(v, slot)))
    }
}

pub struct TdLambda {
    q: QTable,
    visits: VisitCounter,
    traces: EligibilityState,
    schedule: LearningSchedule,
    rng: ChaCha8Rng,
}

impl TdLambda {
    pub fn new(
        model: &DmsModel,
        schedule: LearningSchedule,
        lambda: f64,
        psi: usize,
        seed: u64,
    ) -> Result<Self> {
        schedule.validate()?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Config(format!("lambda {lambda} outside [0, 1]")));
        }
        let (ns, na) = (model.states().len(), model.actions().len());
        Ok(Self {
            q: QTable::zeros(ns, na),
            visits: VisitCounter::new(ns * na),
            traces: EligibilityState::new(schedule.gamma, lambda, psi),
            schedule,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn table(&self) -> &QTable {
        &self.q
    }
}

impl Controller for TdLambda {
    fn step(&mut self, sim: &mut Simulator) -> Result<SlotRecord> {
        let slot = sim.slot();
        let state = sim.state();
        let s = sim.state_index();
        let eps = self.schedule.epsilon(slot);
        let a = epsilon_greedy(self.q.row(s), eps, &mut self.rng)?;
        let action = sim.model().actions().action(a);
        let outcome = sim.step(action)?;
        let s_next = sim.model().states().index(outcome.next_state);

        let cell = self.q.index(s, a);
        let alpha = self.visits.next_alpha(cell, &self.schedule);
        let delta = self
            .q
            .update(s, a, outcome.reward, s_next, alpha, self.schedule.gamma);
        self.traces.visit(cell, slot);

        let mut cells_updated = 1;
        let values = self.q.values_mut();
        for (other, e) in self.traces.ranked(slot).skip(1) {
            if e == 0.0 {
                break;
            }
            values[other] += self.schedule.alpha(self.visits.count(other)) * delta * e;
            cells_updated += 1;
        }
        Ok(SlotRecord {
            state,
            action,
            outcome,
            cells_updated,
        })
    }

    fn state_values(&self) -> Option<Vec<f64>> {
        Some(self.q.state_values())
    }
}
