use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Controller, ExperienceTuple, MessageLog, SlotRecord};
use crate::dms::{DmsModel, Simulator, StageOutcome};
use crate::error::Result;
use crate::mdp::{epsilon_greedy, LearningSchedule, QTable, VisitCounter};

pub const CENTRALIZED_MESSAGES: [&str; 8] = [
    "app-state",
    "os-state",
    "app-action",
    "os-action",
    "app-reward",
    "os-cost",
    "app-next-state",
    "os-next-state",
];

/// Q-learning by a single manager that sees the global state and picks both
/// layers' actions.
pub struct Centralized {
    q: QTable,
    visits: VisitCounter,
    schedule: LearningSchedule,
    rng: ChaCha8Rng,
    log: MessageLog,
}

impl Centralized {
    pub fn new(model: &DmsModel, schedule: LearningSchedule, seed: u64) -> Result<Self> {
        schedule.validate()?;
        let (ns, na) = (model.states().len(), model.actions().len());
        Ok(Self {
            q: QTable::zeros(ns, na),
            visits: VisitCounter::new(ns * na),
            schedule,
            rng: ChaCha8Rng::seed_from_u64(seed),
            log: MessageLog::default(),
        })
    }

    pub fn table(&self) -> &QTable {
        &self.q
    }

    pub fn visits(&self) -> &VisitCounter {
        &self.visits
    }

    /// Selects, acts and updates; returns the outcome, the experience and
    /// the TD error.
    pub fn learn_step(
        &mut self,
        sim: &mut Simulator,
    ) -> Result<(StageOutcome, ExperienceTuple, f64)> {
        let space = sim.model().states();
        let actions = sim.model().actions();
        let state = sim.state();
        let s = space.index(state);
        let eps = self.schedule.epsilon(sim.slot());
        let a = epsilon_greedy(self.q.row(s), eps, &mut self.rng)?;
        let action = actions.action(a);

        self.log.begin_slot();
        for m in &CENTRALIZED_MESSAGES[..4] {
            self.log.send(m);
        }
        let out = sim.step(action)?;
        for m in &CENTRALIZED_MESSAGES[4..] {
            self.log.send(m);
        }

        let et = ExperienceTuple::new(state, action, &out);
        let alpha = self.visits.next_alpha(self.q.index(s, a), &self.schedule);
        let delta = self.q.update(
            s,
            a,
            et.r,
            space.index(et.s_next),
            alpha,
            self.schedule.gamma,
        );
        Ok((out, et, delta))
    }
}

impl Controller for Centralized {
    fn step(&mut self, sim: &mut Simulator) -> Result<SlotRecord> {
        let state = sim.state();
        let (outcome, et, _) = self.learn_step(sim)?;
        Ok(SlotRecord {
            state,
            action: et.a,
            outcome,
            cells_updated: 1,
        })
    }

    fn state_values(&self) -> Option<Vec<f64>> {
        Some(self.q.state_values())
    }

    fn messages(&self) -> Option<&MessageLog> {
        Some(&self.log)
    }
}
