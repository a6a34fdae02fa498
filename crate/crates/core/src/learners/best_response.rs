use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Controller, SlotRecord};
use crate::dms::{DmsModel, GlobalAction, Simulator};
use crate::error::{Error, Result};
use crate::mdp::{epsilon_greedy, LearningSchedule, Policy, QTable, VisitCounter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearningLayer {
    /// Learns the encoder configuration; frequency commands are fixed.
    App,
    /// Learns the frequency command; encoder configurations are fixed.
    Os,
}

/// Single-layer Q-learning against a fixed policy at the other layer,
/// driven by the global reward.
pub struct BestResponse {
    layer: LearningLayer,
    q: QTable,
    visits: VisitCounter,
    /// The other layer's local action for every global state.
    other: Vec<usize>,
    schedule: LearningSchedule,
    rng: ChaCha8Rng,
}

impl BestResponse {
    /// `other[s]` is the fixed layer's action at global state `s`.
    pub fn new(
        model: &DmsModel,
        layer: LearningLayer,
        other: Vec<usize>,
        schedule: LearningSchedule,
        seed: u64,
    ) -> Result<Self> {
        schedule.validate()?;
        let ns = model.states().len();
        let actions = model.actions();
        let (n_own, n_other) = match layer {
            LearningLayer::App => (actions.n_configs, actions.n_commands),
            LearningLayer::Os => (actions.n_commands, actions.n_configs),
        };
        if other.len() != ns {
            return Err(Error::Policy(format!(
                "fixed policy covers {} states, the system has {ns}",
                other.len()
            )));
        }
        if let Some(s) = other.iter().position(|&a| a >= n_other) {
            return Err(Error::Policy(format!(
                "fixed action {} at state {s} is out of range",
                other[s]
            )));
        }
        Ok(Self {
            layer,
            q: QTable::zeros(ns, n_own),
            visits: VisitCounter::new(ns * n_own),
            other,
            schedule,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Takes the other layer's share of a joint policy.
    pub fn from_joint_policy(
        model: &DmsModel,
        layer: LearningLayer,
        joint: &Policy,
        schedule: LearningSchedule,
        seed: u64,
    ) -> Result<Self> {
        let actions = model.actions();
        let other = joint
            .actions
            .iter()
            .map(|&a| {
                let ga = actions.action(a);
                match layer {
                    LearningLayer::App => ga.u,
                    LearningLayer::Os => ga.h,
                }
            })
            .collect();
        Self::new(model, layer, other, schedule, seed)
    }

    pub fn table(&self) -> &QTable {
        &self.q
    }
}

impl Controller for BestResponse {
    fn step(&mut self, sim: &mut Simulator) -> Result<SlotRecord> {
        let space = sim.model().states();
        let state = sim.state();
        let s = space.index(state);
        let eps = self.schedule.epsilon(sim.slot());
        let own = epsilon_greedy(self.q.row(s), eps, &mut self.rng)?;
        let action = match self.layer {
            LearningLayer::App => GlobalAction {
                u: self.other[s],
                h: own,
            },
            LearningLayer::Os => GlobalAction {
                u: own,
                h: self.other[s],
            },
        };
        let outcome = sim.step(action)?;
        let alpha = self.visits.next_alpha(self.q.index(s, own), &self.schedule);
        self.q.update(
            s,
            own,
            outcome.reward,
            space.index(outcome.next_state),
            alpha,
            self.schedule.gamma,
        );
        Ok(SlotRecord {
            state,
            action,
            outcome,
            cells_updated: 1,
        })
    }

    fn state_values(&self) -> Option<Vec<f64>> {
        Some(self.q.state_values())
    }
}
