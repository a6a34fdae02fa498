//! Online controllers: tabular Q-learning variants and baselines.

pub mod best_response;
pub mod centralized;
pub mod decomposition;
pub mod fixed;
pub mod grace;
pub mod layered;
pub mod tabular;
pub mod td_lambda;
pub mod virtual_et;

use serde::{Deserialize, Serialize};

use crate::dms::{GlobalAction, GlobalState, Simulator, StageOutcome};
use crate::error::Result;

pub use best_response::{BestResponse, LearningLayer};
pub use centralized::Centralized;
pub use decomposition::{decomposition_check, layer_one_values, DecompositionReport};
pub use fixed::FixedPolicy;
pub use grace::{lowest_frequency_meeting, Grace, GraceParams};
pub use layered::{Layered, LayeredQTables};
pub use tabular::{q_learning_on_model, QLearningRun};
pub use td_lambda::{EligibilityState, TdLambda};
pub use virtual_et::{virtual_et_at, virtual_et_expand, VirtualEt, VirtualEtLearner};

/// One observed slot, with the realized arrivals kept for virtual experience.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperienceTuple {
    pub s: GlobalState,
    pub a: GlobalAction,
    pub r: f64,
    pub s_next: GlobalState,
    pub arrivals: usize,
    pub gain: f64,
    pub cost_os: f64,
    pub cost_app: f64,
}

impl ExperienceTuple {
    pub fn new(s: GlobalState, a: GlobalAction, out: &StageOutcome) -> Self {
        Self {
            s,
            a,
            r: out.reward,
            s_next: out.next_state,
            arrivals: out.arrivals,
            gain: out.gain,
            cost_os: out.cost_os,
            cost_app: out.cost_app,
        }
    }
}

/// Inter-layer messages of the most recent slot plus a running total.
#[derive(Clone, Debug, Default)]
pub struct MessageLog {
    last: Vec<&'static str>,
    total: u64,
    slots: u64,
}

impl MessageLog {
    pub fn begin_slot(&mut self) {
        self.last.clear();
        self.slots += 1;
    }

    pub fn send(&mut self, label: &'static str) {
        self.last.push(label);
        self.total += 1;
    }

    pub fn last_slot(&self) -> &[&'static str] {
        &self.last
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn slots(&self) -> u64 {
        self.slots
    }
}

/// What a controller did in one slot.
#[derive(Clone, Copy, Debug)]
pub struct SlotRecord {
    pub state: GlobalState,
    pub action: GlobalAction,
    pub outcome: StageOutcome,
    /// Table cells written this slot.
    pub cells_updated: usize,
}

pub trait Controller: Send {
    /// Chooses an action for the simulator's current state, applies it and
    /// learns from the result.
    fn step(&mut self, sim: &mut Simulator) -> Result<SlotRecord>;

    /// Current estimate of the state values, indexed like the state space.
    fn state_values(&self) -> Option<Vec<f64>>;

    fn messages(&self) -> Option<&MessageLog> {
        None
    }
}
