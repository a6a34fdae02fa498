use super::{Controller, SlotRecord};
use crate::dms::{DmsModel, Simulator};
use crate::error::{Error, Result};
use crate::mdp::Policy;

/// Plays a fixed joint policy without learning (for example the greedy
/// policy of the exact solution).
pub struct FixedPolicy {
    policy: Policy,
    values: Option<Vec<f64>>,
}

impl FixedPolicy {
    pub fn new(model: &DmsModel, policy: Policy, values: Option<Vec<f64>>) -> Result<Self> {
        let ns = model.states().len();
        if policy.len() != ns {
            return Err(Error::Policy(format!(
                "policy covers {} states, the system has {ns}",
                policy.len()
            )));
        }
        if policy.actions.iter().any(|&a| a >= model.actions().len()) {
            return Err(Error::Policy("policy action out of range".into()));
        }
        Ok(Self { policy, values })
    }
}

impl Controller for FixedPolicy {
    fn step(&mut self, sim: &mut Simulator) -> Result<SlotRecord> {
        let state = sim.state();
        let action = sim
            .model()
            .actions()
            .action(self.policy.action(sim.state_index()));
        let outcome = sim.step(action)?;
        Ok(SlotRecord {
            state,
            action,
            outcome,
            cells_updated: 0,
        })
    }

    fn state_values(&self) -> Option<Vec<f64>> {
        self.values.clone()
    }
}
