use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dynamics::{DmsModel, StageOutcome};
use super::space::{GlobalAction, GlobalState};
use crate::error::Result;
use crate::trace::{TraceSample, TraceSource};

/// A running system: owns the trace stream and the environment randomness.
///
/// The environment consumes the same random numbers whatever the controller
/// does, so two controllers run with the same seed see the same data units
/// and the same switch and type draws.
pub struct Simulator {
    model: DmsModel,
    source: Box<dyn TraceSource>,
    rng: ChaCha8Rng,
    state: GlobalState,
    sample: TraceSample,
    slot: u64,
}

impl Simulator {
    pub fn new(model: DmsModel, mut source: Box<dyn TraceSource>, seed: u64) -> Result<Self> {
        let state = GlobalState {
            f: 0,
            z: 0,
            q: model.config().initial_occupancy,
        };
        let sample = source.next_sample(state.z)?;
        Ok(Self {
            model,
            source,
            rng: ChaCha8Rng::seed_from_u64(seed),
            state,
            sample,
            slot: 0,
        })
    }

    pub fn model(&self) -> &DmsModel {
        &self.model
    }

    pub fn state(&self) -> GlobalState {
        self.state
    }

    pub fn state_index(&self) -> usize {
        self.model.states().index(self.state)
    }

    /// Number of completed slots.
    pub fn slot(&self) -> u64 {
        self.slot
    }

    /// Encodes the current data unit under `action` and advances one slot.
    pub fn step(&mut self, action: GlobalAction) -> Result<StageOutcome> {
        let out = self
            .model
            .step(self.state, action, &self.sample, &mut self.rng)?;
        self.state = out.next_state;
        self.sample = self.source.next_sample(self.state.z)?;
        self.slot += 1;
        Ok(out)
    }
}
