//! The two-layer encoder / frequency-scaling system.

pub mod assemble;
pub mod config;
pub mod dynamics;
pub mod sim;
pub mod space;

pub use assemble::{assemble_factored, assemble_transition_model, buffer_transition};
pub use config::{DmsConfig, GainMode};
pub use dynamics::{app_cost, arrival_count, buffer_step, utility_gain, DmsModel, StageOutcome};
pub use sim::Simulator;
pub use space::{ActionSpace, GlobalAction, GlobalState, StateSpace};
