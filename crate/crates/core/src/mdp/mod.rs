//! Generic finite-MDP machinery: tables, action selection, exact solvers.

pub mod model;
pub mod qtable;
pub mod schedule;
pub mod select;
pub mod solve;

pub use model::{FactoredModel, TransitionModel};
pub use qtable::{Policy, QTable};
pub use schedule::{AlphaRule, EpsilonRule, LearningSchedule, VisitCounter};
pub use select::{argmax, epsilon_greedy};
pub use solve::{
    bellman_residual, policy_evaluation, stationary_distribution, value_iteration,
    ValueIterationResult, DEFAULT_VI_TOL,
};
