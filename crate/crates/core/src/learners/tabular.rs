//! Q-learning against an explicit transition model.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{epsilon_greedy, LearningSchedule, QTable, TransitionModel, VisitCounter};

pub struct QLearningRun {
    pub q: QTable,
    pub visits: VisitCounter,
    pub final_state: usize,
}

/// Runs `steps` slots of epsilon-greedy Q-learning on `model` from `start`,
/// observing the expected reward of each pair and a sampled next state.
pub fn q_learning_on_model<R: Rng + ?Sized>(
    model: &TransitionModel,
    schedule: &LearningSchedule,
    start: usize,
    steps: u64,
    rng: &mut R,
) -> Result<QLearningRun> {
    schedule.validate()?;
    model.validate()?;
    if start >= model.n_states() {
        return Err(Error::InvalidState(format!("start state {start}")));
    }
    let (ns, na) = (model.n_states(), model.n_actions());
    let mut q = QTable::zeros(ns, na);
    let mut visits = VisitCounter::new(ns * na);
    let mut s = start;
    for n in 0..steps {
        let a = epsilon_greedy(q.row(s), schedule.epsilon(n), rng)?;
        let s_next = model.sample_next(s, a, rng);
        let alpha = visits.next_alpha(q.index(s, a), schedule);
        q.update(s, a, model.reward(s, a), s_next, alpha, schedule.gamma);
        s = s_next;
    }
    Ok(QLearningRun {
        q,
        visits,
        final_state: s,
    })
}
