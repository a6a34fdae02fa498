//! Extra backups on buffer levels that were not visited but share the
//! observed arrivals, costs and frequency/type transitions.

use log::warn;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Controller, ExperienceTuple, SlotRecord};
use crate::dms::{buffer_step, utility_gain, DmsModel, GlobalState, Simulator};
use crate::error::Result;
use crate::mdp::{epsilon_greedy, LearningSchedule, QTable, VisitCounter};

/// A synthetic experience at buffer level `s.q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirtualEt {
    pub s: GlobalState,
    pub r: f64,
    pub s_next: GlobalState,
}

/// The experience the system would have produced from buffer level `q`
/// with everything else as in `et`.
pub fn virtual_et_at(et: &ExperienceTuple, q: usize, model: &DmsModel) -> VirtualEt {
    let cfg = model.config();
    let (q_next, _) = buffer_step(q, et.arrivals, cfg.buffer_capacity);
    let gain = utility_gain(q, et.arrivals, cfg.buffer_capacity, cfg.gain);
    VirtualEt {
        s: GlobalState { q, ..et.s },
        r: model.stage_reward(gain, et.cost_os, et.cost_app),
        s_next: GlobalState {
            q: q_next,
            ..et.s_next
        },
    }
}

/// One virtual experience per buffer level, the actual level included.
pub fn virtual_et_expand(et: &ExperienceTuple, model: &DmsModel) -> Vec<VirtualEt> {
    (0..=model.config().buffer_capacity)
        .map(|q| virtual_et_at(et, q, model))
        .collect()
}

/// Q-learning plus `psi` backups per slot on virtual experiences drawn
/// uniformly without replacement from the unvisited buffer levels.
pub struct VirtualEtLearner {
    q: QTable,
    visits: VisitCounter,
    schedule: LearningSchedule,
    rng: ChaCha8Rng,
    model: DmsModel,
    psi: usize,
}

impl VirtualEtLearner {
    pub fn new(
        model: &DmsModel,
        schedule: LearningSchedule,
        psi: usize,
        seed: u64,
    ) -> Result<Self> {
        schedule.validate()?;
        let cap = model.config().buffer_capacity;
        let psi = if psi > cap {
            warn!("virtual update budget {psi} exceeds the {cap} other buffer levels; using {cap}");
            cap
        } else {
            psi
        };
        let (ns, na) = (model.states().len(), model.actions().len());
        Ok(Self {
            q: QTable::zeros(ns, na),
            visits: VisitCounter::new(ns * na),
            schedule,
            rng: ChaCha8Rng::seed_from_u64(seed),
            model: model.clone(),
            psi,
        })
    }

    pub fn psi(&self) -> usize {
        self.psi
    }

    pub fn table(&self) -> &QTable {
        &self.q
    }

    fn backup(&mut self, s: GlobalState, a: usize, r: f64, s_next: GlobalState) {
        let space = self.model.states();
        let si = space.index(s);
        let alpha = self.visits.next_alpha(self.q.index(si, a), &self.schedule);
        self.q
            .update(si, a, r, space.index(s_next), alpha, self.schedule.gamma);
    }

    /// Backs up the actual experience, then `psi` virtual ones.
    pub fn virtual_et_update(&mut self, et: &ExperienceTuple) -> usize {
        let a = self.model.actions().index(et.a);
        self.backup(et.s, a, et.r, et.s_next);
        if self.psi == 0 {
            return 1;
        }
        let others = self.model.config().buffer_capacity;
        let picks = index::sample(&mut self.rng, others, self.psi);
        for k in picks.iter() {
            // Map 0..N onto the levels other than the visited one.
            let q = if k >= et.s.q { k + 1 } else { k };
            let v = virtual_et_at(et, q, &self.model);
            self.backup(v.s, a, v.r, v.s_next);
        }
        1 + self.psi
    }
}

impl Controller for VirtualEtLearner {
    fn step(&mut self, sim: &mut Simulator) -> Result<SlotRecord> {
        let state = sim.state();
        let s = sim.state_index();
        let eps = self.schedule.epsilon(sim.slot());
        let a = epsilon_greedy(self.q.row(s), eps, &mut self.rng)?;
        let action = self.model.actions().action(a);
        let outcome = sim.step(action)?;
        let et = ExperienceTuple::new(state, action, &outcome);
        let cells_updated = self.virtual_et_update(&et);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dms::{DmsConfig, GlobalAction};

    fn et(model: &DmsModel) -> ExperienceTuple {
        let s = GlobalState { f: 2, z: 1, q: 7 };
        let out = model.resolve(s, 3, 14.2, 4, 0);
        ExperienceTuple::new(s, GlobalAction { u: 4, h: 2 }, &out)
    }

    #[test]
    fn one_per_buffer_level_and_the_actual_is_reproduced() {
        let model = DmsModel::new(DmsConfig::default()).unwrap();
        let e = et(&model);
        let all = virtual_et_expand(&e, &model);
        assert_eq!(all.len(), 51);
        let own = all[7];
        assert_eq!(own.r, e.r);
        assert_eq!(own.s_next, e.s_next);
    }

    #[test]
    fn psi_zero_leaves_the_rng_untouched() {
        let model = DmsModel::new(DmsConfig::default()).unwrap();
        let mut l = VirtualEtLearner::new(&model, LearningSchedule::default(), 0, 5).unwrap();
        let before = l.rng.clone();
        assert_eq!(l.virtual_et_update(&et(&model)), 1);
        assert_eq!(l.rng, before);
    }

    #[test]
    fn full_budget_touches_every_level() {
        let model = DmsModel::new(DmsConfig::default()).unwrap();
        let mut l = VirtualEtLearner::new(&model, LearningSchedule::default(), 50, 5).unwrap();
        let e = et(&model);
        assert_eq!(l.virtual_et_update(&e), 51);
        let a = model.actions().index(e.a);
        for q in 0..=50 {
            let s = model.states().index(GlobalState { q, ..e.s });
            assert_eq!(l.visits.count(l.q.index(s, a)), 1, "level {q}");
        }
    }

    #[test]
    fn oversized_budget_is_clamped() {
        let model = DmsModel::new(DmsConfig::default()).unwrap();
        let l = VirtualEtLearner::new(&model, LearningSchedule::default(), 80, 5).unwrap();
        assert_eq!(l.psi(), 50);
    }
}
