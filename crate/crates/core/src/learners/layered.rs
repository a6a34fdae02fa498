use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Controller, ExperienceTuple, MessageLog, SlotRecord};
use crate::dms::{DmsModel, GlobalAction, Simulator};
use crate::error::Result;
use crate::mdp::select::max_value;
use crate::mdp::{epsilon_greedy, LearningSchedule, QTable, VisitCounter};

pub const LAYERED_MESSAGES: [&str; 7] = [
    "app-state",
    "os-state",
    "app-next-state",
    "os-next-state",
    "os-next-value",
    "app-updated-value",
    "app-action",
];

/// The two local tables of the layered learner.
///
/// `q_app[(s, a2, s1')]` is the application layer's value of configuration
/// `a2` assuming the OS/HW layer lands in `s1'`; `q_os` is an ordinary
/// `|S| x (|A1| |A2|)` table with action index `a1 * n_a2 + a2`.
#[derive(Clone, Debug)]
pub struct LayeredQTables {
    pub n_states: usize,
    pub n_s1: usize,
    pub n_a1: usize,
    pub n_a2: usize,
    pub q_app: Vec<f64>,
    pub q_os: QTable,
}

impl LayeredQTables {
    pub fn zeros(n_states: usize, n_s1: usize, n_a1: usize, n_a2: usize) -> Self {
        Self {
            n_states,
            n_s1,
            n_a1,
            n_a2,
            q_app: vec![0.0; n_states * n_a2 * n_s1],
            q_os: QTable::zeros(n_states, n_a1 * n_a2),
        }
    }

    pub fn for_model(model: &DmsModel) -> Self {
        let cfg = model.config();
        Self::zeros(
            model.states().len(),
            cfg.n_frequencies(),
            cfg.n_frequencies(),
            cfg.n_configs,
        )
    }

    #[inline]
    pub fn app_index(&self, s: usize, a2: usize, s1_next: usize) -> usize {
        (s * self.n_a2 + a2) * self.n_s1 + s1_next
    }

    /// The `(a2, s1')` grid at state `s`, `a2`-major.
    pub fn app_row(&self, s: usize) -> &[f64] {
        let w = self.n_a2 * self.n_s1;
        &self.q_app[s * w..(s + 1) * w]
    }

    /// Application layer: epsilon-greedy over `(a2, s1')`.
    pub fn app_select<R: Rng + ?Sized>(
        &self,
        s: usize,
        epsilon: f64,
        rng: &mut R,
    ) -> Result<(usize, usize)> {
        let k = epsilon_greedy(self.app_row(s), epsilon, rng)?;
        Ok((k / self.n_s1, k % self.n_s1))
    }

    /// OS/HW layer: epsilon-greedy over `(a1, a2)`.
    pub fn os_select<R: Rng + ?Sized>(
        &self,
        s: usize,
        epsilon: f64,
        rng: &mut R,
    ) -> Result<(usize, usize)> {
        let k = epsilon_greedy(self.q_os.row(s), epsilon, rng)?;
        Ok((k / self.n_a2, k % self.n_a2))
    }

    /// Runs the update cascade and returns `(delta_app, delta_os)`.
    ///
    /// 1. the OS/HW layer forwards `V(s') = max Q(s', .)`;
    /// 2. the application layer updates `q_app[(s, a2, s1')]`;
    /// 3. it forwards the new value and `a2`;
    /// 4. the OS/HW layer updates `q_os[(s, a1, a2)]`.
    #[allow(clippy::too_many_arguments)]
    pub fn update(
        &mut self,
        s: usize,
        a1: usize,
        a2: usize,
        s_next: usize,
        s1_next: usize,
        app_reward: f64,
        os_reward: f64,
        alpha_app: f64,
        alpha_os: f64,
        gamma: f64,
    ) -> (f64, f64) {
        let v_next = self.q_os.max(s_next);
        let i = self.app_index(s, a2, s1_next);
        let delta_app = app_reward + gamma * v_next - self.q_app[i];
        self.q_app[i] += alpha_app * delta_app;
        let forwarded = self.q_app[i];
        let a = a1 * self.n_a2 + a2;
        let delta_os = os_reward + forwarded - self.q_os.get(s, a);
        self.q_os
            .set(s, a, self.q_os.get(s, a) + alpha_os * delta_os);
        (delta_app, delta_os)
    }

    /// `V(s) = max over (a1, a2)` of the OS/HW table.
    pub fn state_values(&self) -> Vec<f64> {
        self.q_os.state_values()
    }

    /// Largest application-table entry at `s`.
    pub fn app_max(&self, s: usize) -> f64 {
        max_value(self.app_row(s))
    }
}

/// Decentralized learner: each layer picks its own action from its own table
/// with its own exploration draw and they exchange two scalars per slot.
pub struct Layered {
    tables: LayeredQTables,
    app_visits: VisitCounter,
    os_visits: VisitCounter,
    schedule: LearningSchedule,
    rng: ChaCha8Rng,
    log: MessageLog,
    omega_os: f64,
    omega_app: f64,
}

impl Layered {
    pub fn new(model: &DmsModel, schedule: LearningSchedule, seed: u64) -> Result<Self> {
        schedule.validate()?;
        let tables = LayeredQTables::for_model(model);
        Ok(Self {
            app_visits: VisitCounter::new(tables.q_app.len()),
            os_visits: VisitCounter::new(tables.q_os.values().len()),
            tables,
            schedule,
            rng: ChaCha8Rng::seed_from_u64(seed),
            log: MessageLog::default(),
            omega_os: model.config().omega_os,
            omega_app: model.config().omega_app,
        })
    }

    pub fn tables(&self) -> &LayeredQTables {
        &self.tables
    }
}

impl Controller for Layered {
    fn step(&mut self, sim: &mut Simulator) -> Result<SlotRecord> {
        let space = sim.model().states();
        let state = sim.state();
        let s = space.index(state);
        let eps = self.schedule.epsilon(sim.slot());

        self.log.begin_slot();
        self.log.send(LAYERED_MESSAGES[0]);
        self.log.send(LAYERED_MESSAGES[1]);
        let (a2, _) = self.tables.app_select(s, eps, &mut self.rng)?;
        let (a1, _) = self.tables.os_select(s, eps, &mut self.rng)?;
        let action = GlobalAction { u: a1, h: a2 };
        let outcome = sim.step(action)?;
        self.log.send(LAYERED_MESSAGES[2]);
        self.log.send(LAYERED_MESSAGES[3]);

        let et = ExperienceTuple::new(state, action, &outcome);
        let s_next = space.index(et.s_next);
        let s1_next = et.s_next.f;
        let alpha_app = self
            .app_visits
            .next_alpha(self.tables.app_index(s, a2, s1_next), &self.schedule);
        let alpha_os = self.os_visits.next_alpha(
            self.tables.q_os.index(s, a1 * self.tables.n_a2 + a2),
            &self.schedule,
        );
        self.log.send(LAYERED_MESSAGES[4]);
        self.tables.update(
            s,
            a1,
            a2,
            s_next,
            s1_next,
            et.gain - self.omega_app * et.cost_app,
            -self.omega_os * et.cost_os,
            alpha_app,
            alpha_os,
            self.schedule.gamma,
        );
        self.log.send(LAYERED_MESSAGES[5]);
        self.log.send(LAYERED_MESSAGES[6]);
        Ok(SlotRecord {
            state,
            action,
            outcome,
            cells_updated: 2,
        })
    }

    fn state_values(&self) -> Option<Vec<f64>> {
        Some(self.tables.state_values())
    }

    fn messages(&self) -> Option<&MessageLog> {
        Some(&self.log)
    }
}
