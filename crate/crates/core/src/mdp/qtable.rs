use serde::{Deserialize, Serialize};

use super::select::{argmax, max_value};
use crate::error::{Error, Result};

/// Dense action-value table, row-major by state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    n_states: usize,
    n_actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn zeros(n_states: usize, n_actions: usize) -> Self {
        Self {
            n_states,
            n_actions,
            values: vec![0.0; n_states * n_actions],
        }
    }

    pub fn from_values(n_states: usize, n_actions: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_states * n_actions {
            return Err(Error::InvalidInput(format!(
                "expected {} entries, got {}",
                n_states * n_actions,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite action value".into()));
        }
        Ok(Self {
            n_states,
            n_actions,
            values,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    #[inline]
    pub fn index(&self, s: usize, a: usize) -> usize {
        debug_assert!(s < self.n_states && a < self.n_actions);
        s * self.n_actions + a
    }

    #[inline]
    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[self.index(s, a)]
    }

    #[inline]
    pub fn set(&mut self, s: usize, a: usize, v: f64) {
        let i = self.index(s, a);
        self.values[i] = v;
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Flat `s * n_actions + a` storage. Callers must keep entries finite.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max(&self, s: usize) -> f64 {
        max_value(self.row(s))
    }

    pub fn greedy(&self, s: usize) -> usize {
        argmax(self.row(s))
    }

    /// V(s) = max_a Q(s, a) for every state.
    pub fn state_values(&self) -> Vec<f64> {
        (0..self.n_states).map(|s| self.max(s)).collect()
    }

    pub fn greedy_policy(&self) -> Policy {
        Policy {
            actions: (0..self.n_states).map(|s| self.greedy(s)).collect(),
        }
    }

    /// One Q-learning backup on cell (s, a). Returns the TD error
    /// `r + gamma * max_a' Q(s_next, a') - Q(s, a)`; only cell (s, a) changes.
    pub fn update(
        &mut self,
        s: usize,
        a: usize,
        r: f64,
        s_next: usize,
        alpha: f64,
        gamma: f64,
    ) -> f64 {
        debug_assert!((0.0..=1.0).contains(&alpha));
        let target = r + gamma * self.max(s_next);
        let i = self.index(s, a);
        let delta = target - self.values[i];
        self.values[i] += alpha * delta;
        delta
    }
}

/// Deterministic stationary policy: one action index per state index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub actions: Vec<usize>,
}

impl Policy {
    pub fn new(actions: Vec<usize>, n_actions: usize) -> Result<Self> {
        if let Some(s) = actions.iter().position(|&a| a >= n_actions) {
            return Err(Error::Policy(format!(
                "state {s} maps to action {} >= {n_actions}",
                actions[s]
            )));
        }
        Ok(Self { actions })
    }

    pub fn action(&self, s: usize) -> usize {
        self.actions[s]
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}
