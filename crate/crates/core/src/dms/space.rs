use serde::{Deserialize, Serialize};

use super::config::DmsConfig;
use crate::error::{Error, Result};

/// `(f, z, q)` by index: frequency index, data-unit type index, occupancy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlobalState {
    pub f: usize,
    pub z: usize,
    pub q: usize,
}

/// `(u, h)`: frequency command index and encoder configuration index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlobalAction {
    pub u: usize,
    pub h: usize,
}

/// Dense indexing of `frequencies x types x {0..N_q}`.
///
/// `index = (f * n_types + z) * (N_q + 1) + q`, so the frequency is the
/// outer (layer-1) factor and `(z, q)` the inner (layer-2) factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateSpace {
    pub n_frequencies: usize,
    pub n_types: usize,
    pub buffer_capacity: usize,
}

impl StateSpace {
    pub fn of(cfg: &DmsConfig) -> Self {
        Self {
            n_frequencies: cfg.n_frequencies(),
            n_types: cfg.n_types(),
            buffer_capacity: cfg.buffer_capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.n_frequencies * self.n_app_states()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|S_APP| = n_types * (N_q + 1)`
    pub fn n_app_states(&self) -> usize {
        self.n_types * (self.buffer_capacity + 1)
    }

    pub fn contains(&self, s: GlobalState) -> bool {
        s.f < self.n_frequencies && s.z < self.n_types && s.q <= self.buffer_capacity
    }

    pub fn index(&self, s: GlobalState) -> usize {
        debug_assert!(self.contains(s), "{s:?} outside state space");
        (s.f * self.n_types + s.z) * (self.buffer_capacity + 1) + s.q
    }

    pub fn state(&self, index: usize) -> GlobalState {
        let levels = self.buffer_capacity + 1;
        GlobalState {
            f: index / self.n_app_states(),
            z: (index / levels) % self.n_types,
            q: index % levels,
        }
    }

    pub fn check(&self, s: GlobalState) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::InvalidState(format!("{s:?}")))
        }
    }
}

/// Dense indexing of `commands x configs`: `index = u * n_configs + h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActionSpace {
    pub n_commands: usize,
    pub n_configs: usize,
}

impl ActionSpace {
    pub fn of(cfg: &DmsConfig) -> Self {
        Self {
            n_commands: cfg.n_frequencies(),
            n_configs: cfg.n_configs,
        }
    }

    pub fn len(&self) -> usize {
        self.n_commands * self.n_configs
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, a: GlobalAction) -> usize {
        debug_assert!(a.u < self.n_commands && a.h < self.n_configs);
        a.u * self.n_configs + a.h
    }

    pub fn action(&self, index: usize) -> GlobalAction {
        GlobalAction {
            u: index / self.n_configs,
            h: index % self.n_configs,
        }
    }
}
