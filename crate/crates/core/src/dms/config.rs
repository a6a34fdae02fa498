use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainMode {
    /// `1 - ((q + arrivals - 1) / N_q)^2`
    #[default]
    Proposed,
    /// 1 without overflow, otherwise minus the overflow count.
    Conventional,
}

/// Parameters of the two-layer encoder/DVFS system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DmsConfig {
    /// Operating frequencies in MHz, strictly increasing.
    pub frequencies_mhz: Vec<f64>,
    /// Probability that a frequency command takes effect in one slot.
    pub beta: f64,
    /// Power coefficient in W / Hz^theta.
    pub kappa: f64,
    pub theta: f64,
    /// Pre-encoding buffer capacity in data units.
    pub buffer_capacity: usize,
    /// Data-unit arrival rate (data units per second).
    pub arrival_rate: f64,
    pub initial_occupancy: usize,
    pub omega_os: f64,
    pub omega_app: f64,
    pub lambda_rd: f64,
    pub type_labels: Vec<String>,
    /// Row-stochastic data-unit type chain.
    pub type_transition: Vec<Vec<f64>>,
    /// Number of encoder configurations.
    pub n_configs: usize,
    pub gain: GainMode,
}

impl Default for DmsConfig {
    fn default() -> Self {
        // Stationary mix P:B:I = 3:8:1, each type kept with extra probability 1/2.
        let mix = [3.0 / 12.0, 8.0 / 12.0, 1.0 / 12.0];
        let stay = 0.5;
        let type_transition = (0..3)
            .map(|z| {
                (0..3)
                    .map(|j| (1.0 - stay) * mix[j] + if j == z { stay } else { 0.0 })
                    .collect()
            })
            .collect();
        Self {
            frequencies_mhz: vec![200.0, 400.0, 600.0, 800.0, 1000.0],
            beta: 0.9,
            kappa: 1.5e-27,
            theta: 3.0,
            buffer_capacity: 50,
            arrival_rate: 44.0,
            initial_occupancy: 0,
            omega_os: 22.0 / 125.0,
            omega_app: 22.0 / 1875.0,
            lambda_rd: 1.0 / 16.0,
            type_labels: vec!["P".into(), "B".into(), "I".into()],
            type_transition,
            n_configs: 3,
            gain: GainMode::Proposed,
        }
    }
}

impl DmsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.frequencies_mhz.is_empty() {
            return bad("no operating frequencies".into());
        }
        if self
            .frequencies_mhz
            .iter()
            .any(|&f| !(f > 0.0) || !f.is_finite())
        {
            return bad("frequencies must be positive".into());
        }
        if self.frequencies_mhz.windows(2).any(|w| w[0] >= w[1]) {
            return bad("frequencies must be strictly increasing".into());
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad(format!("beta {} outside (0, 1]", self.beta));
        }
        if self.buffer_capacity < 1 {
            return bad("buffer capacity must be at least 1".into());
        }
        if self.initial_occupancy > self.buffer_capacity {
            return bad("initial occupancy exceeds capacity".into());
        }
        if !(self.arrival_rate > 0.0) {
            return bad("arrival rate must be positive".into());
        }
        if !(self.kappa >= 0.0) || !self.theta.is_finite() {
            return bad("invalid power-frequency parameters".into());
        }
        if self.lambda_rd < 0.0 {
            return bad("lambda_rd must be non-negative".into());
        }
        if self.n_configs < 1 {
            return bad("need at least one encoder configuration".into());
        }
        let nz = self.type_labels.len();
        if nz == 0 || self.type_transition.len() != nz {
            return bad(format!("type_transition must be {nz}x{nz}"));
        }
        for (z, row) in self.type_transition.iter().enumerate() {
            if row.len() != nz || row.iter().any(|&p| !(p >= 0.0)) {
                return bad(format!("type_transition row {z} is malformed"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return bad(format!("type_transition row {z} sums to {sum}"));
            }
        }
        Ok(())
    }

    pub fn n_frequencies(&self) -> usize {
        self.frequencies_mhz.len()
    }

    pub fn n_types(&self) -> usize {
        self.type_labels.len()
    }

    pub fn n_buffer_levels(&self) -> usize {
        self.buffer_capacity + 1
    }

    pub fn frequency_hz(&self, i: usize) -> f64 {
        self.frequencies_mhz[i] * 1e6
    }

    pub fn type_index(&self, label: &str) -> Option<usize> {
        self.type_labels.iter().position(|l| l == label)
    }
}
