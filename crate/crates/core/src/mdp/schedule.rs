use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum AlphaRule {
    Constant {
        value: f64,
    },
    /// `1 / (1 + visits)^exponent` per cell.
    VisitDecay {
        exponent: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum EpsilonRule {
    Constant {
        value: f64,
    },
    /// `initial / sqrt(1 + slot)`
    InverseSqrt {
        initial: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningSchedule {
    pub alpha: AlphaRule,
    pub epsilon: EpsilonRule,
    pub gamma: f64,
}

impl Default for LearningSchedule {
    fn default() -> Self {
        Self {
            alpha: AlphaRule::VisitDecay { exponent: 0.75 },
            epsilon: EpsilonRule::Constant { value: 0.1 },
            gamma: 0.9,
        }
    }
}

impl LearningSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Config(format!(
                "gamma {} outside [0, 1)",
                self.gamma
            )));
        }
        match self.alpha {
            AlphaRule::Constant { value } if !(0.0..=1.0).contains(&value) => {
                return Err(Error::Config(format!("alpha {value} outside [0, 1]")));
            }
            // (1/2, 1] keeps sum(alpha) divergent and sum(alpha^2) finite.
            AlphaRule::VisitDecay { exponent } if !(exponent > 0.5 && exponent <= 1.0) => {
                return Err(Error::Config(format!(
                    "alpha exponent {exponent} outside (0.5, 1]"
                )));
            }
            _ => {}
        }
        let eps = match self.epsilon {
            EpsilonRule::Constant { value } => value,
            EpsilonRule::InverseSqrt { initial } => initial,
        };
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Config(format!("epsilon {eps} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn alpha(&self, visits: u64) -> f64 {
        match self.alpha {
            AlphaRule::Constant { value } => value,
            AlphaRule::VisitDecay { exponent } => (1.0 + visits as f64).powf(-exponent),
        }
    }

    pub fn epsilon(&self, slot: u64) -> f64 {
        match self.epsilon {
            EpsilonRule::Constant { value } => value,
            EpsilonRule::InverseSqrt { initial } => initial / (1.0 + slot as f64).sqrt(),
        }
    }
}

/// Per-cell update counts driving the visit-decay learning rate.
#[derive(Clone, Debug)]
pub struct VisitCounter {
    counts: Vec<u64>,
}

impl VisitCounter {
    pub fn new(cells: usize) -> Self {
        Self {
            counts: vec![0; cells],
        }
    }

    /// Learning rate for this update of `cell`, then counts the update.
    pub fn next_alpha(&mut self, cell: usize, schedule: &LearningSchedule) -> f64 {
        let alpha = schedule.alpha(self.counts[cell]);
        self.counts[cell] += 1;
        alpha
    }

    pub fn count(&self, cell: usize) -> u64 {
        self.counts[cell]
    }
}
