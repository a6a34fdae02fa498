use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rate, distortion and complexity of one data unit under one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// bits per data unit
    pub bits: f64,
    /// mean square error
    pub distortion: f64,
    /// encoding cycles
    pub cycles: f64,
}

/// One data unit with a measurement for every encoder configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub index: u64,
    pub z: usize,
    pub configs: Vec<Measurement>,
}

impl TraceSample {
    pub fn measurement(&self, h: usize) -> Result<&Measurement> {
        self.configs.get(h).ok_or_else(|| Error::Trace {
            line: 0,
            message: format!("sample {} has no configuration {h}", self.index),
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (h, m) in self.configs.iter().enumerate() {
            if !(m.bits >= 0.0) || !(m.distortion >= 0.0) || !(m.cycles > 0.0) {
                return Err(Error::Trace {
                    line: 0,
                    message: format!("sample {} config {h} violates b,d >= 0, c > 0", self.index),
                });
            }
        }
        Ok(())
    }
}
