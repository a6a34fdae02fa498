//! Arrival-count distributions and mean costs estimated from a trace.

use serde::{Deserialize, Serialize};

use super::sample::TraceSample;
use crate::dms::config::DmsConfig;
use crate::dms::dynamics::{app_cost, arrival_count};
use crate::error::{Error, Result};

pub const DEFAULT_MIN_TRACE_LEN: usize = 10_000;

/// Per-(frequency, type, config) pmf over arrival counts plus per-(type,
/// config) mean rate-distortion cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrivalDistribution {
    pub n_frequencies: usize,
    pub n_types: usize,
    pub n_configs: usize,
    pmf: Vec<Vec<f64>>,
    mean_app_cost: Vec<f64>,
    observations: Vec<usize>,
}

impl ArrivalDistribution {
    /// Builds the distribution directly; `pmf` is indexed `[f][z][h][k]`,
    /// `mean_app_cost` `[z][h]`.
    pub fn from_parts(pmf: Vec<Vec<Vec<Vec<f64>>>>, mean_app_cost: Vec<Vec<f64>>) -> Result<Self> {
        let n_frequencies = pmf.len();
        let n_types = mean_app_cost.len();
        let n_configs = mean_app_cost.first().map_or(0, Vec::len);
        if n_frequencies == 0 || n_types == 0 || n_configs == 0 {
            return Err(Error::Model("empty arrival distribution".into()));
        }
        let mut flat = Vec::with_capacity(n_frequencies * n_types * n_configs);
        for per_f in pmf {
            if per_f.len() != n_types {
                return Err(Error::Model("pmf type dimension mismatch".into()));
            }
            for per_z in per_f {
                if per_z.len() != n_configs {
                    return Err(Error::Model("pmf config dimension mismatch".into()));
                }
                flat.extend(per_z);
            }
        }
        let costs: Vec<f64> = mean_app_cost.into_iter().flatten().collect();
        if costs.len() != n_types * n_configs {
            return Err(Error::Model("cost table dimension mismatch".into()));
        }
        let d = Self {
            n_frequencies,
            n_types,
            n_configs,
            pmf: flat,
            mean_app_cost: costs,
            observations: vec![0; n_types * n_configs],
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.pmf.iter().enumerate() {
            let sum: f64 = p.iter().sum();
            if p.iter().any(|&x| !(x >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Model(format!(
                    "arrival pmf {i} is not normalized (sum {sum})"
                )));
            }
        }
        if self.mean_app_cost.iter().any(|c| !c.is_finite()) {
            return Err(Error::Model("non-finite mean cost".into()));
        }
        Ok(())
    }

    fn cell(&self, f: usize, z: usize, h: usize) -> usize {
        (f * self.n_types + z) * self.n_configs + h
    }

    /// `pmf[k]` is the probability of `k` arrivals.
    pub fn pmf(&self, f: usize, z: usize, h: usize) -> &[f64] {
        &self.pmf[self.cell(f, z, h)]
    }

    pub fn mean_app_cost(&self, z: usize, h: usize) -> f64 {
        self.mean_app_cost[z * self.n_configs + h]
    }

    pub fn observations(&self, z: usize, h: usize) -> usize {
        self.observations[z * self.n_configs + h]
    }

    pub fn max_arrivals(&self) -> usize {
        self.pmf
            .iter()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }
}

/// Estimates arrival pmfs `floor(eta * c / f)` for every frequency and the
/// mean `d + lambda * b` for every (type, config).
pub fn empirical_arrival_distribution<'a>(
    trace: impl IntoIterator<Item = &'a TraceSample>,
    cfg: &DmsConfig,
    min_len: usize,
) -> Result<ArrivalDistribution> {
    cfg.validate()?;
    let (nf, nz, nh) = (cfg.n_frequencies(), cfg.n_types(), cfg.n_configs);
    let mut counts: Vec<Vec<u64>> = vec![Vec::new(); nf * nz * nh];
    let mut cost_sum = vec![0.0; nz * nh];
    let mut obs = vec![0usize; nz * nh];
    let mut len = 0usize;
    for s in trace {
        len += 1;
        if s.z >= nz || s.configs.len() != nh {
            return Err(Error::Trace {
                line: 0,
                message: format!(
                    "sample {} does not match {nz} types x {nh} configs",
                    s.index
                ),
            });
        }
        for (h, m) in s.configs.iter().enumerate() {
            let zh = s.z * nh + h;
            obs[zh] += 1;
            cost_sum[zh] += app_cost(m, cfg.lambda_rd);
            for f in 0..nf {
                let k = arrival_count(m.cycles, cfg.frequency_hz(f), cfg.arrival_rate);
                let row = &mut counts[(f * nz + s.z) * nh + h];
                if row.len() <= k {
                    row.resize(k + 1, 0);
                }
                row[k] += 1;
            }
        }
    }
    if len < min_len {
        return Err(Error::InvalidInput(format!(
            "trace has {len} samples, need at least {min_len}"
        )));
    }
    let missing: Vec<String> = (0..nz * nh)
        .filter(|&zh| obs[zh] == 0)
        .map(|zh| format!("(z={}, h={})", cfg.type_labels[zh / nh], zh % nh + 1))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage { missing });
    }
    let pmf = counts
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let n = obs[i % (nz * nh)] as f64;
            row.into_iter().map(|c| c as f64 / n).collect()
        })
        .collect();
    let mean_app_cost = cost_sum
        .iter()
        .zip(&obs)
        .map(|(s, &n)| s / n as f64)
        .collect();
    let d = ArrivalDistribution {
        n_frequencies: nf,
        n_types: nz,
        n_configs: nh,
        pmf,
        mean_app_cost,
        observations: obs,
    };
    d.validate()?;
    Ok(d)
}
