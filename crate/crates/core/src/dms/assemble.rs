//! Exact transition model of the system from arrival-count distributions.

use super::config::DmsConfig;
use super::dynamics::{buffer_step, utility_gain, DmsModel};
use super::space::GlobalState;
use crate::error::{Error, Result};
use crate::mdp::{FactoredModel, TransitionModel};
use crate::trace::ArrivalDistribution;

/// Buffer transition `p(q'|q)` for one arrival pmf, as sparse `(q', p)`.
pub fn buffer_transition(q: usize, arrival_pmf: &[f64], capacity: usize) -> Vec<(usize, f64)> {
    let mut mass = vec![0.0; capacity + 1];
    for (k, &p) in arrival_pmf.iter().enumerate() {
        if p > 0.0 {
            mass[buffer_step(q, k, capacity).0] += p;
        }
    }
    mass.into_iter()
        .enumerate()
        .filter(|&(_, p)| p > 0.0)
        .collect()
}

/// Layer factors: frequency switching for the OS/HW layer, type chain times
/// buffer transition for the application layer.
pub fn assemble_factored(model: &DmsModel, dist: &ArrivalDistribution) -> Result<FactoredModel> {
    let cfg: &DmsConfig = model.config();
    let (nf, nz, nh) = (cfg.n_frequencies(), cfg.n_types(), cfg.n_configs);
    if dist.n_frequencies != nf || dist.n_types != nz || dist.n_configs != nh {
        return Err(Error::Model(format!(
            "arrival distribution is {}x{}x{}, system is {nf}x{nz}x{nh}",
            dist.n_frequencies, dist.n_types, dist.n_configs
        )));
    }
    dist.validate()?;
    let space = model.states();
    let levels = cfg.n_buffer_levels();
    let n_s2 = space.n_app_states();

    let mut p1 = vec![0.0; nf * nf * nf];
    let mut r1 = vec![0.0; nf * nf];
    for f in 0..nf {
        for u in 0..nf {
            let base = (f * nf + u) * nf;
            p1[base + u] += cfg.beta;
            p1[base + f] += 1.0 - cfg.beta;
            r1[f * nf + u] = -cfg.omega_os * model.power_at(f);
        }
    }

    let mut p2 = Vec::with_capacity(nf * n_s2 * nh);
    let mut r2 = Vec::with_capacity(nf * n_s2 * nh);
    for f in 0..nf {
        for z in 0..nz {
            for q in 0..levels {
                let s = GlobalState { f, z, q };
                debug_assert_eq!(space.index(s), f * n_s2 + z * levels + q);
                for h in 0..nh {
                    let pmf = dist.pmf(f, z, h);
                    let buffer = buffer_transition(q, pmf, cfg.buffer_capacity);
                    let mut row = Vec::with_capacity(buffer.len() * nz);
                    for (zn, &pz) in cfg.type_transition[z].iter().enumerate() {
                        if pz == 0.0 {
                            continue;
                        }
                        for &(qn, pq) in &buffer {
                            row.push((zn * levels + qn, pz * pq));
                        }
                    }
                    p2.push(row);
                    let gain: f64 = pmf
                        .iter()
                        .enumerate()
                        .map(|(k, &p)| p * utility_gain(q, k, cfg.buffer_capacity, cfg.gain))
                        .sum();
                    r2.push(gain - cfg.omega_app * dist.mean_app_cost(z, h));
                }
            }
        }
    }
    let factored = FactoredModel {
        n_s1: nf,
        n_s2,
        n_a1: nf,
        n_a2: nh,
        p1,
        p2,
        r1,
        r2,
    };
    factored.check_shapes()?;
    Ok(factored)
}

/// Joint `p(s'|s,a)` and expected reward `E[g] - w_os P(f) - w_app E[J2]`.
pub fn assemble_transition_model(
    model: &DmsModel,
    dist: &ArrivalDistribution,
) -> Result<TransitionModel> {
    assemble_factored(model, dist)?.to_joint()
}
