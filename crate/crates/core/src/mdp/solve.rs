//! Exact solvers over a known [`TransitionModel`].

use super::model::TransitionModel;
use super::qtable::{Policy, QTable};
use crate::error::{Error, Result};

pub const DEFAULT_VI_TOL: f64 = 1e-8;

/// Mass moved toward the uniform distribution before power iteration.
pub const STATIONARY_DAMPING: f64 = 1e-6;

const VI_MAX_ITERATIONS: usize = 1_000_000;
const STATIONARY_MAX_ITERATIONS: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct ValueIterationResult {
    pub q: QTable,
    pub policy: Policy,
    pub values: Vec<f64>,
    pub iterations: usize,
}

/// Iterates `Q <- r + gamma * P max Q` until successive iterates differ by at
/// most `tol` in sup-norm. The returned Q therefore has Bellman residual at
/// most `gamma * tol`.
pub fn value_iteration(
    model: &TransitionModel,
    gamma: f64,
    tol: f64,
) -> Result<ValueIterationResult> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidInput(format!(
            "discount {gamma} outside [0, 1)"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance {tol} must be positive"
        )));
    }
    model.validate()?;

    let (ns, na) = (model.n_states(), model.n_actions());
    let mut q = QTable::zeros(ns, na);
    let mut v = vec![0.0; ns];
    let mut next = vec![0.0; ns * na];
    for iteration in 1..=VI_MAX_ITERATIONS {
        let mut diff = 0.0f64;
        for s in 0..ns {
            for a in 0..na {
                let i = s * na + a;
                next[i] = model.reward(s, a) + gamma * model.expect(s, a, &v);
                diff = diff.max((next[i] - q.values()[i]).abs());
            }
        }
        q = QTable::from_values(ns, na, next.clone())?;
        v = q.state_values();
        if diff <= tol {
            let policy = q.greedy_policy();
            return Ok(ValueIterationResult {
                q,
                policy,
                values: v,
                iterations: iteration,
            });
        }
    }
    Err(Error::Numerical {
        iterations: VI_MAX_ITERATIONS,
        residual: bellman_residual(model, &q, gamma),
    })
}

/// `max |T Q - Q|` over all cells.
pub fn bellman_residual(model: &TransitionModel, q: &QTable, gamma: f64) -> f64 {
    let v = q.state_values();
    let mut worst = 0.0f64;
    for s in 0..model.n_states() {
        for a in 0..model.n_actions() {
            let backed = model.reward(s, a) + gamma * model.expect(s, a, &v);
            worst = worst.max((backed - q.get(s, a)).abs());
        }
    }
    worst
}

/// Stationary distribution of the chain induced by `policy`.
///
/// The chain is damped toward uniform by [`STATIONARY_DAMPING`] so the fixed
/// point is unique, then power-iterated in its lazy form `(I + P) / 2` from the
/// uniform start. The lazy chain has the same fixed point and is aperiodic.
/// Convergence is declared when `||mu P - mu||_1 <= tol` for the damped chain.
pub fn stationary_distribution(
    model: &TransitionModel,
    policy: &Policy,
    tol: f64,
) -> Result<Vec<f64>> {
    model.validate()?;
    let ns = model.n_states();
    if policy.len() != ns {
        return Err(Error::Policy(format!(
            "policy covers {} states, model has {ns}",
            policy.len()
        )));
    }
    if let Some(s) = (0..ns).find(|&s| policy.action(s) >= model.n_actions()) {
        return Err(Error::Policy(format!("invalid action at state {s}")));
    }

    let d = STATIONARY_DAMPING;
    let uniform = 1.0 / ns as f64;
    let step = |mu: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|x| *x = d * uniform);
        for (s, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for &(j, p) in model.row(s, policy.action(s)) {
                out[j] += (1.0 - d) * m * p;
            }
        }
    };

    let mut mu = vec![uniform; ns];
    let mut moved = vec![0.0; ns];
    let mut residual = f64::INFINITY;
    for _ in 0..STATIONARY_MAX_ITERATIONS {
        step(&mu, &mut moved);
        residual = mu.iter().zip(&moved).map(|(a, b)| (a - b).abs()).sum();
        if residual <= tol {
            let total: f64 = mu.iter().sum();
            mu.iter_mut().for_each(|x| *x /= total);
            return Ok(mu);
        }
        let mut total = 0.0;
        for (m, p) in mu.iter_mut().zip(&moved) {
            *m = 0.5 * (*m + p);
            total += *m;
        }
        mu.iter_mut().for_each(|x| *x /= total);
    }
    Err(Error::Numerical {
        iterations: STATIONARY_MAX_ITERATIONS,
        residual,
    })
}

/// Value of a fixed policy by iterating its Bellman operator to `tol`.
pub fn policy_evaluation(
    model: &TransitionModel,
    policy: &Policy,
    gamma: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidInput(format!(
            "discount {gamma} outside [0, 1)"
        )));
    }
    let ns = model.n_states();
    if policy.len() != ns {
        return Err(Error::Policy("policy/model size mismatch".into()));
    }
    let mut v = vec![0.0; ns];
    for _ in 0..VI_MAX_ITERATIONS {
        let mut diff = 0.0f64;
        let next: Vec<f64> = (0..ns)
            .map(|s| {
                let a = policy.action(s);
                model.reward(s, a) + gamma * model.expect(s, a, &v)
            })
            .collect();
        for (a, b) in v.iter().zip(&next) {
            diff = diff.max((a - b).abs());
        }
        v = next;
        if diff <= tol {
            return Ok(v);
        }
    }
    Err(Error::Numerical {
        iterations: VI_MAX_ITERATIONS,
        residual: f64::NAN,
    })
}
