//! Exact two-stage evaluation of the optimal action values.

use crate::error::{Error, Result};
use crate::mdp::{value_iteration, FactoredModel, QTable, TransitionModel, ValueIterationResult};

const CONSISTENCY_TOL: f64 = 1e-9;

pub struct DecompositionReport {
    /// `max |Q_reassembled - Q*|`
    pub discrepancy: f64,
    pub solution: ValueIterationResult,
    /// Optimal application-layer values indexed `(s * n_a2 + a2) * n_s1 + s1'`.
    pub q_app: Vec<f64>,
    pub reassembled: QTable,
}

/// Application-layer values for fixed state values `v`:
/// `Q1(s, a2, s1') = r2(s, a2) + gamma * sum_s2' p2(s2'|s, a2) v(s1', s2')`.
pub fn layer_one_values(factors: &FactoredModel, v: &[f64], gamma: f64) -> Vec<f64> {
    let (n_s1, n_s2, n_a2) = (factors.n_s1, factors.n_s2, factors.n_a2);
    let mut q_app = vec![0.0; factors.n_states() * n_a2 * n_s1];
    for s in 0..factors.n_states() {
        for a2 in 0..n_a2 {
            let row = factors.p2_row(s, a2);
            for s1n in 0..n_s1 {
                let future: f64 = row.iter().map(|&(s2n, p)| p * v[s1n * n_s2 + s2n]).sum();
                q_app[(s * n_a2 + a2) * n_s1 + s1n] = factors.r2(s, a2) + gamma * future;
            }
        }
    }
    q_app
}

/// Reassembles `Q(s, a1, a2) = r1(s1, a1) + sum_s1' p1(s1'|s1, a1) Q1(s, a2, s1')`.
fn reassemble(factors: &FactoredModel, q_app: &[f64]) -> Result<QTable> {
    let (n_s1, n_a1, n_a2) = (factors.n_s1, factors.n_a1, factors.n_a2);
    let mut values = Vec::with_capacity(factors.n_states() * factors.n_actions());
    for s in 0..factors.n_states() {
        let s1 = s / factors.n_s2;
        for a1 in 0..n_a1 {
            for a2 in 0..n_a2 {
                let inner: f64 = (0..n_s1)
                    .map(|s1n| factors.p1(s1, a1, s1n) * q_app[(s * n_a2 + a2) * n_s1 + s1n])
                    .sum();
                values.push(factors.r1(s1, a1) + inner);
            }
        }
    }
    QTable::from_values(factors.n_states(), factors.n_actions(), values)
}

fn check_consistency(joint: &TransitionModel, factors: &FactoredModel) -> Result<()> {
    factors.check_shapes()?;
    if joint.n_states() != factors.n_states() || joint.n_actions() != factors.n_actions() {
        return Err(Error::Model(
            "joint and factored models have different sizes".into(),
        ));
    }
    let product = factors.to_joint()?;
    let mut dense = vec![0.0; joint.n_states()];
    for s in 0..joint.n_states() {
        for a in 0..joint.n_actions() {
            if (joint.reward(s, a) - product.reward(s, a)).abs() > CONSISTENCY_TOL {
                return Err(Error::Model(format!("reward mismatch at (s={s}, a={a})")));
            }
            for &(sn, p) in joint.row(s, a) {
                dense[sn] += p;
            }
            for &(sn, p) in product.row(s, a) {
                dense[sn] -= p;
            }
            if dense.iter().any(|d| d.abs() > CONSISTENCY_TOL) {
                return Err(Error::Model(format!(
                    "transition mismatch at (s={s}, a={a})"
                )));
            }
            for &(sn, _) in joint.row(s, a).iter().chain(product.row(s, a)) {
                dense[sn] = 0.0;
            }
        }
    }
    Ok(())
}

/// Solves the joint model, evaluates the application-layer values from the
/// optimal state values and rebuilds the full table from them.
pub fn decomposition_check(
    joint: &TransitionModel,
    factors: &FactoredModel,
    gamma: f64,
    tol: f64,
) -> Result<DecompositionReport> {
    check_consistency(joint, factors)?;
    let solution = value_iteration(joint, gamma, tol)?;
    let q_app = layer_one_values(factors, &solution.values, gamma);
    let reassembled = reassemble(factors, &q_app)?;
    let discrepancy = reassembled
        .values()
        .iter()
        .zip(solution.q.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(DecompositionReport {
        discrepancy,
        solution,
        q_app,
        reassembled,
    })
}
