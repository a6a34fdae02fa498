use rand::Rng;

use crate::error::{Error, Result};

/// Row normalization tolerance for transition rows.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Finite MDP with sparse transition rows and expected rewards.
///
/// Row `(s, a)` lives at `s * n_actions + a` and holds `(s_next, p)` pairs
/// with strictly positive mass.
#[derive(Clone, Debug)]
pub struct TransitionModel {
    n_states: usize,
    n_actions: usize,
    rows: Vec<Vec<(usize, f64)>>,
    rewards: Vec<f64>,
}

impl TransitionModel {
    pub fn new(
        n_states: usize,
        n_actions: usize,
        rows: Vec<Vec<(usize, f64)>>,
        rewards: Vec<f64>,
    ) -> Result<Self> {
        if rows.len() != n_states * n_actions || rewards.len() != n_states * n_actions {
            return Err(Error::Model(format!(
                "expected {} rows and rewards, got {} and {}",
                n_states * n_actions,
                rows.len(),
                rewards.len()
            )));
        }
        let model = Self {
            n_states,
            n_actions,
            rows,
            rewards,
        };
        model.validate()?;
        Ok(model)
    }

    /// Builds from dense `p[s][a][s']` and `r[s][a]`, dropping zero entries.
    pub fn from_dense(p: &[Vec<Vec<f64>>], r: &[Vec<f64>]) -> Result<Self> {
        let n_states = p.len();
        let n_actions = p.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(n_states * n_actions);
        let mut rewards = Vec::with_capacity(n_states * n_actions);
        for s in 0..n_states {
            if p[s].len() != n_actions || r.get(s).is_none_or(|rs| rs.len() != n_actions) {
                return Err(Error::Model(format!("ragged dense model at state {s}")));
            }
            for a in 0..n_actions {
                if p[s][a].len() != n_states {
                    return Err(Error::Model(format!("row ({s}, {a}) has wrong length")));
                }
                rows.push(
                    p[s][a]
                        .iter()
                        .enumerate()
                        .filter(|(_, &x)| x != 0.0)
                        .map(|(j, &x)| (j, x))
                        .collect(),
                );
                rewards.push(r[s][a]);
            }
        }
        Self::new(n_states, n_actions, rows, rewards)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            let (s, a) = (i / self.n_actions, i % self.n_actions);
            let mut sum = 0.0;
            for &(j, p) in row {
                if j >= self.n_states {
                    return Err(Error::Model(format!("row ({s}, {a}) points at state {j}")));
                }
                if !(p >= 0.0) || !p.is_finite() {
                    return Err(Error::Model(format!("row ({s}, {a}) has probability {p}")));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::Model(format!("row ({s}, {a}) sums to {sum}")));
            }
            if !self.rewards[i].is_finite() {
                return Err(Error::Model(format!("reward ({s}, {a}) is not finite")));
            }
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    #[inline]
    pub fn row(&self, s: usize, a: usize) -> &[(usize, f64)] {
        &self.rows[s * self.n_actions + a]
    }

    #[inline]
    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.rewards[s * self.n_actions + a]
    }

    pub fn prob(&self, s: usize, a: usize, s_next: usize) -> f64 {
        self.row(s, a)
            .iter()
            .filter(|(j, _)| *j == s_next)
            .map(|(_, p)| p)
            .sum()
    }

    /// `sum_{s'} p(s'|s,a) v(s')`
    #[inline]
    pub fn expect(&self, s: usize, a: usize, v: &[f64]) -> f64 {
        self.row(s, a).iter().map(|&(j, p)| p * v[j]).sum()
    }

    pub fn sample_next<R: Rng + ?Sized>(&self, s: usize, a: usize, rng: &mut R) -> usize {
        let row = self.row(s, a);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(j, p) in row {
            acc += p;
            if u < acc {
                return j;
            }
        }
        row.last().map(|&(j, _)| j).expect("empty transition row")
    }
}

/// Two-layer factored MDP.
///
/// Global state `s = s1 * n_s2 + s2`, global action `a = a1 * n_a2 + a2`.
/// Layer 1 moves on its own: `p1(s1'|s1,a1)`; layer 2 sees the whole state:
/// `p2(s2'|s,a2)`. Rewards split as `r1(s1,a1) + r2(s,a2)`.
#[derive(Clone, Debug)]
pub struct FactoredModel {
    pub n_s1: usize,
    pub n_s2: usize,
    pub n_a1: usize,
    pub n_a2: usize,
    /// Dense `[s1][a1][s1']`.
    pub p1: Vec<f64>,
    /// Sparse rows indexed by `s * n_a2 + a2`, entries `(s2', p)`.
    pub p2: Vec<Vec<(usize, f64)>>,
    /// `[s1][a1]`, the layer-1 share of the reward (a negative weighted cost).
    pub r1: Vec<f64>,
    /// `[s][a2]`, expected layer-2 reward (gain minus weighted cost).
    pub r2: Vec<f64>,
}

impl FactoredModel {
    pub fn n_states(&self) -> usize {
        self.n_s1 * self.n_s2
    }

    pub fn n_actions(&self) -> usize {
        self.n_a1 * self.n_a2
    }

    #[inline]
    pub fn p1(&self, s1: usize, a1: usize, s1_next: usize) -> f64 {
        self.p1[(s1 * self.n_a1 + a1) * self.n_s1 + s1_next]
    }

    #[inline]
    pub fn p2_row(&self, s: usize, a2: usize) -> &[(usize, f64)] {
        &self.p2[s * self.n_a2 + a2]
    }

    #[inline]
    pub fn r1(&self, s1: usize, a1: usize) -> f64 {
        self.r1[s1 * self.n_a1 + a1]
    }

    #[inline]
    pub fn r2(&self, s: usize, a2: usize) -> f64 {
        self.r2[s * self.n_a2 + a2]
    }

    pub fn check_shapes(&self) -> Result<()> {
        let n = self.n_states();
        if self.p1.len() != self.n_s1 * self.n_a1 * self.n_s1
            || self.p2.len() != n * self.n_a2
            || self.r1.len() != self.n_s1 * self.n_a1
            || self.r2.len() != n * self.n_a2
        {
            return Err(Error::Model("factor dimensions disagree".into()));
        }
        Ok(())
    }

    /// Joint model `p(s'|s,a) = p1(s1'|s1,a1) p2(s2'|s,a2)`, `r = r1 + r2`.
    pub fn to_joint(&self) -> Result<TransitionModel> {
        self.check_shapes()?;
        let (n_states, n_actions) = (self.n_states(), self.n_actions());
        let mut rows = Vec::with_capacity(n_states * n_actions);
        let mut rewards = Vec::with_capacity(n_states * n_actions);
        for s in 0..n_states {
            let s1 = s / self.n_s2;
            for a1 in 0..self.n_a1 {
                for a2 in 0..self.n_a2 {
                    let mut row = Vec::new();
                    for s1n in 0..self.n_s1 {
                        let p1 = self.p1(s1, a1, s1n);
                        if p1 == 0.0 {
                            continue;
                        }
                        for &(s2n, p2) in self.p2_row(s, a2) {
                            row.push((s1n * self.n_s2 + s2n, p1 * p2));
                        }
                    }
                    rows.push(row);
                    rewards.push(self.r1(s1, a1) + self.r2(s, a2));
                }
            }
        }
        TransitionModel::new(n_states, n_actions, rows, rewards)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unnormalized_row_rejected() {
        let p = vec![vec![vec![0.5, 0.4]], vec![vec![0.0, 1.0]]];
        let r = vec![vec![0.0], vec![0.0]];
        assert!(matches!(
            TransitionModel::from_dense(&p, &r),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn negative_probability_rejected() {
        let p = vec![vec![vec![1.5, -0.5]], vec![vec![0.0, 1.0]]];
        let r = vec![vec![0.0], vec![0.0]];
        assert!(TransitionModel::from_dense(&p, &r).is_err());
    }

    #[test]
    fn sampling_follows_row() {
        let p = vec![vec![vec![0.25, 0.75]], vec![vec![1.0, 0.0]]];
        let r = vec![vec![0.0], vec![0.0]];
        let m = TransitionModel::from_dense(&p, &r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| m.sample_next(0, 0, &mut rng) == 1)
            .count();
        assert!((hits as f64 / n as f64 - 0.75).abs() < 0.01);
    }

    #[test]
    fn joint_of_factors_is_product() {
        let f = FactoredModel {
            n_s1: 2,
            n_s2: 2,
            n_a1: 1,
            n_a2: 2,
            p1: vec![0.3, 0.7, 1.0, 0.0],
            p2: vec![
                vec![(0, 1.0)],
                vec![(0, 0.5), (1, 0.5)],
                vec![(1, 1.0)],
                vec![(0, 0.2), (1, 0.8)],
                vec![(0, 1.0)],
                vec![(1, 1.0)],
                vec![(0, 0.9), (1, 0.1)],
                vec![(1, 1.0)],
            ],
            r1: vec![-0.1, -0.2],
            r2: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
        };
        let j = f.to_joint().unwrap();
        // s = (0, 1), a = (0, 1): p1(.|0,0) = [0.3, 0.7], p2(.|s=1, a2=1) = [0.2, 0.8]
        assert!((j.prob(1, 1, 0) - 0.3 * 0.2).abs() < 1e-15);
        assert!((j.prob(1, 1, 3) - 0.7 * 0.8).abs() < 1e-15);
        assert!((j.reward(1, 1) - (-0.1 + 4.0)).abs() < 1e-15);
        assert!((j.reward(2, 0) - (-0.2 + 5.0)).abs() < 1e-15);
    }
}
