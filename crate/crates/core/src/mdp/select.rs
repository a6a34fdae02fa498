use rand::Rng;

use crate::error::{Error, Result};

/// Index of the largest entry; ties go to the lowest index.
///
/// Panics on an empty slice.
pub fn argmax(values: &[f64]) -> usize {
    assert!(!values.is_empty(), "argmax of empty slice");
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn max_value(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// With probability `1 - epsilon` the greedy index, otherwise a uniform draw
/// over all indices (which can also land on the greedy one).
///
/// Exactly one uniform is consumed per call, plus one index draw when
/// exploring, so callers replaying a seed see the same stream.
pub fn epsilon_greedy<R: Rng + ?Sized>(q_row: &[f64], epsilon: f64, rng: &mut R) -> Result<usize> {
    if q_row.is_empty() {
        return Err(Error::InvalidInput("empty action-value row".into()));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} outside [0, 1]"
        )));
    }
    let u: f64 = rng.random();
    if u < epsilon {
        Ok(rng.random_range(0..q_row.len()))
    } else {
        Ok(argmax(q_row))
    }
}
