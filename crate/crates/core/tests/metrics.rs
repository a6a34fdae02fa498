use dmsrl_core::metrics::{summarize, weighted_estimation_error, RunStats, SlotEntry};
use proptest::prelude::*;

fn entry(slot: u64, reward: f64, power: f64, overflow: usize) -> SlotEntry {
    SlotEntry {
        slot,
        reward,
        gain: 1.0 - overflow as f64,
        power,
        rate_distortion: 2.0 * power,
        overflow,
        q: 0,
        f: 0,
        z: 0,
        u: 0,
        h: 0,
    }
}

proptest! {
    #[test]
    fn running_sums_match_a_recomputation(
        rows in prop::collection::vec((-2.0f64..2.0, 0.0f64..4.0, 0usize..3), 1..300),
    ) {
        let mut stats = RunStats::new(0);
        for (n, &(r, p, o)) in rows.iter().enumerate() {
            stats.push(entry(n as u64, r, p, o));
        }
        let (mut r_sum, mut p_sum, mut o_sum) = (0.0, 0.0, 0u64);
        for (n, &(r, p, o)) in rows.iter().enumerate() {
            r_sum += r;
            p_sum += p;
            o_sum += o as u64;
            prop_assert_eq!(stats.cumulative_average_reward()[n], r_sum / (n + 1) as f64);
        }
        let s = summarize(&stats).unwrap();
        prop_assert_eq!(s.slots, rows.len() as u64);
        prop_assert_eq!(s.avg_reward, r_sum / rows.len() as f64);
        prop_assert_eq!(s.avg_power, p_sum / rows.len() as f64);
        prop_assert_eq!(s.total_overflows, o_sum);
    }

    #[test]
    fn weighted_error_vanishes_exactly_when_estimates_agree_on_the_support(
        truth in prop::collection::vec(0.5f64..3.0, 2..12),
        noise in prop::collection::vec(-1.0f64..1.0, 12),
        support in prop::collection::vec(any::<bool>(), 12),
    ) {
        let n = truth.len();
        let mut weights: Vec<f64> = (0..n).map(|i| if support[i] { 1.0 } else { 0.0 }).collect();
        weights[0] = 1.0;
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);

        // Off-support disagreement never counts.
        let off: Vec<f64> = (0..n).map(|i| if weights[i] > 0.0 { truth[i] } else { truth[i] + 5.0 }).collect();
        prop_assert_eq!(weighted_estimation_error(&truth, &off, &weights).unwrap(), 0.0);

        let est: Vec<f64> = (0..n).map(|i| truth[i] + noise[i]).collect();
        let err = weighted_estimation_error(&truth, &est, &weights).unwrap();
        let disagrees = (0..n).any(|i| weights[i] > 0.0 && noise[i] != 0.0);
        prop_assert_eq!(err > 0.0, disagrees);
    }
}

#[test]
fn checkpoints_follow_the_interval() {
    let mut stats = RunStats::new(3);
    let mut taken = Vec::new();
    for n in 0..10 {
        stats.push(entry(n, 0.0, 0.0, 0));
        if stats.checkpoint_due() {
            stats.checkpoint(vec![n as f64]);
            taken.push(stats.len());
        }
    }
    assert_eq!(taken, vec![3, 6, 9]);
    assert_eq!(stats.checkpoints().len(), 3);
}

#[test]
fn mismatched_lengths_are_rejected() {
    assert!(weighted_estimation_error(&[1.0, 2.0], &[1.0], &[0.5, 0.5]).is_err());
}
