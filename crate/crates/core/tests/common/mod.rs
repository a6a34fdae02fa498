#![allow(dead_code)]

use dmsrl_core::dms::{DmsConfig, DmsModel};
use dmsrl_core::mdp::{FactoredModel, TransitionModel};
use dmsrl_core::trace::{
    CellParams, ClippedNormal, ComplexityDist, ReplayTrace, ResampleSource, StationarySource,
    SynthParams, TraceSample, TraceSource,
};
use rand::Rng;

/// Two frequencies, two types, two configs, a five-slot buffer.
pub fn reduced_config() -> DmsConfig {
    DmsConfig {
        frequencies_mhz: vec![400.0, 800.0],
        buffer_capacity: 5,
        type_labels: vec!["P".into(), "I".into()],
        type_transition: vec![vec![0.8, 0.2], vec![0.6, 0.4]],
        n_configs: 2,
        ..DmsConfig::default()
    }
}

/// Complexities with a handful of atoms so arrivals take values 0..=2.
pub fn reduced_params() -> SynthParams {
    let cell = |values: Vec<f64>, weights: Vec<f64>, d: f64, b: f64| CellParams {
        complexity: ComplexityDist::Histogram { values, weights },
        bits: ClippedNormal {
            mean: b,
            std: 0.1 * b,
        },
        distortion: ClippedNormal {
            mean: d,
            std: 0.1 * d,
        },
    };
    SynthParams {
        cells: vec![
            vec![
                cell(vec![5e6, 12e6, 25e6], vec![0.3, 0.5, 0.2], 5.0, 130.0),
                cell(vec![5e6, 12e6], vec![0.6, 0.4], 6.5, 140.0),
            ],
            vec![
                cell(vec![12e6, 25e6, 40e6], vec![0.2, 0.5, 0.3], 6.0, 170.0),
                cell(vec![12e6, 25e6], vec![0.5, 0.5], 7.5, 180.0),
            ],
        ],
    }
}

pub fn reduced_model() -> DmsModel {
    DmsModel::new(reduced_config()).unwrap()
}

/// A recorded sample of the reduced generator and a source that resamples
/// it, so the empirical distribution of the recording is exactly the law
/// of the stream.
pub fn reduced_recording(len: usize, seed: u64) -> (Vec<TraceSample>, ResampleSource) {
    let gen = StationarySource::new(&reduced_params(), seed).unwrap();
    let samples = gen.reference_samples(len, seed).unwrap();
    let source =
        ResampleSource::new(ReplayTrace::new(samples.clone()).unwrap(), 2, seed + 1).unwrap();
    (samples, source)
}

fn random_simplex<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

pub fn random_mdp<R: Rng>(n_states: usize, n_actions: usize, rng: &mut R) -> TransitionModel {
    let p: Vec<Vec<Vec<f64>>> = (0..n_states)
        .map(|_| {
            (0..n_actions)
                .map(|_| random_simplex(n_states, rng))
                .collect()
        })
        .collect();
    let r: Vec<Vec<f64>> = (0..n_states)
        .map(|_| {
            (0..n_actions)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect();
    TransitionModel::from_dense(&p, &r).unwrap()
}

pub fn random_factored<R: Rng>(
    n_s1: usize,
    n_s2: usize,
    n_a1: usize,
    n_a2: usize,
    rng: &mut R,
) -> FactoredModel {
    let n = n_s1 * n_s2;
    let p1 = (0..n_s1 * n_a1)
        .flat_map(|_| random_simplex(n_s1, rng))
        .collect();
    let p2 = (0..n * n_a2)
        .map(|_| random_simplex(n_s2, rng).into_iter().enumerate().collect())
        .collect();
    FactoredModel {
        n_s1,
        n_s2,
        n_a1,
        n_a2,
        p1,
        p2,
        r1: (0..n_s1 * n_a1)
            .map(|_| rng.random_range(-1.0..0.0))
            .collect(),
        r2: (0..n * n_a2).map(|_| rng.random_range(-1.0..1.0)).collect(),
    }
}
