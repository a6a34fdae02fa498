mod common;

use dmsrl_core::dms::{
    assemble_factored, assemble_transition_model, DmsConfig, DmsModel, GlobalAction, GlobalState,
    Simulator,
};
use dmsrl_core::learners::centralized::CENTRALIZED_MESSAGES;
use dmsrl_core::learners::layered::LAYERED_MESSAGES;
use dmsrl_core::learners::{
    layer_one_values, virtual_et_at, virtual_et_expand, BestResponse, Centralized, Controller,
    ExperienceTuple, Grace, GraceParams, Layered, LayeredQTables, LearningLayer, TdLambda,
    VirtualEtLearner,
};
use dmsrl_core::mdp::{
    policy_evaluation, stationary_distribution, value_iteration, AlphaRule, EpsilonRule,
    LearningSchedule, Policy,
};
use dmsrl_core::metrics::weighted_estimation_error;
use dmsrl_core::trace::{
    empirical_arrival_distribution, CellParams, ComplexityDist, ReplayTrace, ResampleSource,
    StationarySource, SynthParams, TraceSource,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn default_sim(seed: u64) -> Simulator {
    let model = DmsModel::new(DmsConfig::default()).unwrap();
    let source = StationarySource::new(&SynthParams::default_video(), seed).unwrap();
    Simulator::new(model, Box::new(source), seed + 100).unwrap()
}

#[test]
fn myopic_unit_rate_stores_the_reward() {
    let mut sim = default_sim(1);
    let schedule = LearningSchedule {
        alpha: AlphaRule::Constant { value: 1.0 },
        epsilon: EpsilonRule::Constant { value: 0.3 },
        gamma: 0.0,
    };
    let mut c = Centralized::new(sim.model(), schedule, 2).unwrap();
    for _ in 0..50 {
        let s = sim.state_index();
        let rec = c.step(&mut sim).unwrap();
        let a = sim.model().actions().index(rec.action);
        assert_eq!(c.table().get(s, a), rec.outcome.reward);
    }
}

#[test]
fn message_counts_per_slot() {
    let mut sim = default_sim(3);
    let mut c = Centralized::new(sim.model(), LearningSchedule::default(), 4).unwrap();
    for _ in 0..25 {
        c.step(&mut sim).unwrap();
        assert_eq!(c.messages().unwrap().last_slot(), &CENTRALIZED_MESSAGES[..]);
    }
    assert_eq!(c.messages().unwrap().total(), 8 * 25);

    let mut sim = default_sim(3);
    let mut l = Layered::new(sim.model(), LearningSchedule::default(), 4).unwrap();
    for _ in 0..25 {
        l.step(&mut sim).unwrap();
        assert_eq!(l.messages().unwrap().last_slot(), &LAYERED_MESSAGES[..]);
    }
    assert_eq!(l.messages().unwrap().total(), 7 * 25);
}

#[test]
fn cells_touched_per_slot() {
    let schedule = LearningSchedule::default();
    let mut controllers: Vec<(Box<dyn Controller>, usize, bool)> = {
        let m = DmsModel::new(DmsConfig::default()).unwrap();
        vec![
            (
                Box::new(Centralized::new(&m, schedule, 1).unwrap()),
                1,
                true,
            ),
            (Box::new(Layered::new(&m, schedule, 1).unwrap()), 2, true),
            (
                Box::new(VirtualEtLearner::new(&m, schedule, 15, 1).unwrap()),
                16,
                true,
            ),
            (
                Box::new(TdLambda::new(&m, schedule, 0.8, 15, 1).unwrap()),
                16,
                false,
            ),
        ]
    };
    for (c, budget, exact) in controllers.iter_mut() {
        let mut sim = default_sim(5);
        for _ in 0..200 {
            let n = c.step(&mut sim).unwrap().cells_updated;
            if *exact {
                assert_eq!(n, *budget);
            } else {
                assert!(n >= 1 && n <= *budget);
            }
        }
    }
}

#[test]
fn zero_budgets_reduce_to_centralized_learning() {
    let m = DmsModel::new(DmsConfig::default()).unwrap();
    let schedule = LearningSchedule::default();
    let slots = 5_000;

    let mut reference = Centralized::new(&m, schedule, 9).unwrap();
    let mut sim = default_sim(8);
    for _ in 0..slots {
        reference.step(&mut sim).unwrap();
    }
    let expected = reference.table().values().to_vec();

    let mut vet = VirtualEtLearner::new(&m, schedule, 0, 9).unwrap();
    let mut sim = default_sim(8);
    for _ in 0..slots {
        vet.step(&mut sim).unwrap();
    }
    assert_eq!(vet.table().values(), &expected[..]);

    for (lambda, psi) in [(0.0, 15), (0.8, 0)] {
        let mut td = TdLambda::new(&m, schedule, lambda, psi, 9).unwrap();
        let mut sim = default_sim(8);
        for _ in 0..slots {
            td.step(&mut sim).unwrap();
        }
        assert_eq!(
            td.table().values(),
            &expected[..],
            "lambda {lambda}, psi {psi}"
        );
    }
}

#[test]
fn virtual_experience_matches_forced_steps_on_random_tuples() {
    let model = DmsModel::new(DmsConfig::default()).unwrap();
    let mut source = StationarySource::new(&SynthParams::default_video(), 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (states, actions) = (model.states(), model.actions());
    for _ in 0..2_000 {
        let s = states.state(rng.random_range(0..states.len()));
        let a = actions.action(rng.random_range(0..actions.len()));
        let sample = source.next_sample(s.z).unwrap();
        let out = model.step(s, a, &sample, &mut rng).unwrap();
        let et = ExperienceTuple::new(s, a, &out);
        for v in virtual_et_expand(&et, &model) {
            let forced = model
                .forced_step(v.s, a, &sample, et.s_next.f, et.s_next.z)
                .unwrap();
            assert_eq!(v.s_next, forced.next_state);
            assert!((v.r - forced.reward).abs() <= 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn every_level_of_a_virtual_expansion_is_a_valid_state(
        q in 0usize..=50, f in 0usize..5, z in 0usize..3, k in 0usize..6, u in 0usize..5, h in 0usize..3,
    ) {
        let model = DmsModel::new(DmsConfig::default()).unwrap();
        let s = GlobalState { f, z, q };
        let out = model.resolve(s, k, 14.0, u, (z + 1) % 3);
        let et = ExperienceTuple::new(s, GlobalAction { u, h }, &out);
        for qv in 0..=50 {
            let v = virtual_et_at(&et, qv, &model);
            prop_assert!(model.states().contains(v.s_next));
            prop_assert_eq!(v.s_next.f, u);
            prop_assert!(v.s_next.q as i64 - qv as i64 >= -1);
        }
    }
}

/// Exact model of the default system from a recording, plus a resampling
/// source whose law is that recording.
fn exact_default(seed: u64) -> (DmsModel, dmsrl_core::mdp::FactoredModel, ResampleSource) {
    let model = DmsModel::new(DmsConfig::default()).unwrap();
    let gen = StationarySource::new(&SynthParams::default_video(), seed).unwrap();
    let samples = gen.reference_samples(60_000, seed).unwrap();
    let dist = empirical_arrival_distribution(&samples, model.config(), 10_000).unwrap();
    let factors = assemble_factored(&model, &dist).unwrap();
    let source = ResampleSource::new(ReplayTrace::new(samples).unwrap(), 3, seed + 1).unwrap();
    (model, factors, source)
}

#[test]
fn optimal_layer_tables_give_zero_mean_temporal_differences() {
    let (model, factors, source) = exact_default(21);
    let joint = factors.to_joint().unwrap();
    let gamma = 0.9;
    let sol = value_iteration(&joint, gamma, 1e-10).unwrap();
    let mut tables = LayeredQTables::for_model(&model);
    tables.q_app = layer_one_values(&factors, &sol.values, gamma);
    tables.q_os = sol.q.clone();

    let cfg = model.config().clone();
    let mut sim = Simulator::new(model.clone(), Box::new(source), 22).unwrap();
    let (mut sum_app, mut sum_os) = (0.0, 0.0);
    let n = 100_000;
    for _ in 0..n {
        let s = sim.state_index();
        let a = model.actions().action(sol.policy.action(s));
        let out = sim.step(a).unwrap();
        let s_next = model.states().index(out.next_state);
        let (d_app, d_os) = tables.update(
            s,
            a.u,
            a.h,
            s_next,
            out.next_state.f,
            out.gain - cfg.omega_app * out.cost_app,
            -cfg.omega_os * out.cost_os,
            0.0,
            0.0,
            gamma,
        );
        sum_app += d_app;
        sum_os += d_os;
    }
    let (m_app, m_os) = (sum_app / n as f64, sum_os / n as f64);
    assert!(
        m_app.abs() <= 0.01,
        "mean application-layer TD error {m_app}"
    );
    assert!(m_os.abs() <= 0.01, "mean OS-layer TD error {m_os}");
}

fn single_config_params() -> SynthParams {
    let p = common::reduced_params();
    SynthParams {
        cells: p
            .cells
            .into_iter()
            .map(|row| row.into_iter().take(1).collect())
            .collect(),
    }
}

#[test]
fn best_response_with_one_local_action_evaluates_the_fixed_policy() {
    let mut cfg = common::reduced_config();
    cfg.n_configs = 1;
    let model = DmsModel::new(cfg).unwrap();
    let gen = StationarySource::new(&single_config_params(), 31).unwrap();
    let samples = gen.reference_samples(20_000, 31).unwrap();
    let dist = empirical_arrival_distribution(&samples, model.config(), 10_000).unwrap();
    let joint = assemble_transition_model(&model, &dist).unwrap();
    let states = model.states();

    // Run fast once the buffer holds two or more units.
    let os: Vec<usize> = (0..states.len())
        .map(|s| usize::from(states.state(s).q >= 2))
        .collect();
    let policy = Policy::new(os.clone(), model.actions().len()).unwrap();
    let gamma = 0.8;
    let truth = policy_evaluation(&joint, &policy, gamma, 1e-12).unwrap();
    let mu = stationary_distribution(&joint, &policy, 1e-12).unwrap();

    let schedule = LearningSchedule {
        gamma,
        ..LearningSchedule::default()
    };
    let mut br = BestResponse::new(&model, LearningLayer::App, os, schedule, 32).unwrap();
    let source = ResampleSource::new(ReplayTrace::new(samples).unwrap(), 2, 33).unwrap();
    let mut sim = Simulator::new(model.clone(), Box::new(source), 34).unwrap();
    for _ in 0..300_000 {
        br.step(&mut sim).unwrap();
    }
    let learned = br.state_values().unwrap();
    let err = weighted_estimation_error(&truth, &learned, &mu).unwrap();
    assert!(err < 0.05, "weighted relative error {err}");
}

#[test]
fn myopic_best_response_tracks_the_mean_reward() {
    let model = common::reduced_model();
    let (_, source) = common::reduced_recording(20_000, 41);
    let n_s = model.states().len();
    let schedule = LearningSchedule {
        alpha: AlphaRule::VisitDecay { exponent: 1.0 },
        epsilon: EpsilonRule::Constant { value: 0.5 },
        gamma: 0.0,
    };
    let mut br = BestResponse::new(&model, LearningLayer::Os, vec![1; n_s], schedule, 42).unwrap();
    let mut sim = Simulator::new(model.clone(), Box::new(source), 43).unwrap();
    let mut sums = vec![(0.0, 0u32); n_s * 2];
    for _ in 0..20_000 {
        let s = sim.state_index();
        let rec = br.step(&mut sim).unwrap();
        assert_eq!(rec.action.h, 1);
        let cell = &mut sums[s * 2 + rec.action.u];
        cell.0 += rec.outcome.reward;
        cell.1 += 1;
    }
    for s in 0..n_s {
        for u in 0..2 {
            let (sum, n) = sums[s * 2 + u];
            if n > 0 {
                let q = br.table().get(s, u);
                assert!((q - sum / n as f64).abs() < 1e-9, "state {s}, command {u}");
            }
        }
    }
}

#[test]
fn fixed_policy_of_the_wrong_size_is_rejected() {
    let model = common::reduced_model();
    assert!(BestResponse::new(
        &model,
        LearningLayer::App,
        vec![0; 3],
        LearningSchedule::default(),
        0
    )
    .is_err());
    let n = model.states().len();
    assert!(BestResponse::new(
        &model,
        LearningLayer::App,
        vec![7; n],
        LearningSchedule::default(),
        0
    )
    .is_err());
}

#[test]
fn grace_frequency_depends_only_on_the_buffer_for_constant_jobs() {
    let model = DmsModel::new(DmsConfig::default()).unwrap();
    let cell = CellParams {
        complexity: ComplexityDist::point(1e7),
        bits: dmsrl_core::trace::ClippedNormal::point(150.0),
        distortion: dmsrl_core::trace::ClippedNormal::point(6.0),
    };
    let params = SynthParams {
        cells: vec![vec![cell; 3]; 3],
    };
    let source = StationarySource::new(&params, 1).unwrap();
    let mut sim = Simulator::new(model.clone(), Box::new(source), 2).unwrap();
    let mut g = Grace::new(&model, GraceParams::default()).unwrap();
    let first = g.step(&mut sim).unwrap();
    assert_eq!(first.action.u, 4);
    assert_eq!(g.demand(), Some(1e7));
    let mut by_level = vec![None; 51];
    for _ in 1..2_000 {
        let rec = g.step(&mut sim).unwrap();
        let seen = by_level[rec.state.q].get_or_insert(rec.action.u);
        assert_eq!(*seen, rec.action.u, "buffer level {}", rec.state.q);
    }
    // A full buffer leaves one arrival interval: 1e7 cycles in 1/44 s needs 600 MHz.
    if let Some(u) = by_level[50] {
        assert_eq!(u, 2);
    }
}
