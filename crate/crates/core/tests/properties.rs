use proptest::prelude::*;

use fcm_phantom::attractors::InitialStates;
use fcm_phantom::attractors::{
    cycle_distance, exhaustive_binary, find_attractor, Attractor, AttractorKind, ObservableMap,
};
use fcm_phantom::experiment::presets::dolphin_scenario;
use fcm_phantom::experiment::{evaluate_model, ScenarioConfig, TargetRuns};
use fcm_phantom::fcm::{step, trajectory, EdgeMatrix, StateVector};
use fcm_phantom::mixing::{augment, augment_and_mix, mix, union_universe, WeightedExpert};
use fcm_phantom::phantom::{
    augment_with_phantoms, forward_unroll, objective, objective_and_gradient, sample_targets,
    train, PhantomInit, SquaredError, TrainConfig, TrainingSample,
};
use fcm_phantom::presets::dolphin;
use fcm_phantom::threshold::{Sigmoid, ThresholdFunction};

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("N{i}")).collect()
}

fn matrix(n: usize) -> impl Strategy<Value = EdgeMatrix> {
    prop::collection::vec(-1.0f64..=1.0, n * n)
        .prop_map(move |w| EdgeMatrix::new(labels(n), w).unwrap())
}

fn ternary_matrix(n: usize) -> impl Strategy<Value = EdgeMatrix> {
    prop::collection::vec(-1i8..=1, n * n).prop_map(move |w| {
        EdgeMatrix::new(labels(n), w.into_iter().map(f64::from).collect()).unwrap()
    })
}

fn sized_matrix() -> impl Strategy<Value = EdgeMatrix> {
    (1usize..6).prop_flat_map(matrix)
}

fn binary_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(0u8..=1, n).prop_map(|b| StateVector::from_bits(&b).unwrap())
}

fn unit_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(0.0f64..=1.0, n).prop_map(|v| StateVector::new(v).unwrap())
}

fn thresholds() -> impl Strategy<Value = ThresholdFunction> {
    prop_oneof![
        Just(ThresholdFunction::hard_binary()),
        (0.1f64..20.0, -1.0f64..1.0).prop_map(|(s, o)| ThresholdFunction::sigmoid(s, o).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn step_output_is_a_valid_state(
        (m, s) in sized_matrix().prop_flat_map(|m| { let n = m.dim(); (Just(m), unit_state(n)) }),
        phi in thresholds(),
    ) {
        let next = step(&s, &m, &phi).unwrap();
        prop_assert!(next.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn clamped_nodes_hold(
        (m, s, j, c) in sized_matrix().prop_flat_map(|m| {
            let n = m.dim();
            (Just(m), unit_state(n), 0..n, 0.0f64..=1.0)
        }),
        phi in thresholds(),
    ) {
        let s = s.with_clamp(j, c).unwrap();
        for st in trajectory(&s, &m, &phi, 5).unwrap() {
            prop_assert_eq!(st.values()[j], if c == 0.0 { 0.0 } else { c });
            prop_assert_eq!(st.clamp()[j], Some(c));
        }
    }

    #[test]
    fn hard_dynamics_stay_binary(
        (m, s) in sized_matrix().prop_flat_map(|m| { let n = m.dim(); (Just(m), binary_state(n)) }),
    ) {
        let h = ThresholdFunction::hard_binary();
        prop_assert!(step(&s, &m, &h).unwrap().is_binary());
        let z = StateVector::zeros(m.dim());
        prop_assert_eq!(step(&z, &m, &h).unwrap(), z);
    }

    #[test]
    fn sigmoid_step_is_continuous_in_weights(
        (m, s, k) in sized_matrix().prop_flat_map(|m| {
            let n = m.dim();
            (Just(m), unit_state(n), 0..n * n)
        }),
        delta in -1e-7f64..1e-7,
    ) {
        let phi = ThresholdFunction::sigmoid(5.0, 0.0).unwrap();
        let n = m.dim();
        let w = (m.get(k / n, k % n) + delta).clamp(-1.0, 1.0);
        let m2 = m.with_weight(k / n, k % n, w).unwrap();
        let a = step(&s, &m, &phi).unwrap();
        let b = step(&s, &m2, &phi).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 5.0 * 1e-7);
        }
    }

    #[test]
    fn hard_attractor_always_resolves(
        (m, s) in (1usize..7).prop_flat_map(|n| (ternary_matrix(n), binary_state(n))),
    ) {
        let h = ThresholdFunction::hard_binary();
        let budget = (1usize << m.dim()) + 1;
        let a = find_attractor(&s, &m, &h, budget, 0.0).unwrap();
        prop_assert!(a.is_resolved());
        let k = a.states.len();
        // closing step and distinct states
        prop_assert_eq!(&step(&a.states[k - 1], &m, &h).unwrap(), &a.states[0]);
        for i in 0..k {
            for j in i + 1..k {
                prop_assert_ne!(&a.states[i], &a.states[j]);
            }
        }
        // minimal period
        for d in (1..k).filter(|d| k.is_multiple_of(*d)) {
            let mut x = a.states[0].clone();
            for _ in 0..d { x = step(&x, &m, &h).unwrap(); }
            prop_assert_ne!(&x, &a.states[0]);
        }
        match a.kind {
            AttractorKind::FixedPoint => prop_assert_eq!(k, 1),
            AttractorKind::LimitCycle { period } => prop_assert_eq!(period, k),
            AttractorKind::Unresolved => prop_assert!(false),
        }
    }

    #[test]
    fn entry_point_does_not_change_the_attractor(
        (m, s) in (1usize..7).prop_flat_map(|n| (ternary_matrix(n), binary_state(n))),
        shift in 0usize..8,
    ) {
        let h = ThresholdFunction::hard_binary();
        let a = find_attractor(&s, &m, &h, 200, 0.0).unwrap();
        let entry = &a.states[shift % a.states.len()];
        let b = find_attractor(entry, &m, &h, 200, 0.0).unwrap();
        prop_assert_eq!(b.transient, 0);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cycle_distance_symmetric_and_rotation_invariant(
        a in prop::collection::vec(prop::collection::vec(0u8..=1, 3), 1..5),
        b in prop::collection::vec(prop::collection::vec(0u8..=1, 3), 1..5),
        r in 0usize..5,
    ) {
        let mk = |v: &Vec<Vec<u8>>| v.iter().map(|s| StateVector::from_bits(s).unwrap()).collect::<Vec<_>>();
        let sa = mk(&a);
        let mut rotated = sa.clone();
        let len = rotated.len();
        rotated.rotate_left(r % len);
        let att_a = Attractor::from_cycle(sa, 0);
        let att_r = Attractor::from_cycle(rotated, 0);
        let att_b = Attractor::from_cycle(mk(&b), 0);
        let map = ObservableMap::identity(&labels(3));
        let ab = cycle_distance(&att_a, &att_b, &map).unwrap();
        let ba = cycle_distance(&att_b, &att_a, &map).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(cycle_distance(&att_a, &att_r, &map).unwrap(), 0.0);
        prop_assert_eq!(cycle_distance(&att_a, &att_a, &map).unwrap(), 0.0);
    }

    #[test]
    fn mixing_is_closed(
        ms in prop::collection::vec((1usize..5).prop_flat_map(matrix), 1..5),
        picks in prop::collection::vec(prop::collection::vec(0usize..6, 5), 5),
        raw in prop::collection::vec(0.001f64..1.0, 5),
    ) {
        let pool = labels(6);
        // relabel each matrix onto a random subset of a shared pool
        let experts: Vec<EdgeMatrix> = ms.iter().zip(&picks).map(|(m, p)| {
            let mut names: Vec<String> = Vec::new();
            for &i in p { if !names.contains(&pool[i]) { names.push(pool[i].clone()); } }
            for l in &pool {
                if names.len() >= m.dim() {
                    break;
                }
                if !names.contains(l) {
                    names.push(l.clone());
                }
            }
            names.truncate(m.dim());
            EdgeMatrix::new(names, m.weights().to_vec()).unwrap()
        }).collect();
        let raw = &raw[..experts.len()];
        let s: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let last = w.len() - 1;
        w[last] = 1.0 - w[..last].iter().sum::<f64>();
        let universe = union_universe(experts.iter().map(|e| e.labels()));
        let pairs: Vec<_> = experts.into_iter().zip(w.iter().map(|x| x.max(0.0))).collect();
        let m = augment_and_mix(&pairs, &universe).unwrap();
        prop_assert_eq!(m.dim(), universe.len());
        prop_assert!(m.weights().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn augmented_map_embeds_sub_dynamics(
        (m, s) in (1usize..5).prop_flat_map(|n| (matrix(n), binary_state(n))),
        extra in 1usize..3,
    ) {
        let mut universe: Vec<String> = (0..extra).map(|i| format!("X{i}")).collect();
        universe.extend(m.labels().iter().cloned());
        let big = augment(&m, &universe).unwrap();
        let mut v = vec![0.0; extra];
        v.extend_from_slice(s.values());
        let h = ThresholdFunction::hard_binary();
        let small = trajectory(&s, &m, &h, 6).unwrap();
        let large = trajectory(&StateVector::new(v).unwrap(), &big, &h, 6).unwrap();
        let idx: Vec<usize> = (extra..extra + m.dim()).collect();
        for (a, b) in small.iter().zip(&large) {
            prop_assert_eq!(a, &b.project(&idx));
        }
    }

    #[test]
    fn nested_mixture_flattens(
        (a, b, c) in (1usize..4).prop_flat_map(|n| (matrix(n), matrix(n), matrix(n))),
        p in 0.0f64..=1.0,
        q in 0.0f64..=1.0,
    ) {
        let we = |m: &EdgeMatrix, w: f64| WeightedExpert::new(m.clone(), w).unwrap();
        let inner = mix(&[we(&a, q), we(&b, 1.0 - q)]).unwrap();
        let nested = mix(&[we(&inner, p), we(&c, 1.0 - p)]).unwrap();
        let flat = mix(&[we(&a, p * q), we(&b, p * (1.0 - q)), we(&c, 1.0 - p)]).unwrap();
        for (x, y) in nested.weights().iter().zip(flat.weights()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_phantoms_are_inert(
        (m, s) in (1usize..5).prop_flat_map(|n| (matrix(n), binary_state(n))),
        phi in thresholds(),
        p in 1usize..3,
    ) {
        let names: Vec<String> = (0..p).map(|i| format!("P{i}")).collect();
        let (aug, layout) = augment_with_phantoms(&m, &names, PhantomInit::Zeros, 0).unwrap();
        let got = forward_unroll(&aug, &layout, &s, 5, &phi).unwrap();
        let want = trajectory(&s, &m, &phi, 5).unwrap();
        prop_assert_eq!(got, want[1..].to_vec());
    }
}

fn small_training_problem(seed: u64) -> (EdgeMatrix, Vec<TrainingSample>) {
    let target = dolphin();
    let drop = ["C1", "C2", "C4"][seed as usize % 3];
    let expert = target.drop_nodes(&[drop]).unwrap();
    let set = sample_targets(
        &target,
        &ThresholdFunction::hard_binary(),
        300,
        2,
        seed,
        expert.labels(),
        100,
    )
    .unwrap();
    (expert, set.samples)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unmasked_entries_never_move(seed in 0u64..1000, lr in 0.0f64..2.0) {
        let (expert, samples) = small_training_problem(seed);
        let cfg = TrainConfig {
            learning_rate: lr,
            epochs: 15,
            phantom_init: PhantomInit::UniformSymmetric { half_width: 0.5 },
            seed,
            ..TrainConfig::default()
        };
        let out = train(&expert, &["P"], &samples, &cfg).unwrap();
        let (init, layout) = augment_with_phantoms(&expert, &["P"], cfg.phantom_init, seed).unwrap();
        for (k, (a, b)) in out.matrix.weights().iter().zip(init.weights()).enumerate() {
            if !layout.mask()[k] {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
        prop_assert!(out.matrix.weights().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn small_step_does_not_increase_loss(seed in 0u64..1000) {
        let (expert, samples) = small_training_problem(seed);
        let (aug, layout) = augment_with_phantoms(
            &expert, &["P"], PhantomInit::UniformSymmetric { half_width: 0.5 }, seed,
        ).unwrap();
        let sig = Sigmoid::new(5.0, 0.0).unwrap();
        let w = aug.weights().to_vec();
        let (l0, g) = objective_and_gradient(&w, &layout, &samples, &SquaredError, &sig, 2).unwrap();
        let w1: Vec<f64> = w.iter().zip(&g).enumerate()
            .map(|(k, (x, d))| if layout.mask()[k] { x - 1e-4 * d } else { *x })
            .collect();
        let l1 = objective(&w1, &layout, &samples, &SquaredError, &sig, 2).unwrap();
        prop_assert!(l1 <= l0 + 1e-15, "{} -> {}", l0, l1);
    }

    #[test]
    fn config_round_trips(seed in any::<u64>(), eval_seed in any::<u64>(), lr in 0.0f64..5.0, epochs in 1usize..5000, exhaustive in any::<bool>()) {
        let mut cfg = dolphin_scenario("results");
        cfg.train.seed = seed;
        cfg.train.learning_rate = lr;
        cfg.train.epochs = epochs;
        cfg.evaluation.seed = eval_seed;
        cfg.evaluation.exhaustive = exhaustive;
        let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn sampled_match_rate_tracks_exhaustive_rate() {
    let target = dolphin();
    let model = target.drop_nodes(&["C2"]).unwrap();
    let exhaustive = TargetRuns::new(&target, exhaustive_binary(5).unwrap(), 100).unwrap();
    let sampled_states = InitialStates::RandomBinary {
        count: 10_000,
        seed: 3,
    }
    .materialize(5)
    .unwrap();
    let sampled = TargetRuns::new(&target, sampled_states, 100).unwrap();
    let (e, _) = evaluate_model(&exhaustive, &model).unwrap();
    let (s, _) = evaluate_model(&sampled, &model).unwrap();
    let p = e.match_rate();
    let sd = (p * (1.0 - p) / 10_000.0).sqrt();
    assert!(
        (s.match_rate() - p).abs() <= 4.0 * sd + 1e-12,
        "{} vs {}",
        s.match_rate(),
        p
    );
}
