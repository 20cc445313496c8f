//! Hand-derived reference values checked against small independent
//! reimplementations written directly in the tests.

use fcm_phantom::attractors::{
    cycle_distance, exhaustive_binary, find_attractor, Attractor, ObservableMap,
};
use fcm_phantom::fcm::{step, EdgeMatrix, StateVector};
use fcm_phantom::mixing::augment_and_mix;
use fcm_phantom::phantom::{augment_with_phantoms, loss, PhantomInit, SquaredError};
use fcm_phantom::presets::{dolphin, dolphin_mixture_universe, reference_phantom_experts};
use fcm_phantom::threshold::ThresholdFunction;

const E: [[i32; 5]; 5] = [
    [0, 1, 0, -1, 0],
    [0, 0, 1, 0, -1],
    [0, -1, 0, 1, -1],
    [1, 0, -1, 0, 1],
    [-1, 1, 0, -1, 0],
];

fn naive_step(s: [u8; 5]) -> [u8; 5] {
    let mut out = [0u8; 5];
    for (j, o) in out.iter_mut().enumerate() {
        let sum: i32 = (0..5).map(|i| s[i] as i32 * E[i][j]).sum();
        *o = (sum > 0) as u8;
    }
    out
}

/// Cycle by walking until a repeat, scanning the list linearly.
fn naive_cycle(mut s: [u8; 5]) -> (usize, Vec<[u8; 5]>) {
    let mut seen: Vec<[u8; 5]> = Vec::new();
    loop {
        if let Some(i) = seen.iter().position(|x| *x == s) {
            return (i, seen[i..].to_vec());
        }
        seen.push(s);
        s = naive_step(s);
    }
}

fn sv(s: &[u8]) -> StateVector {
    StateVector::from_bits(s).unwrap()
}

#[test]
fn two_node_state_sums_rows() {
    // rows 1 and 4: (0,1,0,-1,0) + (1,0,-1,0,1) = (1,1,-1,-1,1)
    assert_eq!(naive_step([1, 0, 0, 1, 0]), [1, 1, 0, 0, 1]);
    let got = step(
        &sv(&[1, 0, 0, 1, 0]),
        &dolphin(),
        &ThresholdFunction::hard_binary(),
    )
    .unwrap();
    assert_eq!(got, sv(&[1, 1, 0, 0, 1]));
}

#[test]
fn attractors_agree_with_linear_scan_on_all_states() {
    let h = ThresholdFunction::hard_binary();
    for init in exhaustive_binary(5).unwrap() {
        let b: Vec<u8> = init.values().iter().map(|&v| v as u8).collect();
        let arr: [u8; 5] = b.clone().try_into().unwrap();
        let (transient, cycle) = naive_cycle(arr);
        let got = find_attractor(&init, &dolphin(), &h, 100, 0.0).unwrap();
        assert_eq!(got.transient, transient, "{b:?}");
        assert_eq!(got.states.len(), cycle.len());
        let want = Attractor::from_cycle(cycle.iter().map(|c| sv(c)).collect(), transient);
        assert_eq!(got, want);
    }
}

#[test]
fn matrix_not_caption_decides_cycle_b() {
    // successor of (1,0,0,1,0) is (1,1,0,0,1), not (1,1,0,1,0)
    let (_, cycle) = naive_cycle([0, 0, 0, 1, 1]);
    assert!(cycle.contains(&[1, 1, 0, 0, 1]));
    assert!(!cycle.contains(&[1, 1, 0, 1, 0]));
}

#[test]
fn restriction_diverges_from_full_map() {
    let h = ThresholdFunction::hard_binary();
    let full = dolphin();
    let r = full.drop_nodes(&["C4"]).unwrap();
    let mut a = sv(&[0, 1, 1, 0, 0]);
    let mut b = sv(&[0, 1, 1, 0]);
    let mut diverged = false;
    for _ in 0..2 {
        a = step(&a, &full, &h).unwrap();
        b = step(&b, &r, &h).unwrap();
        diverged |= a.project(&[0, 1, 2, 4]) != b;
    }
    assert!(diverged);
}

#[test]
fn mask_count_formula() {
    // (n+p)^2 - n^2 - p
    for (n, p) in [(4usize, 1usize), (3, 2), (1, 3), (5, 1)] {
        let labels: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
        let e = EdgeMatrix::zeros(labels).unwrap();
        let ph: Vec<String> = (0..p).map(|i| format!("p{i}")).collect();
        let (_, l) = augment_with_phantoms(&e, &ph, PhantomInit::Zeros, 0).unwrap();
        assert_eq!(l.trainable_count(), (n + p) * (n + p) - n * n - p);
    }
}

#[test]
fn cycle_versus_zero_is_mean_activation() {
    let (_, cycle) = naive_cycle([0, 0, 0, 1, 0]);
    let ones: usize = cycle
        .iter()
        .map(|s| s.iter().map(|&b| b as usize).sum::<usize>())
        .sum();
    let oracle = ones as f64 / (cycle.len() * 5) as f64;
    let a = Attractor::from_cycle(cycle.iter().map(|c| sv(c)).collect(), 0);
    let z = Attractor::from_cycle(vec![StateVector::zeros(5)], 0);
    let map = ObservableMap::identity(dolphin().labels());
    assert_eq!(cycle_distance(&a, &z, &map).unwrap(), oracle);
    assert_eq!(oracle, 0.25);
}

#[test]
fn half_prediction_loss() {
    let p = StateVector::new(vec![0.5, 0.5]).unwrap();
    let c = sv(&[1, 0]);
    assert_eq!(loss(&[p], &[c], &SquaredError).unwrap(), 0.5);
}

#[test]
fn reference_expert_mixture_exact_thirds() {
    let pairs: Vec<(EdgeMatrix, f64)> = reference_phantom_experts()
        .into_iter()
        .map(|m| (m, 1.0 / 3.0))
        .collect();
    let m = augment_and_mix(&pairs, &dolphin_mixture_universe()).unwrap();
    let w = |a: &str, b: &str| m.weight(a, b).unwrap();
    let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
    assert!(close(w("A", "C2"), 0.6685 / 3.0));
    assert!(close(w("A", "C3"), 0.4392 / 3.0));
    assert!(close(w("C3", "A"), 0.4392 / 3.0));
    assert!(close(w("A", "C4"), 0.0066 / 3.0));
    // C1 -> C2 is only known to the third expert
    assert!(close(w("C1", "C2"), 1.0 / 3.0));
    assert!(close(w("C1", "C4"), -1.0 / 3.0));
    assert!(close(w("C4", "C1"), 1.0 / 3.0));
    // C3 -> C5 is -1 for all three experts
    assert!(close(w("C3", "C5"), -1.0));
}
