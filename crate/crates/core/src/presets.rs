//! Reference matrices for the dolphin-pod system and the mixing examples.
//!
//! Node meanings for the dolphin map: `C1` herd clustering, `C2` fatigue,
//! `C3` rest, `C4` survival threat, `C5` run away.

use crate::fcm::EdgeMatrix;
use crate::mixing::StochasticMatrix;

pub const DOLPHIN_LABELS: [&str; 5] = ["C1", "C2", "C3", "C4", "C5"];

/// Nodes each of the three dolphin experts leaves out.
pub const DOLPHIN_EXPERT_DROPS: [&str; 3] = ["C1", "C2", "C4"];

/// Phantom names for the three dolphin experts, in expert order.
pub const DOLPHIN_PHANTOMS: [&str; 3] = ["A", "B", "C"];

fn build(labels: &[&str], rows: &[&[f64]]) -> EdgeMatrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    EdgeMatrix::from_rows(labels.iter().copied(), &rows).expect("preset matrix is valid")
}

/// Ground-truth 5-node dolphin FCM.
pub fn dolphin() -> EdgeMatrix {
    build(
        &DOLPHIN_LABELS,
        &[
            &[0., 1., 0., -1., 0.],
            &[0., 0., 1., 0., -1.],
            &[0., -1., 0., 1., -1.],
            &[1., 0., -1., 0., 1.],
            &[-1., 1., 0., -1., 0.],
        ],
    )
}

/// Hand-built 4-node expert matrices, one per dropped node.
pub fn dolphin_expert_matrices() -> [EdgeMatrix; 3] {
    [
        build(
            &["C2", "C3", "C4", "C5"],
            &[
                &[0., 1., 0., -1.],
                &[-1., 0., 1., -1.],
                &[0., -1., 0., 1.],
                &[1., 0., -1., 0.],
            ],
        ),
        build(
            &["C1", "C3", "C4", "C5"],
            &[
                &[0., 0., -1., 0.],
                &[0., 0., 1., -1.],
                &[1., -1., 0., 1.],
                &[-1., 0., -1., 0.],
            ],
        ),
        build(
            &["C1", "C2", "C3", "C5"],
            &[
                &[0., 1., 0., 0.],
                &[0., 0., 1., -1.],
                &[0., -1., 0., -1.],
                &[-1., 1., 0., 0.],
            ],
        ),
    ]
}

/// Reference phantom-augmented expert matrices (phantom first).
pub fn reference_phantom_experts() -> [EdgeMatrix; 3] {
    [
        build(
            &["A", "C2", "C3", "C4", "C5"],
            &[
                &[0., 0.6685, 0.4392, 0.0066, 0.8296],
                &[0.6685, 0., 1., 0., -1.],
                &[0.4392, -1., 0., 1., -1.],
                &[0.0066, 0., -1., 0., 1.],
                &[0.8296, 1., 0., -1., 0.],
            ],
        ),
        build(
            &["B", "C1", "C3", "C4", "C5"],
            &[
                &[0., 0.8601, 0.6264, 0.9446, 0.4425],
                &[0.8601, 0., 0., -1., 0.],
                &[0.6264, 0., 0., 1., -1.],
                &[0.9446, 1., -1., 0., 1.],
                &[0.4425, -1., 0., -1., 0.],
            ],
        ),
        build(
            &["C", "C1", "C2", "C3", "C5"],
            &[
                &[0., 0.7535, 0.4866, 0.8142, 0.0701],
                &[0.7535, 0., 1., 0., 0.],
                &[0.4866, 0., 0., 1., -1.],
                &[0.8142, 0., -1., 0., -1.],
                &[0.0701, -1., 1., 0., 0.],
            ],
        ),
    ]
}

/// Universe used for the three-expert dolphin mixture.
pub fn dolphin_mixture_universe() -> Vec<String> {
    DOLPHIN_PHANTOMS
        .iter()
        .chain(DOLPHIN_LABELS.iter())
        .map(|s| s.to_string())
        .collect()
}

/// Reference 8x8 mixture of the three augmented experts, two decimals.
pub fn reference_mixture() -> EdgeMatrix {
    build(
        &["A", "B", "C", "C1", "C2", "C3", "C4", "C5"],
        &[
            &[0., 0., 0., 0., 0.22, 0.01, 0.00, 0.28],
            &[0., 0., 0., 0.29, 0., 0.21, 0.31, 0.15],
            &[0., 0., 0., 0.25, 0.16, 0.27, 0., 0.02],
            &[0., 0.29, 0.25, 0., 0.67, 0., -0.67, 0.],
            &[0.22, 0., 0.16, 0., 0., 0.67, 0., -0.67],
            &[0.01, 0.21, 0.27, 0., -0.67, 0., 0.67, -1.],
            &[0.00, 0.31, 0., 0.67, 0., -0.67, 0., 0.67],
            &[0.28, 0.15, 0.02, -0.67, 0.67, 0., -0.67, 0.],
        ],
    )
}

/// Three 4-node FCMs over overlapping node sets and their mixing weights.
pub fn closure_experts() -> ([EdgeMatrix; 3], [f64; 3]) {
    (
        [
            build(
                &["C1", "C2", "C3", "C4"],
                &[
                    &[0., 1., 0., 0.],
                    &[0., 0., -1., 1.],
                    &[0., 0., 0., 1.],
                    &[-1., 0., 0., 0.],
                ],
            ),
            build(
                &["C1", "C2", "C4", "C5"],
                &[
                    &[0., 1., 0., 1.],
                    &[0., 0., 1., 0.],
                    &[-1., 0., 0., 0.],
                    &[0., 0., 1., 0.],
                ],
            ),
            build(
                &["C2", "C3", "C4", "C5"],
                &[
                    &[0., -1., 1., 0.],
                    &[0., 0., 1., 0.],
                    &[0., 0., 0., 0.],
                    &[0., 0., 1., 0.],
                ],
            ),
        ],
        [0.4, 0.3, 0.3],
    )
}

/// Three 2-state Markov chains over `{A, B, C}` and their mixing weights.
///
/// The second chain lives on `{A, C}` and the third on `{B, C}`; that is the
/// zero-padding layout under which the reference mixed matrix is reproduced.
pub fn markov_chains() -> ([StochasticMatrix; 3], [f64; 3]) {
    let chain = |labels: [&str; 2], probs: [f64; 4]| {
        StochasticMatrix::new(labels, probs.to_vec()).expect("preset chain is stochastic")
    };
    (
        [
            chain(["A", "B"], [0.2, 0.8, 0.7, 0.3]),
            chain(["A", "C"], [0.5, 0.5, 0.9, 0.1]),
            chain(["B", "C"], [0.4, 0.6, 0.2, 0.8]),
        ],
        [0.3, 0.4, 0.3],
    )
}

pub fn markov_universe() -> Vec<String> {
    ["A", "B", "C"].iter().map(|s| s.to_string()).collect()
}
