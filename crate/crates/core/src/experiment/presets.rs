use std::path::Path;

use super::config::{EvaluationConfig, ExpertSpec, MatrixSource, RasterFormat, ScenarioConfig};
use crate::fcm::EdgeMatrix;
use crate::phantom::{Annealing, PhantomInit, TrainConfig};
use crate::presets::{dolphin, reference_phantom_experts, DOLPHIN_EXPERT_DROPS, DOLPHIN_PHANTOMS};

const THIRD: f64 = 1.0 / 3.0;

/// Training settings that recover the dolphin cycles with one phantom.
///
/// The sigmoid starts soft and is annealed toward a steep curve with a small
/// positive offset, so the learned weights behave the same under the hard
/// threshold used for evaluation.
pub fn dolphin_train_config() -> TrainConfig {
    TrainConfig {
        learning_rate: 0.5,
        epochs: 800,
        unroll_steps: 2,
        sigmoid_steepness: 3.0,
        sigmoid_offset: 0.5,
        anneal: Some(Annealing {
            final_steepness: 30.0,
            final_offset: 0.1,
        }),
        phantom_init: PhantomInit::UniformSymmetric { half_width: 0.1 },
        seed: 0,
        ..TrainConfig::default()
    }
}

/// Three experts, each missing one dolphin node, one phantom each.
pub fn dolphin_scenario(outputs: impl AsRef<Path>) -> ScenarioConfig {
    ScenarioConfig {
        name: "dolphin".into(),
        outputs: outputs.as_ref().to_path_buf(),
        phantoms_per_expert: 1,
        raster_format: RasterFormat::Both,
        raster_steps: 12,
        target: MatrixSource::inline(&dolphin()),
        experts: DOLPHIN_EXPERT_DROPS
            .iter()
            .zip(DOLPHIN_PHANTOMS)
            .enumerate()
            .map(|(i, (drop, ph))| ExpertSpec {
                phantoms: Some(vec![ph.to_string()]),
                ..ExpertSpec::dropping(&format!("expert{}", i + 1), THIRD, &[drop])
            })
            .collect(),
        train: dolphin_train_config(),
        evaluation: EvaluationConfig {
            exhaustive: true,
            ..EvaluationConfig::default()
        },
        base_dir: Default::default(),
    }
}

/// The dolphin scenario with the reference augmented experts and no training.
pub fn reference_dolphin_scenario(outputs: impl AsRef<Path>) -> ScenarioConfig {
    let mut cfg = dolphin_scenario(outputs);
    cfg.name = "dolphin-reference".into();
    for (spec, m) in cfg.experts.iter_mut().zip(reference_phantom_experts()) {
        spec.drop.clear();
        spec.phantoms = None;
        spec.pretrained = Some(MatrixSource::inline(&m));
    }
    cfg
}

/// One expert that already knows the whole target.
pub fn self_scenario(target: &EdgeMatrix, outputs: impl AsRef<Path>) -> ScenarioConfig {
    ScenarioConfig {
        name: "self".into(),
        outputs: outputs.as_ref().to_path_buf(),
        phantoms_per_expert: 1,
        raster_format: RasterFormat::Pgm,
        raster_steps: 12,
        target: MatrixSource::inline(target),
        experts: vec![ExpertSpec::dropping("whole", 1.0, &[])],
        train: TrainConfig {
            phantom_init: PhantomInit::Zeros,
            ..dolphin_train_config()
        },
        evaluation: EvaluationConfig {
            exhaustive: true,
            ..EvaluationConfig::default()
        },
        base_dir: Default::default(),
    }
}
