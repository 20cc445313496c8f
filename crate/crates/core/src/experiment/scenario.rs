//! The full pipeline: sample the target, train one augmented map per
//! expert, mix them, evaluate, and write artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::ScenarioConfig;
use super::evaluate::{evaluate_model, ModelStats, TargetRuns};
use super::report::{EvaluationReport, ExpertReport, Provenance};
use crate::attractors::{
    exhaustive_binary, trajectory_csv, trajectory_pgm, AttractorKind, InitialStates,
};
use crate::error::{FcmError, Result};
use crate::fcm::{trajectory, EdgeMatrix, StateVector};
use crate::format::{write_mask, write_matrix};
use crate::mixing::augment_and_mix;
use crate::phantom::{sample_targets, train};
use crate::threshold::ThresholdFunction;

const STREAM_SAMPLE: u64 = 1;
const STREAM_INIT: u64 = 2;
const STREAM_EVAL: u64 = 3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent seed for one random stream of one component.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64((stream << 32) ^ index))
}

/// One expert after training (or loading).
#[derive(Debug, Clone)]
pub struct TrainedExpert {
    pub name: String,
    pub weight: f64,
    pub phantoms: Vec<String>,
    /// The expert's own map, without phantoms.
    pub base: EdgeMatrix,
    /// The augmented map.
    pub matrix: EdgeMatrix,
    /// Row-major over `matrix`: entries touching a phantom, off the diagonal.
    pub mask: Vec<bool>,
    pub loss_history: Vec<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub target: EdgeMatrix,
    pub experts: Vec<TrainedExpert>,
    pub mixture: EdgeMatrix,
    pub runs: TargetRuns,
    pub report: EvaluationReport,
}

fn phantom_mask(m: &EdgeMatrix, phantoms: &[String]) -> Vec<bool> {
    let n = m.dim();
    let is_ph: Vec<bool> = m.labels().iter().map(|l| phantoms.contains(l)).collect();
    (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            i != j && (is_ph[i] || is_ph[j])
        })
        .collect()
}

fn build_expert(cfg: &ScenarioConfig, target: &EdgeMatrix, index: usize) -> Result<TrainedExpert> {
    let spec = &cfg.experts[index];
    if let Some(src) = &spec.pretrained {
        let matrix = src.load(&cfg.base_dir)?;
        let (phantoms, observable): (Vec<String>, Vec<String>) = matrix
            .labels()
            .iter()
            .cloned()
            .partition(|l| target.index_of(l).is_none());
        let base = matrix.restrict(&observable)?;
        return Ok(TrainedExpert {
            name: spec.name.clone(),
            weight: spec.weight,
            mask: phantom_mask(&matrix, &phantoms),
            phantoms,
            base,
            matrix,
            loss_history: Vec::new(),
            samples: 0,
        });
    }
    let base = match &spec.matrix {
        Some(src) => src.load(&cfg.base_dir)?,
        None => target.drop_nodes(&spec.drop)?,
    };
    let phantoms = cfg.phantom_names(index);
    let train_err = |e: FcmError| FcmError::Training {
        expert: spec.name.clone(),
        source: Box::new(e),
    };
    let set = sample_targets(
        target,
        &ThresholdFunction::hard_binary(),
        cfg.train.sample_initials,
        cfg.train.unroll_steps,
        derive_seed(cfg.train.seed, STREAM_SAMPLE, index as u64),
        base.labels(),
        cfg.train.sample_max_steps,
    )
    .map_err(train_err)?;
    let mut tcfg = cfg.train.clone();
    tcfg.seed = derive_seed(cfg.train.seed, STREAM_INIT, index as u64);
    let out = train(&base, &phantoms, &set.samples, &tcfg).map_err(train_err)?;
    Ok(TrainedExpert {
        name: spec.name.clone(),
        weight: spec.weight,
        mask: out.layout.mask().to_vec(),
        phantoms,
        base,
        matrix: out.matrix,
        loss_history: out.loss_history,
        samples: set.samples.len(),
    })
}

/// Evaluation initial states over the target nodes.
pub fn evaluation_initials(cfg: &ScenarioConfig, n: usize) -> Result<Vec<StateVector>> {
    if cfg.evaluation.exhaustive {
        exhaustive_binary(n)
    } else {
        InitialStates::RandomBinary {
            count: cfg.evaluation.n_initials,
            seed: derive_seed(cfg.evaluation.seed, STREAM_EVAL, 0),
        }
        .materialize(n)
    }
}

fn config_hash(cfg: &ScenarioConfig) -> Result<String> {
    let text = cfg.to_toml_string()?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

/// Runs the pipeline in memory without touching the file system.
pub fn execute_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    cfg.validate()?;
    let target = cfg.load_target()?;
    let experts = (0..cfg.experts.len())
        .into_par_iter()
        .map(|i| build_expert(cfg, &target, i))
        .collect::<Result<Vec<_>>>()?;
    let mut universe: Vec<String> = experts.iter().flat_map(|e| e.phantoms.clone()).collect();
    universe.extend(target.labels().iter().cloned());
    let pairs: Vec<(EdgeMatrix, f64)> = experts
        .iter()
        .map(|e| (e.matrix.clone(), e.weight))
        .collect();
    let mixture = augment_and_mix(&pairs, &universe)?;

    let runs = TargetRuns::new(
        &target,
        evaluation_initials(cfg, target.dim())?,
        cfg.evaluation.max_steps,
    )?;
    let mut reports = Vec::with_capacity(experts.len());
    for e in &experts {
        let (pre, _) = evaluate_model(&runs, &e.base)?;
        let (post, _) = evaluate_model(&runs, &e.matrix)?;
        reports.push(ExpertReport {
            name: e.name.clone(),
            weight: e.weight,
            phantoms: e.phantoms.clone(),
            pre,
            post,
            samples: e.samples,
            initial_loss: e.loss_history.first().copied(),
            final_loss: e.loss_history.last().copied(),
        });
    }
    let (mix_stats, _): (ModelStats, _) = evaluate_model(&runs, &mixture)?;
    let report = EvaluationReport {
        scenario: cfg.name.clone(),
        exhaustive: cfg.evaluation.exhaustive,
        experts: reports,
        mixture: mix_stats,
        universe,
        provenance: Provenance {
            config_hash: config_hash(cfg)?,
            train_seed: cfg.train.seed,
            eval_seed: cfg.evaluation.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    };
    Ok(ScenarioRun {
        target,
        experts,
        mixture,
        runs,
        report,
    })
}

pub(crate) fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| FcmError::io(path, e))
}

/// Creates the output tree and proves it is writable.
pub fn prepare_outputs(dir: &Path) -> Result<()> {
    for sub in ["", "matrices", "loss", "rasters"] {
        let p = dir.join(sub);
        fs::create_dir_all(&p).map_err(|e| FcmError::io(&p, e))?;
    }
    let probe = dir.join(".write-probe");
    write_file(&probe, b"")?;
    fs::remove_file(&probe).map_err(|e| FcmError::io(&probe, e))
}

/// Runs the scenario and writes `report.txt`, `report.csv`, `matrices/`,
/// `loss/` and `rasters/` under the output directory.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    let dir = cfg.output_dir();
    prepare_outputs(&dir)?;
    let run = execute_scenario(cfg)?;
    write_artifacts(cfg, &dir, &run)?;
    Ok(run.report)
}

fn write_artifacts(cfg: &ScenarioConfig, dir: &Path, run: &ScenarioRun) -> Result<()> {
    let m = dir.join("matrices");
    write_file(&m.join("target.txt"), write_matrix(&run.target))?;
    write_file(&m.join("mixture.txt"), write_matrix(&run.mixture))?;
    for e in &run.experts {
        write_file(&m.join(format!("{}.txt", e.name)), write_matrix(&e.matrix))?;
        write_file(
            &m.join(format!("{}.mask.txt", e.name)),
            write_mask(e.matrix.labels(), &e.mask),
        )?;
        write_file(
            &m.join(format!("{}.expert.txt", e.name)),
            write_matrix(&e.base),
        )?;
        if !e.loss_history.is_empty() {
            let mut csv = String::from("epoch,loss\n");
            for (i, l) in e.loss_history.iter().enumerate() {
                csv.push_str(&format!("{i},{l}\n"));
            }
            write_file(&dir.join("loss").join(format!("{}.csv", e.name)), csv)?;
        }
    }

    let show = run
        .runs
        .attractors
        .iter()
        .position(|a| matches!(a.kind, AttractorKind::LimitCycle { .. }))
        .unwrap_or(0);
    let init = &run.runs.initials[show];
    let mut models: Vec<(&str, &EdgeMatrix)> = vec![("target", &run.target)];
    models.extend(run.experts.iter().map(|e| (e.name.as_str(), &e.matrix)));
    models.push(("mixture", &run.mixture));
    let hard = ThresholdFunction::hard_binary();
    for (name, model) in models {
        let start = run.runs.model_initial(model, init);
        let traj = trajectory(&start, model, &hard, cfg.raster_steps)?;
        write_raster(cfg, &dir.join("rasters"), name, model.labels(), &traj)?;
    }

    write_file(&dir.join("report.txt"), run.report.to_text())?;
    write_file(&dir.join("report.csv"), run.report.to_csv())
}

pub(crate) fn write_raster(
    cfg: &ScenarioConfig,
    dir: &Path,
    stem: &str,
    labels: &[String],
    traj: &[StateVector],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if cfg.raster_format.pgm() {
        let p = dir.join(format!("{stem}.pgm"));
        write_file(&p, trajectory_pgm(traj))?;
        written.push(p);
    }
    if cfg.raster_format.csv() {
        let p = dir.join(format!("{stem}.csv"));
        write_file(&p, trajectory_csv(traj, labels))?;
        written.push(p);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::presets::{reference_dolphin_scenario, self_scenario};
    use crate::presets::{dolphin, reference_mixture};

    #[test]
    fn seeds_are_distinct_per_stream() {
        let a = derive_seed(7, STREAM_SAMPLE, 0);
        assert_ne!(a, derive_seed(7, STREAM_INIT, 0));
        assert_ne!(a, derive_seed(7, STREAM_SAMPLE, 1));
        assert_ne!(a, derive_seed(8, STREAM_SAMPLE, 0));
        assert_eq!(a, derive_seed(7, STREAM_SAMPLE, 0));
    }

    #[test]
    fn pretrained_scenario_skips_training() {
        let run = execute_scenario(&reference_dolphin_scenario("unused")).unwrap();
        assert!(run.experts.iter().all(|e| e.loss_history.is_empty()));
        assert_eq!(run.mixture.labels(), reference_mixture().labels());
        assert_eq!(run.experts[0].phantoms, vec!["A"]);
        assert_eq!(run.experts[0].mask.iter().filter(|&&b| b).count(), 8);
    }

    #[test]
    fn self_scenario_matches_everywhere() {
        let run = execute_scenario(&self_scenario(&dolphin(), "unused")).unwrap();
        assert_eq!(run.report.experts[0].pre.match_rate(), 1.0);
        assert_eq!(run.report.experts[0].post.match_rate(), 1.0);
        assert_eq!(run.report.mixture.match_rate(), 1.0);
    }

    #[test]
    fn unwritable_output_fails_before_work() {
        let tmp = tempfile::tempdir().unwrap();
        let blocker = tmp.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let cfg = self_scenario(&dolphin(), blocker.join("out"));
        let err = run_scenario(&cfg).unwrap_err();
        assert!(matches!(err, FcmError::Io { .. }));
        assert_eq!(err.exit_code(), 4);
    }
}
