use std::path::PathBuf;

use super::config::ScenarioConfig;
use super::scenario::{prepare_outputs, write_raster};
use crate::attractors::{find_attractor, trajectory_pgm, Attractor};
use crate::error::{FcmError, Result};
use crate::fcm::{trajectory, EdgeMatrix, StateVector};
use crate::format::read_matrix;
use crate::threshold::ThresholdFunction;

#[derive(Debug, Clone)]
pub struct Replay {
    pub matrix: EdgeMatrix,
    pub initial: StateVector,
    pub attractor: Attractor,
    pub trajectory: Vec<StateVector>,
    /// PGM bytes of `trajectory`.
    pub raster: Vec<u8>,
    pub written: Vec<PathBuf>,
}

/// Re-runs one trained component (or `mixture`) under the hard threshold.
///
/// `initial` covers either the target nodes or the component's non-phantom
/// nodes; phantoms start at 0.
pub fn replay_component(cfg: &ScenarioConfig, name: &str, initial: &StateVector) -> Result<Replay> {
    let dir = cfg.output_dir();
    let path = dir.join("matrices").join(format!("{name}.txt"));
    if !path.is_file() {
        return Err(FcmError::io(
            &path,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "trained matrix not found; run the scenario first",
            ),
        ));
    }
    let matrix = read_matrix(&path)?;
    let target = cfg.load_target()?;
    let shared: Vec<usize> = matrix
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| target.index_of(l).is_some())
        .map(|(i, _)| i)
        .collect();
    let start = if initial.len() == target.dim() {
        matrix
            .labels()
            .iter()
            .map(|l| target.index_of(l).map_or(0.0, |i| initial.values()[i]))
            .collect()
    } else if initial.len() == shared.len() {
        let mut v = vec![0.0; matrix.dim()];
        for (&i, &x) in shared.iter().zip(initial.values()) {
            v[i] = x;
        }
        v
    } else {
        return Err(FcmError::structural(format!(
            "initial state has {} entries; `{name}` expects {} (its own nodes) or {} (target nodes)",
            initial.len(),
            shared.len(),
            target.dim()
        )));
    };
    let start = StateVector::new(start)?;
    let hard = ThresholdFunction::hard_binary();
    let attractor = find_attractor(&start, &matrix, &hard, cfg.evaluation.max_steps, 0.0)?;
    let steps = cfg
        .raster_steps
        .max(attractor.transient + 2 * attractor.period().unwrap_or(0));
    let traj = trajectory(&start, &matrix, &hard, steps)?;
    prepare_outputs(&dir)?;
    let stem = format!("replay-{name}-{}", initial.bit_string().replace(',', "_"));
    let written = write_raster(cfg, &dir.join("rasters"), &stem, matrix.labels(), &traj)?;
    Ok(Replay {
        raster: trajectory_pgm(&traj),
        matrix,
        initial: start,
        attractor,
        trajectory: traj,
        written,
    })
}
