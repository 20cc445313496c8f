use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attractors::find_attractor;
use crate::error::{FcmError, Result};
use crate::fcm::{trajectory, EdgeMatrix, StateVector};
use crate::threshold::ThresholdFunction;

/// One training example.
///
/// The model is unrolled `lead_in + targets.len()` steps from `initial`
/// (observable nodes only, phantoms start at 0). Only the last
/// `targets.len()` predicted states are scored: they are the first states of
/// the target's limit cycle, reached after `lead_in` transient steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub initial: StateVector,
    pub lead_in: usize,
    pub targets: Vec<StateVector>,
    /// How many random draws collapsed onto this sample.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub observable: Vec<String>,
    pub samples: Vec<TrainingSample>,
    pub drawn: usize,
    pub unresolved: usize,
}

/// Draws random binary initial states of `system`, runs each to its attractor
/// and records the first `k` cycle states on the observable nodes.
///
/// Nodes outside `observable` start inactive, matching how the phantom
/// stands in for them. Identical samples are merged with a multiplicity.
pub fn sample_targets<S: AsRef<str>>(
    system: &EdgeMatrix,
    phi: &ThresholdFunction,
    n_initials: usize,
    k: usize,
    seed: u64,
    observable: &[S],
    max_steps: usize,
) -> Result<SampleSet> {
    if n_initials == 0 || k == 0 {
        return Err(FcmError::domain("n_initials and k must be positive"));
    }
    let obs: Vec<usize> = observable
        .iter()
        .map(|o| {
            system.index_of(o.as_ref()).ok_or_else(|| {
                FcmError::structural(format!("observable `{}` is not a system node", o.as_ref()))
            })
        })
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = phi.default_tolerance();
    let mut index: HashMap<(Vec<u64>, usize), usize> = HashMap::new();
    let mut samples: Vec<TrainingSample> = Vec::new();
    let mut unresolved = 0;
    for _ in 0..n_initials {
        let mut v = vec![0.0; system.dim()];
        for &i in &obs {
            v[i] = if rng.gen::<bool>() { 1.0 } else { 0.0 };
        }
        let init = StateVector::from_raw(v);
        let att = find_attractor(&init, system, phi, max_steps, tol)?;
        if !att.is_resolved() {
            unresolved += 1;
            continue;
        }
        let key_vals = obs.iter().map(|&i| init.values()[i].to_bits()).collect();
        let key = (key_vals, att.transient);
        if let Some(&at) = index.get(&key) {
            samples[at].multiplicity += 1;
            continue;
        }
        let traj = trajectory(&init, system, phi, att.transient + k)?;
        index.insert(key, samples.len());
        samples.push(TrainingSample {
            initial: init.project(&obs),
            lead_in: att.transient,
            targets: traj[att.transient + 1..]
                .iter()
                .map(|s| s.project(&obs))
                .collect(),
            multiplicity: 1,
        });
    }
    if samples.is_empty() {
        return Err(FcmError::domain(format!(
            "all {n_initials} sampled runs were unresolved within {max_steps} steps"
        )));
    }
    Ok(SampleSet {
        observable: observable.iter().map(|s| s.as_ref().to_string()).collect(),
        samples,
        drawn: n_initials,
        unresolved,
    })
}
