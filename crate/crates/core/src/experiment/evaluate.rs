//! Scoring a model's hard-threshold attractors against the target's.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::attractors::{
    cycle_distance, find_attractor, minimal_period, Attractor, AttractorKey, ObservableMap,
};
use crate::error::Result;
use crate::fcm::{EdgeMatrix, StateVector};
use crate::threshold::ThresholdFunction;

/// Target attractors for a fixed list of initial states.
#[derive(Debug, Clone)]
pub struct TargetRuns {
    pub target: EdgeMatrix,
    pub initials: Vec<StateVector>,
    pub attractors: Vec<Attractor>,
    pub max_steps: usize,
}

impl TargetRuns {
    pub fn new(target: &EdgeMatrix, initials: Vec<StateVector>, max_steps: usize) -> Result<Self> {
        let hard = ThresholdFunction::hard_binary();
        let attractors = initials
            .par_iter()
            .map(|s| find_attractor(s, target, &hard, max_steps, 0.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(TargetRuns {
            target: target.clone(),
            initials,
            attractors,
            max_steps,
        })
    }

    /// The model's starting state: target values on shared nodes, 0 elsewhere.
    pub fn model_initial(&self, model: &EdgeMatrix, initial: &StateVector) -> StateVector {
        StateVector::new(
            model
                .labels()
                .iter()
                .map(|l| self.target.index_of(l).map_or(0.0, |i| initial.values()[i]))
                .collect(),
        )
        .expect("projected values stay in range")
    }
}

/// Match statistics of one model over the evaluation initials.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelStats {
    pub evaluated: usize,
    /// Initials whose attractors agree exactly on the shared nodes.
    pub matches: usize,
    pub mean_distance: f64,
    /// Runs that found no attractor within the budget; scored as distance 1.
    pub unresolved: usize,
    /// Distinct target attractors, projected to the shared nodes.
    pub target_attractors: usize,
    /// Distinct model attractors, projected to the shared nodes.
    pub model_attractors: usize,
    /// Distinct target attractors reproduced from at least one initial.
    pub reproduced: usize,
}

impl ModelStats {
    pub fn match_rate(&self) -> f64 {
        if self.evaluated == 0 {
            0.0
        } else {
            self.matches as f64 / self.evaluated as f64
        }
    }
}

fn projected_key(att: &Attractor, idx: &[usize]) -> AttractorKey {
    let states = att
        .states
        .iter()
        .map(|s| s.project(idx))
        .collect::<Vec<_>>();
    Attractor::from_cycle(dedupe_period(states), 0).key(0.0)
}

fn dedupe_period(seq: Vec<StateVector>) -> Vec<StateVector> {
    let d = minimal_period(&seq);
    seq.into_iter().take(d).collect()
}

/// Runs `model` under the hard threshold from every target initial and
/// compares attractors on the nodes the model shares with the target.
pub fn evaluate_model(runs: &TargetRuns, model: &EdgeMatrix) -> Result<(ModelStats, Vec<f64>)> {
    let hard = ThresholdFunction::hard_binary();
    let map = ObservableMap::shared(runs.target.labels(), model.labels());
    let found = runs
        .initials
        .par_iter()
        .map(|init| {
            let s = runs.model_initial(model, init);
            find_attractor(&s, model, &hard, runs.max_steps, 0.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut distances = Vec::with_capacity(found.len());
    let mut unresolved = 0;
    let mut targets = BTreeSet::new();
    let mut models = BTreeSet::new();
    let mut hit = BTreeSet::new();
    for (t, m) in runs.attractors.iter().zip(&found) {
        let d = if t.is_resolved() && m.is_resolved() {
            let tk = projected_key(t, &map.a);
            targets.insert(tk.clone());
            models.insert(projected_key(m, &map.b));
            let d = cycle_distance(t, m, &map)?;
            if d == 0.0 {
                hit.insert(tk);
            }
            d
        } else {
            unresolved += 1;
            1.0
        };
        distances.push(d);
    }
    let n = distances.len();
    let stats = ModelStats {
        evaluated: n,
        matches: distances.iter().filter(|&&d| d == 0.0).count(),
        mean_distance: if n == 0 {
            0.0
        } else {
            distances.iter().sum::<f64>() / n as f64
        },
        unresolved,
        target_attractors: targets.len(),
        model_attractors: models.len(),
        reproduced: hit.len(),
    };
    Ok((stats, distances))
}
