use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layout::{augment_with_phantoms, PhantomInit, PhantomLayout};
use super::loss::{Loss, LossFunction, SquaredError};
use super::sample::TrainingSample;
use crate::error::{FcmError, Result};
use crate::fcm::EdgeMatrix;
use crate::threshold::Sigmoid;

/// Geometric steepness and linear offset schedule from the starting sigmoid
/// to these end values over the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annealing {
    pub final_steepness: f64,
    pub final_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Registry name of the loss.
    pub loss: String,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Scored steps per sample (`k`).
    pub unroll_steps: usize,
    pub sigmoid_steepness: f64,
    pub sigmoid_offset: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anneal: Option<Annealing>,
    pub phantom_init: PhantomInit,
    pub seed: u64,
    pub clip_to_bipolar: bool,
    /// Random initial states drawn from the target when building samples.
    pub sample_initials: usize,
    /// Step budget for target attractor detection while sampling.
    pub sample_max_steps: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            loss: SquaredError::NAME.to_string(),
            learning_rate: 0.05,
            epochs: 500,
            unroll_steps: 2,
            sigmoid_steepness: Sigmoid::DEFAULT_STEEPNESS,
            sigmoid_offset: 0.0,
            anneal: None,
            phantom_init: PhantomInit::Zeros,
            seed: 0,
            clip_to_bipolar: true,
            sample_initials: 10_000,
            sample_max_steps: 1_000,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        LossFunction::from_registry(&self.loss)?;
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(FcmError::Config(format!(
                "learning_rate must be nonnegative, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 || self.unroll_steps == 0 {
            return Err(FcmError::Config(
                "epochs and unroll_steps must be at least 1".into(),
            ));
        }
        if self.sample_initials == 0 || self.sample_max_steps == 0 {
            return Err(FcmError::Config(
                "sample_initials and sample_max_steps must be at least 1".into(),
            ));
        }
        self.sigmoid_at(0)
            .map_err(|e| FcmError::Config(e.to_string()))?;
        self.sigmoid_at(self.epochs - 1)
            .map_err(|e| FcmError::Config(e.to_string()))?;
        Ok(())
    }

    /// The training sigmoid in effect at `epoch`.
    pub fn sigmoid_at(&self, epoch: usize) -> Result<Sigmoid> {
        match self.anneal {
            None => Sigmoid::new(self.sigmoid_steepness, self.sigmoid_offset),
            Some(a) => {
                let f = if self.epochs > 1 {
                    epoch as f64 / (self.epochs - 1) as f64
                } else {
                    0.0
                };
                let s0 = self.sigmoid_steepness;
                Sigmoid::new(
                    s0 * (a.final_steepness / s0).powf(f),
                    self.sigmoid_offset + (a.final_offset - self.sigmoid_offset) * f,
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub matrix: EdgeMatrix,
    pub layout: PhantomLayout,
    /// Loss before each epoch's update.
    pub loss_history: Vec<f64>,
}

/// Weighted mean loss over the samples and its gradient with respect to
/// every entry of the row-major `weights`.
///
/// Each sample is unrolled `lead_in + unroll_steps` sigmoid steps from
/// `[0 (phantoms), initial]`; the last `unroll_steps` observable states are
/// scored. The gradient is exact backpropagation through the unrolled steps.
pub fn objective_and_gradient(
    weights: &[f64],
    layout: &PhantomLayout,
    samples: &[TrainingSample],
    loss: &dyn Loss,
    sigmoid: &Sigmoid,
    unroll_steps: usize,
) -> Result<(f64, Vec<f64>)> {
    let n = layout.dim();
    check_inputs(weights, layout, samples, unroll_steps)?;
    let total: f64 = samples.iter().map(|s| s.multiplicity as f64).sum();
    let parts: Vec<(f64, Vec<f64>)> = samples
        .par_iter()
        .map(|s| {
            sample_pass(
                weights,
                n,
                layout.phantom().len(),
                s,
                loss,
                sigmoid,
                unroll_steps,
                true,
            )
        })
        .collect();
    let mut value = 0.0;
    let mut grad = vec![0.0; n * n];
    for (s, (l, g)) in samples.iter().zip(parts) {
        let w = s.multiplicity as f64 / total;
        value += w * l;
        for (a, b) in grad.iter_mut().zip(g) {
            *a += w * b;
        }
    }
    Ok((value, grad))
}

/// Forward-only version of [`objective_and_gradient`].
pub fn objective(
    weights: &[f64],
    layout: &PhantomLayout,
    samples: &[TrainingSample],
    loss: &dyn Loss,
    sigmoid: &Sigmoid,
    unroll_steps: usize,
) -> Result<f64> {
    let n = layout.dim();
    check_inputs(weights, layout, samples, unroll_steps)?;
    let total: f64 = samples.iter().map(|s| s.multiplicity as f64).sum();
    Ok(samples
        .iter()
        .map(|s| {
            let (l, _) = sample_pass(
                weights,
                n,
                layout.phantom().len(),
                s,
                loss,
                sigmoid,
                unroll_steps,
                false,
            );
            s.multiplicity as f64 / total * l
        })
        .sum())
}

fn check_inputs(
    weights: &[f64],
    layout: &PhantomLayout,
    samples: &[TrainingSample],
    unroll_steps: usize,
) -> Result<()> {
    let n = layout.dim();
    if weights.len() != n * n {
        return Err(FcmError::structural(format!(
            "weights have {} entries, layout needs {}",
            weights.len(),
            n * n
        )));
    }
    if samples.is_empty() {
        return Err(FcmError::domain("training needs at least one sample"));
    }
    let m = layout.observable().len();
    for (i, s) in samples.iter().enumerate() {
        if s.initial.len() != m || s.targets.iter().any(|t| t.len() != m) {
            return Err(FcmError::structural(format!(
                "sample {i} does not match the {m} observable nodes"
            )));
        }
        if s.targets.len() < unroll_steps {
            return Err(FcmError::domain(format!(
                "sample {i} has {} targets, fewer than unroll_steps = {unroll_steps}",
                s.targets.len()
            )));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sample_pass(
    w: &[f64],
    n: usize,
    np: usize,
    s: &TrainingSample,
    loss: &dyn Loss,
    sig: &Sigmoid,
    k: usize,
    want_grad: bool,
) -> (f64, Vec<f64>) {
    let steps = s.lead_in + k;
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    let mut x0 = vec![0.0; n];
    x0[np..].copy_from_slice(s.initial.values());
    xs.push(x0);
    for t in 1..=steps {
        let prev = &xs[t - 1];
        let next = (0..n)
            .map(|j| sig.value((0..n).map(|i| prev[i] * w[i * n + j]).sum()))
            .collect();
        xs.push(next);
    }
    let mut value = 0.0;
    for (t, target) in (s.lead_in + 1..=steps).zip(&s.targets) {
        value += loss.value(&xs[t][np..], target.values());
    }
    if !want_grad {
        return (value, Vec::new());
    }
    let mut grad = vec![0.0; n * n];
    let mut g = vec![0.0; n];
    let mut dl = vec![0.0; n - np];
    for t in (1..=steps).rev() {
        if t > s.lead_in {
            let target = &s.targets[t - s.lead_in - 1];
            loss.gradient(&xs[t][np..], target.values(), &mut dl);
            for (gj, d) in g[np..].iter_mut().zip(&dl) {
                *gj += d;
            }
        }
        let y = &xs[t];
        let dz: Vec<f64> = (0..n)
            .map(|j| g[j] * sig.derivative_from_output(y[j]))
            .collect();
        let prev = &xs[t - 1];
        for i in 0..n {
            if prev[i] != 0.0 {
                for j in 0..n {
                    grad[i * n + j] += prev[i] * dz[j];
                }
            }
        }
        for i in 0..n {
            g[i] = (0..n).map(|j| w[i * n + j] * dz[j]).sum();
        }
    }
    (value, grad)
}

/// Learns the phantom edges of `expert` by batch gradient descent.
///
/// Only masked entries move; the expert block is returned bit-identical.
pub fn train<S: AsRef<str>>(
    expert: &EdgeMatrix,
    phantom_names: &[S],
    samples: &[TrainingSample],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(FcmError::domain("training needs at least one sample"));
    }
    let loss = LossFunction::from_registry(&cfg.loss)?;
    let (aug, layout) = augment_with_phantoms(expert, phantom_names, cfg.phantom_init, cfg.seed)?;
    let (labels, mut w) = aug.into_parts();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let sig = cfg.sigmoid_at(epoch)?;
        let (l, g) = objective_and_gradient(&w, &layout, samples, &*loss, &sig, cfg.unroll_steps)?;
        if !l.is_finite() {
            return Err(FcmError::Numeric {
                epoch,
                detail: format!("loss is {l}"),
            });
        }
        history.push(l);
        for (idx, (wi, gi)) in w.iter_mut().zip(&g).enumerate() {
            if layout.mask()[idx] {
                *wi -= cfg.learning_rate * gi;
                if cfg.clip_to_bipolar {
                    *wi = wi.clamp(-1.0, 1.0);
                }
            }
        }
        if let Some(bad) = w.iter().find(|v| !v.is_finite()) {
            return Err(FcmError::Numeric {
                epoch,
                detail: format!("weight became {bad}"),
            });
        }
    }
    let matrix = EdgeMatrix::new(labels, w).map_err(|e| FcmError::Numeric {
        epoch: cfg.epochs,
        detail: format!("{e}; enable clip_to_bipolar to keep weights in range"),
    })?;
    Ok(TrainOutcome {
        matrix,
        layout,
        loss_history: history,
    })
}
