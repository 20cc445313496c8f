use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FcmError, Result};
use crate::fcm::{step_unchecked, EdgeMatrix, StateVector};
use crate::threshold::ThresholdFunction;

/// Node partition of a phantom-augmented map. Phantom nodes come first,
/// giving the block layout `[[PP, PO], [OP, E]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhantomLayout {
    phantom: Vec<String>,
    observable: Vec<String>,
    mask: Vec<bool>,
}

impl PhantomLayout {
    pub fn new(phantom: Vec<String>, observable: Vec<String>) -> Result<Self> {
        if let Some(p) = phantom.iter().find(|p| observable.contains(p)) {
            return Err(FcmError::structural(format!(
                "phantom name `{p}` collides with an expert node"
            )));
        }
        for (i, p) in phantom.iter().enumerate() {
            if phantom[..i].contains(p) {
                return Err(FcmError::structural(format!(
                    "duplicate phantom name `{p}`"
                )));
            }
        }
        let n = phantom.len() + observable.len();
        let np = phantom.len();
        let mask = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                i != j && (i < np || j < np)
            })
            .collect();
        Ok(PhantomLayout {
            phantom,
            observable,
            mask,
        })
    }

    pub fn phantom(&self) -> &[String] {
        &self.phantom
    }

    pub fn observable(&self) -> &[String] {
        &self.observable
    }

    /// Phantom labels followed by observable labels.
    pub fn labels(&self) -> Vec<String> {
        self.phantom
            .iter()
            .chain(&self.observable)
            .cloned()
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.phantom.len() + self.observable.len()
    }

    /// Indices of the observable nodes in the augmented matrix.
    pub fn observable_range(&self) -> std::ops::Range<usize> {
        self.phantom.len()..self.dim()
    }

    /// Row-major trainable mask.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_trainable(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.dim() + j]
    }

    pub fn trainable_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Full initial state: phantoms at 0, observables as given.
    pub fn lift(&self, observable: &StateVector) -> Result<StateVector> {
        if observable.len() != self.observable.len() {
            return Err(FcmError::structural(format!(
                "observable state has {} entries, layout has {} observable nodes",
                observable.len(),
                self.observable.len()
            )));
        }
        let mut v = vec![0.0; self.phantom.len()];
        v.extend_from_slice(observable.values());
        StateVector::new(v)
    }
}

/// Starting values for the trainable phantom edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhantomInit {
    Zeros,
    /// Independent draws from `[-half_width, half_width]`.
    UniformSymmetric {
        half_width: f64,
    },
}

/// Pads `expert` with phantom rows and columns ahead of its own nodes.
pub fn augment_with_phantoms<S: AsRef<str>>(
    expert: &EdgeMatrix,
    phantom_names: &[S],
    init: PhantomInit,
    seed: u64,
) -> Result<(EdgeMatrix, PhantomLayout)> {
    let layout = PhantomLayout::new(
        phantom_names
            .iter()
            .map(|s| s.as_ref().to_string())
            .collect(),
        expert.labels().to_vec(),
    )?;
    let n = layout.dim();
    let np = layout.phantom.len();
    let mut w = vec![0.0; n * n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = match init {
        PhantomInit::Zeros => 0.0,
        PhantomInit::UniformSymmetric { half_width } => {
            if !(half_width.is_finite() && (0.0..=1.0).contains(&half_width)) {
                return Err(FcmError::domain(format!(
                    "phantom init half width must lie in [0, 1], got {half_width}"
                )));
            }
            half_width
        }
    };
    for i in 0..n {
        for j in 0..n {
            w[i * n + j] = if i >= np && j >= np {
                expert.get(i - np, j - np)
            } else if layout.mask[i * n + j] && half > 0.0 {
                rng.gen_range(-half..=half)
            } else {
                0.0
            };
        }
    }
    Ok((EdgeMatrix::new(layout.labels(), w)?, layout))
}

/// Runs `steps` updates from `[0 (phantoms), initial_observable]` and returns
/// the observable part of `C(1)..C(steps)`.
pub fn forward_unroll(
    aug: &EdgeMatrix,
    layout: &PhantomLayout,
    initial_observable: &StateVector,
    steps: usize,
    phi: &ThresholdFunction,
) -> Result<Vec<StateVector>> {
    if aug.labels() != layout.labels().as_slice() {
        return Err(FcmError::structural(
            "augmented matrix labels do not match the phantom layout",
        ));
    }
    let obs: Vec<usize> = layout.observable_range().collect();
    let mut state = layout.lift(initial_observable)?;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        state = step_unchecked(&state, aug, phi);
        out.push(state.project(&obs));
    }
    Ok(out)
}
