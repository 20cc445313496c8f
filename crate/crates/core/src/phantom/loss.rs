//! Discrepancy measures between predicted and target state sequences.

use std::fmt;
use std::sync::Arc;

use crate::error::{FcmError, Result};
use crate::fcm::StateVector;
use crate::registry::{self, Params};

/// Per-state loss with an analytic gradient in the prediction.
pub trait Loss: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn value(&self, predicted: &[f64], target: &[f64]) -> f64;

    /// Writes `d value / d predicted` into `grad`.
    fn gradient(&self, predicted: &[f64], target: &[f64], grad: &mut [f64]);
}

/// `sum_i (p_i - c_i)^2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredError;

impl SquaredError {
    pub const NAME: &'static str = "squared_error";
}

impl Loss for SquaredError {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn value(&self, p: &[f64], c: &[f64]) -> f64 {
        p.iter().zip(c).map(|(p, c)| (p - c) * (p - c)).sum()
    }

    fn gradient(&self, p: &[f64], c: &[f64], grad: &mut [f64]) {
        for ((g, p), c) in grad.iter_mut().zip(p).zip(c) {
            *g = 2.0 * (p - c);
        }
    }
}

/// Binary cross-entropy `-sum_i [c_i ln p_i + (1 - c_i) ln(1 - p_i)]` with the
/// prediction clamped to `[eps, 1 - eps]`.
#[derive(Debug, Clone, Copy)]
pub struct Entropic {
    pub eps: f64,
}

impl Entropic {
    pub const NAME: &'static str = "entropic";
}

impl Default for Entropic {
    fn default() -> Self {
        Entropic { eps: 1e-7 }
    }
}

impl Loss for Entropic {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn value(&self, p: &[f64], c: &[f64]) -> f64 {
        p.iter()
            .zip(c)
            .map(|(&p, &c)| {
                let q = p.clamp(self.eps, 1.0 - self.eps);
                -(c * q.ln() + (1.0 - c) * (1.0 - q).ln())
            })
            .sum()
    }

    fn gradient(&self, p: &[f64], c: &[f64], grad: &mut [f64]) {
        for ((g, &p), &c) in grad.iter_mut().zip(p).zip(c) {
            *g = if p < self.eps || p > 1.0 - self.eps {
                0.0
            } else {
                (p - c) / (p * (1.0 - p))
            };
        }
    }
}

/// Shared handle to a loss strategy.
#[derive(Clone)]
pub struct LossFunction(Arc<dyn Loss>);

impl LossFunction {
    pub fn squared_error() -> Self {
        LossFunction(Arc::new(SquaredError))
    }

    pub fn entropic() -> Self {
        LossFunction(Arc::new(Entropic::default()))
    }

    pub fn from_registry(name: &str) -> Result<Self> {
        Ok(LossFunction(Arc::from(
            registry::losses().build(name, &Params::new())?,
        )))
    }
}

impl std::ops::Deref for LossFunction {
    type Target = dyn Loss;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl fmt::Debug for LossFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Total loss over a sequence of states.
pub fn loss(predicted: &[StateVector], target: &[StateVector], kind: &dyn Loss) -> Result<f64> {
    if predicted.len() != target.len() {
        return Err(FcmError::structural(format!(
            "predicted has {} states, target has {}",
            predicted.len(),
            target.len()
        )));
    }
    let mut total = 0.0;
    for (p, c) in predicted.iter().zip(target) {
        if p.len() != c.len() {
            return Err(FcmError::structural(format!(
                "predicted state has {} nodes, target has {}",
                p.len(),
                c.len()
            )));
        }
        total += kind.value(p.values(), c.values());
    }
    Ok(total)
}
