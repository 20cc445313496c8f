//! Threshold functions squash a node's summed causal input into `[0, 1]`.

use std::fmt;
use std::sync::Arc;

use crate::error::{FcmError, Result};
use crate::registry::{self, Params};

/// A monotone nondecreasing map from the reals into `[0, 1]`.
pub trait Threshold: Send + Sync + fmt::Debug {
    /// Registry name.
    fn name(&self) -> &'static str;

    fn apply(&self, x: f64) -> f64;

    /// Derivative, when the function is differentiable.
    fn derivative(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Tolerance used when deciding two states are the same during cycle detection.
    fn default_tolerance(&self) -> f64;

    /// Parameters that rebuild this function through the registry.
    fn params(&self) -> Params {
        Params::new()
    }
}

/// `1` for strictly positive input, `0` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HardBinary;

impl HardBinary {
    pub const NAME: &'static str = "hard_binary";
}

impl Threshold for HardBinary {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn apply(&self, x: f64) -> f64 {
        if x > 0.0 {
            1.0
        } else {
            0.0
        }
    }

    fn default_tolerance(&self) -> f64 {
        0.0
    }
}

/// Logistic curve `1 / (1 + exp(-steepness * (x - offset)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigmoid {
    steepness: f64,
    offset: f64,
}

impl Sigmoid {
    pub const NAME: &'static str = "sigmoid";
    pub const DEFAULT_STEEPNESS: f64 = 5.0;

    pub fn new(steepness: f64, offset: f64) -> Result<Self> {
        if !(steepness.is_finite() && steepness > 0.0) {
            return Err(FcmError::domain(format!(
                "sigmoid steepness must be positive and finite, got {steepness}"
            )));
        }
        if !offset.is_finite() {
            return Err(FcmError::domain(format!(
                "sigmoid offset must be finite, got {offset}"
            )));
        }
        Ok(Sigmoid { steepness, offset })
    }

    pub fn steepness(&self) -> f64 {
        self.steepness
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let z = self.steepness * (x - self.offset);
        // split on sign so exp never overflows
        if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }

    /// Derivative expressed through the output `y = value(x)`.
    #[inline]
    pub fn derivative_from_output(&self, y: f64) -> f64 {
        self.steepness * y * (1.0 - y)
    }
}

impl Default for Sigmoid {
    fn default() -> Self {
        Sigmoid {
            steepness: Self::DEFAULT_STEEPNESS,
            offset: 0.0,
        }
    }
}

impl Threshold for Sigmoid {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn apply(&self, x: f64) -> f64 {
        self.value(x)
    }

    fn derivative(&self, x: f64) -> Option<f64> {
        Some(self.derivative_from_output(self.value(x)))
    }

    fn default_tolerance(&self) -> f64 {
        1e-6
    }

    fn params(&self) -> Params {
        let mut p = Params::new();
        p.insert("steepness".into(), self.steepness);
        p.insert("offset".into(), self.offset);
        p
    }
}

/// Shared handle to a threshold strategy.
#[derive(Clone)]
pub struct ThresholdFunction(Arc<dyn Threshold>);

impl ThresholdFunction {
    pub fn hard_binary() -> Self {
        ThresholdFunction(Arc::new(HardBinary))
    }

    pub fn sigmoid(steepness: f64, offset: f64) -> Result<Self> {
        Ok(ThresholdFunction(Arc::new(Sigmoid::new(
            steepness, offset,
        )?)))
    }

    /// Looks the function up in the global threshold registry.
    pub fn from_registry(name: &str, params: &Params) -> Result<Self> {
        Ok(ThresholdFunction(Arc::from(
            registry::thresholds().build(name, params)?,
        )))
    }

    pub fn new(inner: impl Threshold + 'static) -> Self {
        ThresholdFunction(Arc::new(inner))
    }
}

impl std::ops::Deref for ThresholdFunction {
    type Target = dyn Threshold;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl fmt::Debug for ThresholdFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
