//! Name-keyed registries of interchangeable strategies.
//!
//! Threshold functions and training losses are selected at runtime by name
//! (from a scenario file or the command line). Each family lives behind a
//! trait object; a [`Registry`] maps a stable name to a factory that builds
//! the strategy from numeric parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{FcmError, Result};
use crate::phantom::loss::{Entropic, Loss, SquaredError};
use crate::threshold::{HardBinary, Sigmoid, Threshold};

/// Numeric parameters handed to a strategy factory.
pub type Params = BTreeMap<String, f64>;

type Factory<T> = fn(&Params) -> Result<Box<T>>;

struct Entry<T: ?Sized> {
    summary: &'static str,
    factory: Factory<T>,
}

pub struct Registry<T: ?Sized> {
    family: &'static str,
    entries: BTreeMap<&'static str, Entry<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(family: &'static str) -> Self {
        Registry {
            family,
            entries: BTreeMap::new(),
        }
    }

    /// Registers a strategy. A later registration under the same name replaces
    /// the earlier one.
    pub fn register(&mut self, name: &'static str, summary: &'static str, factory: Factory<T>) {
        self.entries.insert(name, Entry { summary, factory });
    }

    pub fn build(&self, name: &str, params: &Params) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(entry) => (entry.factory)(params),
            None => Err(FcmError::Config(format!(
                "unknown {} `{}` (known: {})",
                self.family,
                name,
                self.names().collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn describe(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.entries.iter().map(|(k, e)| (*k, e.summary))
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("family", &self.family)
            .field("names", &self.entries.keys().collect::<Vec<_>>())
            .finish()
    }
}

/// Reads an optional parameter, falling back to `default`.
pub fn param(params: &Params, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

pub fn thresholds() -> &'static Registry<dyn Threshold> {
    static REGISTRY: OnceLock<Registry<dyn Threshold>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg: Registry<dyn Threshold> = Registry::new("threshold function");
        reg.register(HardBinary::NAME, "1 if x > 0 else 0", |_| {
            Ok(Box::new(HardBinary) as Box<dyn Threshold>)
        });
        reg.register(
            Sigmoid::NAME,
            "1 / (1 + exp(-steepness * (x - offset)))",
            |p| {
                let s = Sigmoid::new(
                    param(p, "steepness", Sigmoid::DEFAULT_STEEPNESS),
                    param(p, "offset", 0.0),
                )?;
                Ok(Box::new(s) as Box<dyn Threshold>)
            },
        );
        reg
    })
}

pub fn losses() -> &'static Registry<dyn Loss> {
    static REGISTRY: OnceLock<Registry<dyn Loss>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg: Registry<dyn Loss> = Registry::new("loss");
        reg.register(SquaredError::NAME, "sum of squared state errors", |_| {
            Ok(Box::new(SquaredError) as Box<dyn Loss>)
        });
        reg.register(Entropic::NAME, "binary cross-entropy over states", |_| {
            Ok(Box::new(Entropic::default()) as Box<dyn Loss>)
        });
        reg
    })
}
