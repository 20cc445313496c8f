//! Fuzzy cognitive maps: simulation, attractor analysis, convex mixing of
//! expert maps, and phantom-node learning.

pub mod attractors;
pub mod error;
pub mod experiment;
pub mod fcm;
pub mod format;
pub mod mixing;
pub mod phantom;
pub mod presets;
pub mod registry;
pub mod threshold;

pub use attractors::{
    basin_census, cycle_distance, find_attractor, Attractor, AttractorKind, BasinCensus,
    InitialStates, ObservableMap,
};
pub use error::{FcmError, Result};
pub use fcm::{restrict, step, trajectory, EdgeMatrix, StateVector};
pub use mixing::{augment, mix, mix_stochastic, StochasticMatrix, StochasticMix, WeightedExpert};
pub use threshold::{HardBinary, Sigmoid, Threshold, ThresholdFunction};
