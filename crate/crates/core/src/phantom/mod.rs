//! Phantom nodes: extra causal nodes that stand in for variables an expert
//! left out. Their edges are learned so the augmented map reproduces the
//! target system's limit cycles on the nodes the expert does model.

pub mod layout;
pub mod loss;
pub mod sample;
pub mod train;

pub use layout::{augment_with_phantoms, forward_unroll, PhantomInit, PhantomLayout};
pub use loss::{loss, Entropic, Loss, LossFunction, SquaredError};
pub use sample::{sample_targets, SampleSet, TrainingSample};
pub use train::{objective, objective_and_gradient, train, Annealing, TrainConfig, TrainOutcome};
