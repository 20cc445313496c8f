//! Config-driven experiments over a target map and a panel of experts.

pub mod config;
pub mod demo;
pub mod evaluate;
pub mod presets;
pub mod replay;
pub mod report;
pub mod scenario;

pub use config::{EvaluationConfig, ExpertSpec, MatrixSource, RasterFormat, ScenarioConfig};
pub use demo::{demo_fcm_closure, demo_markov_nonclosure};
pub use evaluate::{evaluate_model, ModelStats, TargetRuns};
pub use replay::{replay_component, Replay};
pub use report::{EvaluationReport, ExpertReport, Provenance};
pub use scenario::{derive_seed, execute_scenario, run_scenario, ScenarioRun, TrainedExpert};
