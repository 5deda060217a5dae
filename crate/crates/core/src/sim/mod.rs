//! Scenario description and the round-by-round simulator.

pub mod partition;
pub mod presets;
pub mod report;
pub mod run;
pub mod scenario;
pub mod topology;

pub use report::rate_report;
pub use run::{reference_baselines, run, run_with, Baselines, Mode, RunTrace};
pub use scenario::{EngineKind, Scenario, Setup};
pub use topology::{Topology, TopologySpec};
