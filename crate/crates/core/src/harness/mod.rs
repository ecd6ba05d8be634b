//! Scenario configuration, the single-clock simulation loop wiring all
//! stages together, experiment presets and CSV output.

mod config;
mod csv;
mod pipeline;
mod presets;
mod validate;

pub use config::{AlphaConfig, ScenarioConfig};
pub use csv::emit_csv;
pub use pipeline::{run_scenario, run_with_observer, RunOutput, StepView, TrajectoryRecord};
pub use presets::{preset_config, PRESET_NAMES};
pub use validate::{
    eq14_decay_check, eq9_worst_ratio, pipeline_stats, validate, CheckResult, DecayCheck,
    PipelineStats, ValidationReport,
};
