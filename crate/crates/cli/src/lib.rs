//! Batch harness around the `qrelay` simulator: presets, parameter sweeps,
//! result emitters and regression checks against published values.

pub mod app;
pub mod emit;
mod error;
pub mod fixtures;
pub mod preset;
pub mod rates;
pub mod sweep;

pub use emit::{emit, emit_fig3, Emitter, EmitterRegistry};
pub use error::CliError;
pub use fixtures::{regression_check, FixtureSet, RegressionReport};
pub use preset::{load_config, Preset, PresetRegistry};
pub use rates::{compare_rates, RateComparison};
pub use sweep::{run_sweep, Channel, ResultRow, SweepSpec};
