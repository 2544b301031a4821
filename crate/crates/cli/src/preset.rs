//! Named experiment configurations.

use std::collections::BTreeMap;
use std::path::Path;

use qrelay::detection::DetectorModel;
use qrelay::protocols::{
    AmplifierSpec, DetectorPair, ExperimentConfig, PortEfficiency, SourceSettings, DEFAULT_N_MAX,
    DEFAULT_REPETITION_RATE,
};

use crate::CliError;

/// Pair emission probability per pulse of both sources.
pub const PAIR_PROBABILITY: f64 = 0.00123;

/// Mid-point of the 0.635 to 0.757 delivery efficiencies towards the
/// amplifier and swap detectors.
pub const MEASURED_DELIVERY: f64 = 0.696;
pub const MEASURED_HERALD: f64 = 0.8;
pub const MEASURED_XI_HA: f64 = 0.97;
pub const MEASURED_XI_ES: f64 = 0.99;

/// Loss and resource bias a preset starts from before a sweep overrides
/// them.
pub const BASE_LOSS: f64 = 0.9884;
pub const BASE_ETA: f64 = 0.0049;

pub trait Preset: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Builds the configuration; `file` is the contents of `--config`, if
    /// one was given.
    fn config(&self, file: Option<&ExperimentConfig>) -> Result<ExperimentConfig, CliError>;
}

fn threshold_setup(delivery: f64, herald: f64, xi_ha: f64, xi_es: f64) -> ExperimentConfig {
    ExperimentConfig {
        loss: BASE_LOSS,
        entangled_source: SourceSettings {
            pair_probability: PAIR_PROBABILITY,
        },
        ancilla_source: SourceSettings {
            pair_probability: PAIR_PROBABILITY,
        },
        amplifier: AmplifierSpec {
            eta: BASE_ETA,
            resource_delivery: 1.0,
            detectors: DetectorPair::threshold(delivery),
        },
        swap_detectors: DetectorPair::threshold(delivery),
        herald_detector: DetectorModel {
            kind: "threshold".to_string(),
            efficiency: herald,
        },
        output_efficiency: PortEfficiency::Uniform(delivery),
        xi_ha,
        xi_es,
        n_max: DEFAULT_N_MAX,
        repetition_rate: DEFAULT_REPETITION_RATE,
    }
}

fn no_file(name: &str, file: Option<&ExperimentConfig>) -> Result<(), CliError> {
    match file {
        Some(_) => Err(CliError::Config(format!(
            "--config is only read by the custom preset, not `{name}`"
        ))),
        None => Ok(()),
    }
}

pub struct IdealPreset;

impl Preset for IdealPreset {
    fn name(&self) -> &'static str {
        "ideal"
    }

    fn description(&self) -> &'static str {
        "perfect interference, lossless optics apart from the channel, unit-efficiency threshold detectors"
    }

    fn config(&self, file: Option<&ExperimentConfig>) -> Result<ExperimentConfig, CliError> {
        no_file(self.name(), file)?;
        Ok(threshold_setup(1.0, 1.0, 1.0, 1.0))
    }
}

pub struct MeasuredPreset;

impl Preset for MeasuredPreset {
    fn name(&self) -> &'static str {
        "measured"
    }

    fn description(&self) -> &'static str {
        "threshold detectors at mid-range delivery efficiency, measured HOM overlaps"
    }

    fn config(&self, file: Option<&ExperimentConfig>) -> Result<ExperimentConfig, CliError> {
        no_file(self.name(), file)?;
        Ok(threshold_setup(
            MEASURED_DELIVERY,
            MEASURED_HERALD,
            MEASURED_XI_HA,
            MEASURED_XI_ES,
        ))
    }
}

pub struct CustomPreset;

impl Preset for CustomPreset {
    fn name(&self) -> &'static str {
        "custom"
    }

    fn description(&self) -> &'static str {
        "every setting read from the --config file"
    }

    fn config(&self, file: Option<&ExperimentConfig>) -> Result<ExperimentConfig, CliError> {
        file.cloned()
            .ok_or_else(|| CliError::Config("the custom preset needs --config".to_string()))
    }
}

pub struct PresetRegistry {
    presets: BTreeMap<&'static str, Box<dyn Preset>>,
}

impl PresetRegistry {
    pub fn empty() -> Self {
        PresetRegistry {
            presets: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = PresetRegistry::empty();
        for p in [
            Box::new(IdealPreset) as Box<dyn Preset>,
            Box::new(MeasuredPreset),
            Box::new(CustomPreset),
        ] {
            r.register(p).expect("distinct builtin names");
        }
        r
    }

    pub fn register(&mut self, preset: Box<dyn Preset>) -> Result<(), CliError> {
        let name = preset.name();
        if self.presets.contains_key(name) {
            return Err(CliError::Config(format!(
                "preset `{name}` registered twice"
            )));
        }
        self.presets.insert(name, preset);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&dyn Preset, CliError> {
        self.presets.get(name).map(|p| p.as_ref()).ok_or_else(|| {
            CliError::Config(format!(
                "unknown preset `{name}` (known: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.presets.keys().copied().collect()
    }

    /// Builds and validates the configuration of preset `name`.
    pub fn resolve(
        &self,
        name: &str,
        file: Option<&ExperimentConfig>,
    ) -> Result<ExperimentConfig, CliError> {
        let config = self.get(name)?.config(file)?;
        config
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }
}

/// Reads a JSON experiment configuration.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    config
        .validate()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(config)
}
