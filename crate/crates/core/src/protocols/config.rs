use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::detection::{DetectorModel, DetectorRegistry};
use crate::optics::{ChannelSpec, SourceSpec, MAX_PAIR_PROBABILITY};

/// Either one efficiency shared by both ports or one per port.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PortEfficiency {
    Uniform(f64),
    PerPort([f64; 2]),
}

impl PortEfficiency {
    pub fn ports(&self) -> [f64; 2] {
        match *self {
            PortEfficiency::Uniform(e) => [e, e],
            PortEfficiency::PerPort(p) => p,
        }
    }

    fn validate(&self, what: &str) -> Result<(), ProtocolError> {
        for e in self.ports() {
            check_unit(what, e)?;
        }
        Ok(())
    }
}

/// The two detectors behind a 50:50 heralding beam splitter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorPair {
    pub kind: String,
    pub efficiency: PortEfficiency,
}

impl DetectorPair {
    pub fn new(kind: &str, efficiency: PortEfficiency) -> Self {
        DetectorPair {
            kind: kind.to_string(),
            efficiency,
        }
    }

    pub fn threshold(efficiency: f64) -> Self {
        DetectorPair::new("threshold", PortEfficiency::Uniform(efficiency))
    }

    pub fn pnr(efficiency: f64) -> Self {
        DetectorPair::new("pnr", PortEfficiency::Uniform(efficiency))
    }

    pub fn models(&self) -> Result<[DetectorModel; 2], ProtocolError> {
        let [a, b] = self.efficiency.ports();
        Ok([
            DetectorModel::new(&self.kind, a)?,
            DetectorModel::new(&self.kind, b)?,
        ])
    }

    fn validate(&self, registry: &DetectorRegistry) -> Result<(), ProtocolError> {
        self.efficiency.validate("detector efficiency")?;
        registry.get(&self.kind)?;
        Ok(())
    }
}

/// Quantum-scissors settings. The resource photon is split with bias `eta`,
/// giving nominal amplitude gain `g = √((1−η)/η)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifierSpec {
    pub eta: f64,
    /// Probability that the resource photon reaches the scissors beam
    /// splitter.
    #[serde(default = "one")]
    pub resource_delivery: f64,
    pub detectors: DetectorPair,
}

fn one() -> f64 {
    1.0
}

impl AmplifierSpec {
    pub fn new(eta: f64, detectors: DetectorPair) -> Result<Self, ProtocolError> {
        let spec = AmplifierSpec {
            eta,
            resource_delivery: 1.0,
            detectors,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Amplifier with amplitude gain `g`, i.e. `η = 1/(1+g²)`.
    pub fn with_gain(g: f64, detectors: DetectorPair) -> Result<Self, ProtocolError> {
        if !(g.is_finite() && g > 0.0) {
            return Err(ProtocolError::InvalidConfig(format!(
                "gain {g} must be positive"
            )));
        }
        AmplifierSpec::new(1.0 / (1.0 + g * g), detectors)
    }

    pub fn gain_squared(&self) -> f64 {
        (1.0 - self.eta) / self.eta
    }

    pub fn gain(&self) -> f64 {
        self.gain_squared().sqrt()
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(ProtocolError::InvalidConfig(format!(
                "resource bias {} outside (0, 1)",
                self.eta
            )));
        }
        check_unit("resource delivery", self.resource_delivery)?;
        self.detectors.validate(DetectorRegistry::builtin())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSettings {
    pub pair_probability: f64,
}

pub const DEFAULT_N_MAX: u32 = 4;
pub const DEFAULT_REPETITION_RATE: f64 = 81.0e6;

fn default_n_max() -> u32 {
    DEFAULT_N_MAX
}

fn default_repetition_rate() -> f64 {
    DEFAULT_REPETITION_RATE
}

/// Everything needed to evaluate the corrected and direct channels.
///
/// `entangled_source` emits the pair that is split into the two
/// path-entangled states (modes f, e and h, g); `ancilla_source` supplies
/// the heralded resource photon of the amplifier. `n_max` caps the photon
/// number emitted by each source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub loss: f64,
    pub entangled_source: SourceSettings,
    pub ancilla_source: SourceSettings,
    pub amplifier: AmplifierSpec,
    pub swap_detectors: DetectorPair,
    pub herald_detector: DetectorModel,
    /// Efficiencies of the analysis of the two output modes (local, remote).
    pub output_efficiency: PortEfficiency,
    /// Overlap between photons of the two sources at the amplifier.
    pub xi_ha: f64,
    /// Overlap between the two photons of one pair at the swap.
    pub xi_es: f64,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default = "default_repetition_rate")]
    pub repetition_rate: f64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        check_unit("loss", self.loss)?;
        for (what, s) in [
            ("entangled source", &self.entangled_source),
            ("ancilla source", &self.ancilla_source),
        ] {
            if !(0.0..MAX_PAIR_PROBABILITY).contains(&s.pair_probability) {
                return Err(ProtocolError::InvalidConfig(format!(
                    "{what} pair probability {} outside [0, {MAX_PAIR_PROBABILITY})",
                    s.pair_probability
                )));
            }
        }
        self.amplifier.validate()?;
        self.swap_detectors.validate(DetectorRegistry::builtin())?;
        self.herald_detector.validate(DetectorRegistry::builtin())?;
        self.output_efficiency.validate("output efficiency")?;
        check_unit("xi_ha", self.xi_ha)?;
        check_unit("xi_es", self.xi_es)?;
        if self.n_max < 4 {
            return Err(ProtocolError::TruncationTooSmall(self.n_max));
        }
        if !(self.repetition_rate.is_finite() && self.repetition_rate >= 0.0) {
            return Err(ProtocolError::InvalidConfig(format!(
                "repetition rate {} must be non-negative",
                self.repetition_rate
            )));
        }
        Ok(())
    }

    pub fn channel(&self) -> Result<ChannelSpec, ProtocolError> {
        Ok(ChannelSpec::from_loss(self.loss)?)
    }

    pub(crate) fn entangled_source_spec(&self) -> Result<SourceSpec, ProtocolError> {
        Ok(SourceSpec::new(
            self.entangled_source.pair_probability,
            "x",
            "y",
        )?)
    }

    pub(crate) fn ancilla_source_spec(&self) -> Result<SourceSpec, ProtocolError> {
        Ok(SourceSpec::new(
            self.ancilla_source.pair_probability,
            "a",
            "t",
        )?)
    }
}

fn check_unit(what: &str, x: f64) -> Result<(), ProtocolError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(ProtocolError::InvalidConfig(format!(
            "{what} {x} outside [0, 1]"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gain_relation_is_exact() {
        for eta in [0.0012, 0.0049, 0.25, 0.5, 0.9] {
            let a = AmplifierSpec::new(eta, DetectorPair::threshold(1.0)).unwrap();
            assert!((a.gain_squared() * eta - (1.0 - eta)).abs() < 1e-15);
            assert_eq!(a.gain() >= 1.0, eta <= 0.5);
        }
        let a = AmplifierSpec::with_gain(2.0, DetectorPair::pnr(1.0)).unwrap();
        assert!((a.eta - 0.2).abs() < 1e-15);
        assert!(AmplifierSpec::new(0.0, DetectorPair::pnr(1.0)).is_err());
        assert!(AmplifierSpec::new(1.0, DetectorPair::pnr(1.0)).is_err());
        assert!(
            AmplifierSpec::new(0.5, DetectorPair::new("ccd", PortEfficiency::Uniform(1.0)))
                .is_err()
        );
    }

    #[test]
    fn port_efficiency_accepts_number_or_pair() {
        let one: PortEfficiency = serde_json::from_str("0.7").unwrap();
        assert_eq!(one.ports(), [0.7, 0.7]);
        let two: PortEfficiency = serde_json::from_str("[0.6, 0.8]").unwrap();
        assert_eq!(two.ports(), [0.6, 0.8]);
    }
}
