//! Photon detectors and heralding.
//!
//! Detector behaviour is a strategy: each kind implements [`Detector`] and
//! is looked up by name in a [`DetectorRegistry`]. The built-in kinds are
//! `threshold` (click / no click) and `pnr` (photon-number resolving). Both
//! model inefficiency as loss ahead of an ideal detector and have no dark
//! counts.

mod herald;

pub use herald::{DetectorBank, HeraldPattern, HeraldResult, Heraldable, Requirement};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{binomial, FockError, PovmElement};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectionError {
    #[error("unknown detector kind `{0}`")]
    UnknownKind(String),
    #[error("detector kind `{0}` is already registered")]
    DuplicateKind(String),
    #[error("no detector labelled `{0}`")]
    UnknownDetector(String),
    #[error("detector label `{0}` used twice")]
    DuplicateDetector(String),
    #[error("{kind} detectors cannot report {outcome}")]
    UnsupportedOutcome { kind: String, outcome: Outcome },
    #[error("detector efficiency {0} outside [0, 1]")]
    InvalidEfficiency(f64),
    #[error("herald pattern is empty")]
    EmptyPattern,
    #[error("detector `{0}` appears in more than one requirement")]
    OverlappingRequirement(String),
    #[error("mode `{0}` is watched by two detectors")]
    SharedMode(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// What a detector reports in one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    NoClick,
    /// At least one photon registered.
    Click,
    /// Exactly this many photons registered.
    Count(u32),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::NoClick => write!(f, "no-click"),
            Outcome::Click => write!(f, "click"),
            Outcome::Count(n) => write!(f, "count {n}"),
        }
    }
}

/// Response of a unit-less detector kind; efficiency is supplied per call.
pub trait Detector: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Mutually exclusive outcomes whose elements sum to the identity on
    /// up to `max_photons` incident photons.
    fn outcomes(&self, max_photons: u32) -> Vec<Outcome>;

    fn supports(&self, outcome: Outcome) -> bool;

    /// Probability of reporting `outcome` when `n` photons arrive.
    fn likelihood(&self, outcome: Outcome, n: u32, efficiency: f64) -> f64;

    /// The outcome that counts as "one detection event" when heralding.
    fn single_event(&self) -> Outcome;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ThresholdDetector;

impl Detector for ThresholdDetector {
    fn name(&self) -> &'static str {
        "threshold"
    }

    fn outcomes(&self, _max_photons: u32) -> Vec<Outcome> {
        vec![Outcome::NoClick, Outcome::Click]
    }

    fn supports(&self, outcome: Outcome) -> bool {
        matches!(
            outcome,
            Outcome::NoClick | Outcome::Click | Outcome::Count(0)
        )
    }

    fn likelihood(&self, outcome: Outcome, n: u32, efficiency: f64) -> f64 {
        let dark = (1.0 - efficiency).powi(n as i32);
        match outcome {
            Outcome::NoClick | Outcome::Count(0) => dark,
            Outcome::Click => 1.0 - dark,
            Outcome::Count(_) => 0.0,
        }
    }

    fn single_event(&self) -> Outcome {
        Outcome::Click
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct PnrDetector;

impl Detector for PnrDetector {
    fn name(&self) -> &'static str {
        "pnr"
    }

    fn outcomes(&self, max_photons: u32) -> Vec<Outcome> {
        (0..=max_photons).map(Outcome::Count).collect()
    }

    fn supports(&self, _outcome: Outcome) -> bool {
        true
    }

    fn likelihood(&self, outcome: Outcome, n: u32, efficiency: f64) -> f64 {
        let miss = 1.0 - efficiency;
        match outcome {
            Outcome::NoClick => miss.powi(n as i32),
            Outcome::Click => 1.0 - miss.powi(n as i32),
            Outcome::Count(k) if k > n => 0.0,
            Outcome::Count(k) => {
                binomial(n, k) * efficiency.powi(k as i32) * miss.powi((n - k) as i32)
            }
        }
    }

    fn single_event(&self) -> Outcome {
        Outcome::Count(1)
    }
}

/// Name → detector lookup. `builtin()` holds `threshold` and `pnr`; further
/// kinds can be added to a private registry with [`DetectorRegistry::register`].
#[derive(Debug, Clone, Default)]
pub struct DetectorRegistry {
    kinds: BTreeMap<String, Arc<dyn Detector>>,
}

impl DetectorRegistry {
    pub fn new() -> Self {
        DetectorRegistry::default()
    }

    pub fn with_builtins() -> Self {
        let mut r = DetectorRegistry::new();
        r.register(Arc::new(ThresholdDetector))
            .expect("fresh registry");
        r.register(Arc::new(PnrDetector)).expect("fresh registry");
        r
    }

    pub fn builtin() -> &'static DetectorRegistry {
        static BUILTIN: OnceLock<DetectorRegistry> = OnceLock::new();
        BUILTIN.get_or_init(DetectorRegistry::with_builtins)
    }

    pub fn register(&mut self, detector: Arc<dyn Detector>) -> Result<(), DetectionError> {
        let name = detector.name().to_string();
        if self.kinds.contains_key(&name) {
            return Err(DetectionError::DuplicateKind(name));
        }
        self.kinds.insert(name, detector);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Detector>, DetectionError> {
        self.kinds
            .get(name)
            .cloned()
            .ok_or_else(|| DetectionError::UnknownKind(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.kinds.keys().map(String::as_str)
    }
}

/// Detector kind (a registry name) together with its efficiency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub kind: String,
    pub efficiency: f64,
}

impl DetectorModel {
    pub fn new(kind: &str, efficiency: f64) -> Result<Self, DetectionError> {
        let m = DetectorModel {
            kind: kind.to_string(),
            efficiency,
        };
        m.validate(DetectorRegistry::builtin())?;
        Ok(m)
    }

    pub fn threshold(efficiency: f64) -> Result<Self, DetectionError> {
        DetectorModel::new("threshold", efficiency)
    }

    pub fn pnr(efficiency: f64) -> Result<Self, DetectionError> {
        DetectorModel::new("pnr", efficiency)
    }

    pub fn validate(&self, registry: &DetectorRegistry) -> Result<(), DetectionError> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(DetectionError::InvalidEfficiency(self.efficiency));
        }
        registry.get(&self.kind).map(|_| ())
    }
}

/// One POVM element per outcome, acting on the total photon number found
/// in `modes` (a detector may watch several sub-modes).
pub fn povm_elements<S: AsRef<str>>(
    detector: &dyn Detector,
    efficiency: f64,
    modes: &[S],
    max_photons: u32,
) -> Result<Vec<(Outcome, PovmElement)>, DetectionError> {
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(DetectionError::InvalidEfficiency(efficiency));
    }
    detector
        .outcomes(max_photons)
        .into_iter()
        .map(|o| {
            Ok((
                o,
                povm_element(detector, efficiency, o, modes, max_photons)?,
            ))
        })
        .collect()
}

pub fn povm_element<S: AsRef<str>>(
    detector: &dyn Detector,
    efficiency: f64,
    outcome: Outcome,
    modes: &[S],
    max_photons: u32,
) -> Result<PovmElement, DetectionError> {
    if !detector.supports(outcome) {
        return Err(DetectionError::UnsupportedOutcome {
            kind: detector.name().to_string(),
            outcome,
        });
    }
    let modes: Vec<String> = modes.iter().map(|m| m.as_ref().to_string()).collect();
    Ok(PovmElement::from_fn(modes, max_photons, |n| {
        detector.likelihood(outcome, n, efficiency)
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{DensityOperator, ModeRegister, PureState};

    fn click_probability(kind: &str, eff: f64, n: u8) -> f64 {
        let det = DetectorRegistry::builtin().get(kind).unwrap();
        let reg = ModeRegister::new(["d"]).unwrap();
        let rho = DensityOperator::from_pure(&PureState::basis_state(reg, 4, &[n]).unwrap());
        let e = povm_element(det.as_ref(), eff, Outcome::Click, &["d"], 4).unwrap();
        rho.project(&e).unwrap().1
    }

    #[test]
    fn threshold_examples() {
        assert!((click_probability("threshold", 1.0, 2) - 1.0).abs() < 1e-15);
        assert!((click_probability("threshold", 0.5, 1) - 0.5).abs() < 1e-15);
        assert!((click_probability("threshold", 0.5, 2) - 0.75).abs() < 1e-15);
        assert_eq!(click_probability("threshold", 0.7, 0), 0.0);
    }

    #[test]
    fn pnr_counts_are_binomial() {
        let d = PnrDetector;
        assert!((d.likelihood(Outcome::Count(1), 2, 0.5) - 0.5).abs() < 1e-15);
        assert!((d.likelihood(Outcome::Count(2), 2, 0.5) - 0.25).abs() < 1e-15);
        assert_eq!(d.likelihood(Outcome::Count(3), 2, 0.5), 0.0);
        assert_eq!(d.likelihood(Outcome::Count(1), 2, 1.0), 0.0);
    }

    #[test]
    fn registry_lookup() {
        let r = DetectorRegistry::builtin();
        assert_eq!(r.names().collect::<Vec<_>>(), ["pnr", "threshold"]);
        assert!(matches!(
            r.get("snspd"),
            Err(DetectionError::UnknownKind(_))
        ));
        let mut mine = DetectorRegistry::with_builtins();
        assert!(matches!(
            mine.register(Arc::new(PnrDetector)),
            Err(DetectionError::DuplicateKind(_))
        ));
        assert!(DetectorModel::new("threshold", 1.2).is_err());
        assert!(DetectorModel::new("bolometer", 0.5).is_err());
    }

    #[test]
    fn threshold_rejects_counts() {
        let e = povm_element(&ThresholdDetector, 1.0, Outcome::Count(1), &["d"], 2);
        assert!(matches!(e, Err(DetectionError::UnsupportedOutcome { .. })));
    }
}
