use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{povm_element, DetectionError, Detector, DetectorModel, DetectorRegistry, Outcome};
use crate::fock::{
    DensityOperator, FockBasisVector, ModeRegister, ModeUnitary, OpticalState, PureState,
};

/// One condition of a herald pattern.
#[derive(Clone, Debug, PartialEq)]
pub enum Requirement {
    Outcome {
        detector: String,
        outcome: Outcome,
    },
    /// One and only one detector of the group reports its single event
    /// while every other member stays dark.
    ExactlyOne {
        detectors: Vec<String>,
    },
}

impl Requirement {
    fn detectors(&self) -> Vec<&str> {
        match self {
            Requirement::Outcome { detector, .. } => vec![detector.as_str()],
            Requirement::ExactlyOne { detectors } => detectors.iter().map(String::as_str).collect(),
        }
    }
}

/// Conjunction of requirements plus feed-forward corrections: a correction
/// registered for a detector is applied to the kept modes in every branch
/// where that detector fired.
#[derive(Clone, Debug, Default)]
pub struct HeraldPattern {
    requirements: Vec<Requirement>,
    corrections: BTreeMap<String, Vec<ModeUnitary>>,
}

impl HeraldPattern {
    pub fn new() -> Self {
        HeraldPattern::default()
    }

    pub fn require(mut self, detector: &str, outcome: Outcome) -> Self {
        self.requirements.push(Requirement::Outcome {
            detector: detector.to_string(),
            outcome,
        });
        self
    }

    pub fn exactly_one<S: AsRef<str>>(mut self, detectors: &[S]) -> Self {
        self.requirements.push(Requirement::ExactlyOne {
            detectors: detectors.iter().map(|d| d.as_ref().to_string()).collect(),
        });
        self
    }

    pub fn correct_on(mut self, detector: &str, op: ModeUnitary) -> Self {
        self.corrections
            .entry(detector.to_string())
            .or_default()
            .push(op);
        self
    }

    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    pub fn is_empty(&self) -> bool {
        self.requirements.is_empty()
    }
}

/// Heralded state on the kept modes, sub-normalized to the herald
/// probability.
#[derive(Clone, Debug)]
pub struct HeraldResult {
    pub state: DensityOperator,
    pub probability: f64,
}

#[derive(Clone, Debug)]
struct BankEntry {
    detector: Arc<dyn Detector>,
    efficiency: f64,
    modes: Vec<String>,
}

/// Named detectors, each watching one or more modes.
#[derive(Clone, Debug)]
pub struct DetectorBank {
    registry: DetectorRegistry,
    entries: BTreeMap<String, BankEntry>,
}

struct Branch<'a> {
    events: Vec<(&'a BankEntry, Outcome)>,
    corrections: Vec<&'a ModeUnitary>,
}

impl Default for DetectorBank {
    fn default() -> Self {
        DetectorBank::new()
    }
}

impl DetectorBank {
    pub fn new() -> Self {
        DetectorBank::with_registry(DetectorRegistry::builtin().clone())
    }

    pub fn with_registry(registry: DetectorRegistry) -> Self {
        DetectorBank {
            registry,
            entries: BTreeMap::new(),
        }
    }

    pub fn add<S: AsRef<str>>(
        mut self,
        label: &str,
        model: &DetectorModel,
        modes: &[S],
    ) -> Result<Self, DetectionError> {
        model.validate(&self.registry)?;
        if self.entries.contains_key(label) {
            return Err(DetectionError::DuplicateDetector(label.to_string()));
        }
        let modes: Vec<String> = modes.iter().map(|m| m.as_ref().to_string()).collect();
        for m in &modes {
            if self.entries.values().any(|e| e.modes.contains(m)) {
                return Err(DetectionError::SharedMode(m.clone()));
            }
        }
        self.entries.insert(
            label.to_string(),
            BankEntry {
                detector: self.registry.get(&model.kind)?,
                efficiency: model.efficiency,
                modes,
            },
        );
        Ok(self)
    }

    pub fn modes(&self, label: &str) -> Result<&[String], DetectionError> {
        self.entry(label).map(|e| e.modes.as_slice())
    }

    fn entry(&self, label: &str) -> Result<&BankEntry, DetectionError> {
        self.entries
            .get(label)
            .ok_or_else(|| DetectionError::UnknownDetector(label.to_string()))
    }

    /// Every combination of detector outcomes the pattern accepts.
    fn branches<'a>(
        &'a self,
        pattern: &'a HeraldPattern,
    ) -> Result<Vec<Branch<'a>>, DetectionError> {
        if pattern.is_empty() {
            return Err(DetectionError::EmptyPattern);
        }
        let mut seen = BTreeSet::new();
        for r in pattern.requirements() {
            for d in r.detectors() {
                self.entry(d)?;
                if !seen.insert(d) {
                    return Err(DetectionError::OverlappingRequirement(d.to_string()));
                }
            }
        }
        let mut branches = vec![Branch {
            events: Vec::new(),
            corrections: Vec::new(),
        }];
        for r in pattern.requirements() {
            let options: Vec<Vec<(&str, Outcome)>> = match r {
                Requirement::Outcome { detector, outcome } => {
                    vec![vec![(detector.as_str(), *outcome)]]
                }
                Requirement::ExactlyOne { detectors } => (0..detectors.len())
                    .map(|fired| {
                        detectors
                            .iter()
                            .enumerate()
                            .map(|(k, d)| {
                                let e = self.entries[d].detector.single_event();
                                (d.as_str(), if k == fired { e } else { Outcome::NoClick })
                            })
                            .collect()
                    })
                    .collect(),
            };
            let mut next = Vec::with_capacity(branches.len() * options.len());
            for b in &branches {
                for opt in &options {
                    let mut events = b.events.clone();
                    let mut corrections = b.corrections.clone();
                    for &(label, outcome) in opt {
                        let entry = &self.entries[label];
                        if !entry.detector.supports(outcome) {
                            return Err(DetectionError::UnsupportedOutcome {
                                kind: entry.detector.name().to_string(),
                                outcome,
                            });
                        }
                        events.push((entry, outcome));
                        let fired = !matches!(outcome, Outcome::NoClick | Outcome::Count(0));
                        if fired {
                            if let Some(ops) = pattern.corrections.get(label) {
                                corrections.extend(ops.iter());
                            }
                        }
                    }
                    next.push(Branch {
                        events,
                        corrections,
                    });
                }
            }
            branches = next;
        }
        Ok(branches)
    }

    /// Conditions `rho` on `pattern`, applies the feed-forward corrections
    /// and traces out everything except `keep`.
    pub fn herald_density<S: AsRef<str>>(
        &self,
        rho: &DensityOperator,
        pattern: &HeraldPattern,
        keep: &[S],
    ) -> Result<HeraldResult, DetectionError> {
        let max = rho.max_photons();
        let mut total: Option<DensityOperator> = None;
        for branch in self.branches(pattern)? {
            let mut cond = rho.clone();
            for (entry, outcome) in &branch.events {
                let e = povm_element(
                    entry.detector.as_ref(),
                    entry.efficiency,
                    *outcome,
                    &entry.modes,
                    max,
                )?;
                cond = cond.project(&e)?.0;
            }
            for op in &branch.corrections {
                cond = cond.apply_unitary(op)?;
            }
            let reduced = cond.partial_trace(keep)?;
            total = Some(match total {
                None => reduced,
                Some(acc) => acc.add(&reduced)?,
            });
        }
        let state = finish(total.expect("at least one branch"), rho.dropped_weight())?;
        let probability = state.trace_weight();
        Ok(HeraldResult { state, probability })
    }

    /// Same as [`herald_density`](Self::herald_density) for a sparse pure
    /// state; only the kept modes are ever made dense.
    pub fn herald_pure<S: AsRef<str>>(
        &self,
        psi: &PureState,
        pattern: &HeraldPattern,
        keep: &[S],
    ) -> Result<HeraldResult, DetectionError> {
        let mut total: Option<DensityOperator> = None;
        for branch in self.branches(pattern)? {
            let weight = branch.likelihood(psi.register())?;
            let mut cond = psi.map_diagonal(|v| weight(v).sqrt());
            for op in &branch.corrections {
                cond = OpticalState::apply_unitary(&cond, op)?;
            }
            let reduced = cond.reduced_density(keep)?;
            total = Some(match total {
                None => reduced,
                Some(acc) => acc.add(&reduced)?,
            });
        }
        let state = finish(total.expect("at least one branch"), psi.dropped_weight())?;
        let probability = state.trace_weight();
        Ok(HeraldResult { state, probability })
    }

    /// Probability that `pattern` is heralded on `psi`, without forming any
    /// conditional state.
    pub fn probability_pure(
        &self,
        psi: &PureState,
        pattern: &HeraldPattern,
    ) -> Result<f64, DetectionError> {
        let mut p = 0.0;
        for branch in self.branches(pattern)? {
            let weight = branch.likelihood(psi.register())?;
            p += psi
                .iter()
                .map(|(v, a)| a.norm_sqr() * weight(v))
                .sum::<f64>();
        }
        Ok(p)
    }

    pub fn probability_density(
        &self,
        rho: &DensityOperator,
        pattern: &HeraldPattern,
    ) -> Result<f64, DetectionError> {
        let mut p = 0.0;
        for branch in self.branches(pattern)? {
            let weight = branch.likelihood(rho.register())?;
            p += rho
                .basis()
                .states()
                .iter()
                .enumerate()
                .map(|(i, v)| rho.matrix()[(i, i)].re * weight(v))
                .sum::<f64>();
        }
        Ok(p)
    }
}

impl Branch<'_> {
    /// Joint outcome probability of this branch as a function of the basis
    /// vector, for states on `register`.
    fn likelihood(
        &self,
        register: &ModeRegister,
    ) -> Result<impl Fn(&FockBasisVector) -> f64 + '_, DetectionError> {
        let positions: Vec<Vec<usize>> = self
            .events
            .iter()
            .map(|(e, _)| register.indices_of(&e.modes))
            .collect::<Result<_, _>>()?;
        Ok(move |v: &FockBasisVector| {
            self.events
                .iter()
                .zip(&positions)
                .map(|((entry, outcome), pos)| {
                    let n: u32 = pos.iter().map(|&p| v.get(p) as u32).sum();
                    entry.detector.likelihood(*outcome, n, entry.efficiency)
                })
                .product::<f64>()
                .clamp(0.0, 1.0)
        })
    }
}

/// States that can be conditioned on detector outcomes.
pub trait Heraldable: OpticalState {
    fn herald<S: AsRef<str>>(
        &self,
        bank: &DetectorBank,
        pattern: &HeraldPattern,
        keep: &[S],
    ) -> Result<HeraldResult, DetectionError>;

    fn herald_probability(
        &self,
        bank: &DetectorBank,
        pattern: &HeraldPattern,
    ) -> Result<f64, DetectionError>;
}

impl Heraldable for PureState {
    fn herald<S: AsRef<str>>(
        &self,
        bank: &DetectorBank,
        pattern: &HeraldPattern,
        keep: &[S],
    ) -> Result<HeraldResult, DetectionError> {
        bank.herald_pure(self, pattern, keep)
    }

    fn herald_probability(
        &self,
        bank: &DetectorBank,
        pattern: &HeraldPattern,
    ) -> Result<f64, DetectionError> {
        bank.probability_pure(self, pattern)
    }
}

impl Heraldable for DensityOperator {
    fn herald<S: AsRef<str>>(
        &self,
        bank: &DetectorBank,
        pattern: &HeraldPattern,
        keep: &[S],
    ) -> Result<HeraldResult, DetectionError> {
        bank.herald_density(self, pattern, keep)
    }

    fn herald_probability(
        &self,
        bank: &DetectorBank,
        pattern: &HeraldPattern,
    ) -> Result<f64, DetectionError> {
        bank.probability_density(self, pattern)
    }
}

/// Branch sums carry the input's dropped weight once, not once per branch.
fn finish(sum: DensityOperator, dropped: f64) -> Result<DensityOperator, DetectionError> {
    let m: DMatrix<Complex64> = sum.matrix().clone();
    Ok(DensityOperator::from_matrix(sum.basis().clone(), m)?.with_dropped_weight(dropped))
}
