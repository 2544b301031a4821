//! Published reference values and the regression check against them.

use std::path::Path;

use log::warn;
use num_complex::Complex64;
use qrelay::analytics::SubspaceMatrix;
use serde::{Deserialize, Serialize};

use crate::sweep::Channel;
use crate::CliError;

pub const CONCURRENCE_FILE: &str = "concurrence.toml";
pub const MATRIX_FILE: &str = "density_matrices.toml";
pub const RATE_FILE: &str = "rates.toml";

const BUILTIN_CONCURRENCE: &str = include_str!("../fixtures/concurrence.toml");
const BUILTIN_MATRICES: &str = include_str!("../fixtures/density_matrices.toml");
const BUILTIN_RATES: &str = include_str!("../fixtures/rates.toml");

/// Slack for comparing decimal fixture values.
const EPS: f64 = 1e-12;
const ROUNDING: f64 = 2e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportedDirect {
    pub loss: f64,
    pub c: f64,
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportedSeries {
    pub loss: f64,
    pub eta: Vec<f64>,
    pub c: Vec<f64>,
    pub sd: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceTable {
    #[serde(default)]
    pub direct: Vec<ReportedDirect>,
    #[serde(default)]
    pub corrected: Vec<ReportedSeries>,
}

impl ConcurrenceTable {
    pub fn direct_at(&self, loss: f64) -> Option<&ReportedDirect> {
        self.direct.iter().find(|d| (d.loss - loss).abs() < EPS)
    }

    /// Reported C_hv and its s.d. at (loss, η).
    pub fn corrected_at(&self, loss: f64, eta: f64) -> Option<(f64, f64)> {
        let s = self
            .corrected
            .iter()
            .find(|s| (s.loss - loss).abs() < EPS)?;
        let i = s.eta.iter().position(|e| (e - eta).abs() < EPS)?;
        Some((s.c[i], s.sd[i]))
    }

    fn validate(&self) -> Result<(), CliError> {
        for s in &self.corrected {
            if s.eta.len() != s.c.len() || s.eta.len() != s.sd.len() {
                return Err(CliError::Config(format!(
                    "reported series at loss {} has mismatched lengths",
                    s.loss
                )));
            }
        }
        Ok(())
    }
}

/// Two-mode density matrix restricted to the one-photon-per-mode block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFixture {
    pub name: String,
    pub channel: Channel,
    pub loss: f64,
    /// Resource bias of corrected-channel matrices.
    pub eta: Option<f64>,
    pub p00: f64,
    pub p10: f64,
    pub p01: f64,
    pub p11: f64,
    pub d: f64,
}

impl MatrixFixture {
    /// The block as a `SubspaceMatrix`. Entries are given to five
    /// decimals, so the populations may overshoot unit trace by up to
    /// `4 × 0.000005`.
    pub fn subspace(&self) -> Result<SubspaceMatrix, CliError> {
        let m = SubspaceMatrix {
            p00: self.p00,
            p01: self.p01,
            p10: self.p10,
            p11: self.p11,
            d: Complex64::new(self.d, 0.0),
        };
        let pops = [m.p00, m.p01, m.p10, m.p11];
        if pops.iter().any(|p| !(*p >= 0.0)) || !(self.d >= 0.0) || m.trace() > 1.0 + ROUNDING {
            return Err(CliError::Config(format!(
                "{}: not a valid density-matrix block",
                self.name
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Default, Deserialize)]
struct MatrixFile {
    #[serde(default)]
    matrix: Vec<MatrixFixture>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSeries {
    pub loss: f64,
    pub ready: Vec<f64>,
    pub ready_sd: Vec<f64>,
    pub sent: Vec<f64>,
    pub sent_sd: Vec<f64>,
}

/// Herald rates in Hz per (loss, η).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub repetition_rate: f64,
    pub eta: Vec<f64>,
    pub loss: Vec<RateSeries>,
}

impl RateTable {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.repetition_rate > 0.0) {
            return Err(CliError::Config(
                "rate table needs a positive repetition rate".to_string(),
            ));
        }
        let n = self.eta.len();
        for s in &self.loss {
            if [
                s.ready.len(),
                s.ready_sd.len(),
                s.sent.len(),
                s.sent_sd.len(),
            ]
            .iter()
            .any(|&l| l != n)
            {
                return Err(CliError::Config(format!(
                    "rate series at loss {} has mismatched lengths",
                    s.loss
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FixtureSet {
    pub concurrences: ConcurrenceTable,
    pub matrices: Vec<MatrixFixture>,
    pub rates: Option<RateTable>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

impl FixtureSet {
    /// The reference values shipped with the crate.
    pub fn builtin() -> Self {
        FixtureSet::from_texts(
            Some(BUILTIN_CONCURRENCE),
            Some(BUILTIN_MATRICES),
            Some(BUILTIN_RATES),
        )
        .expect("shipped fixtures parse")
    }

    fn from_texts(
        conc: Option<&str>,
        mats: Option<&str>,
        rates: Option<&str>,
    ) -> Result<Self, CliError> {
        let concurrences: ConcurrenceTable = match conc {
            Some(t) => parse(t, CONCURRENCE_FILE)?,
            None => ConcurrenceTable::default(),
        };
        concurrences.validate()?;
        let matrices = match mats {
            Some(t) => parse::<MatrixFile>(t, MATRIX_FILE)?.matrix,
            None => Vec::new(),
        };
        let rates: Option<RateTable> = rates.map(|t| parse(t, RATE_FILE)).transpose()?;
        if let Some(r) = &rates {
            r.validate()?;
        }
        Ok(FixtureSet {
            concurrences,
            matrices,
            rates,
        })
    }

    /// Reads whichever fixture files exist in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, CliError> {
        if !dir.is_dir() {
            return Err(CliError::Config(format!(
                "fixture directory {} not found",
                dir.display()
            )));
        }
        let read = |name: &str| -> Result<Option<String>, CliError> {
            let path = dir.join(name);
            if !path.exists() {
                return Ok(None);
            }
            std::fs::read_to_string(&path)
                .map(Some)
                .map_err(|source| CliError::Read { path, source })
        };
        let (c, m, r) = (
            read(CONCURRENCE_FILE)?,
            read(MATRIX_FILE)?,
            read(RATE_FILE)?,
        );
        FixtureSet::from_texts(c.as_deref(), m.as_deref(), r.as_deref())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub name: String,
    pub computed: f64,
    pub reported: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegressionReport {
    pub comparisons: Vec<Comparison>,
}

impl RegressionReport {
    pub fn failures(&self) -> usize {
        self.comparisons.iter().filter(|c| !c.pass).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn into_result(self) -> Result<Self, CliError> {
        if self.passed() {
            Ok(self)
        } else {
            Err(CliError::Regression(
                self.failures(),
                self.comparisons.len(),
            ))
        }
    }
}

/// Concurrence of every fixture matrix against the concurrence reported
/// for the same channel, loss and η, within the reported ±1 s.d.
pub fn regression_check(fixtures: &FixtureSet) -> Result<RegressionReport, CliError> {
    if fixtures.matrices.is_empty() {
        warn!("no density-matrix fixtures; regression check passes vacuously");
    }
    let mut comparisons = Vec::with_capacity(fixtures.matrices.len());
    for m in &fixtures.matrices {
        let computed = m.subspace()?.concurrence();
        let (reported, sd) = match (m.channel, m.eta) {
            (Channel::Direct, _) => fixtures.concurrences.direct_at(m.loss).map(|d| (d.c, d.sd)),
            (Channel::Corrected, Some(eta)) => fixtures.concurrences.corrected_at(m.loss, eta),
            (Channel::Corrected, None) => None,
        }
        .ok_or_else(|| {
            CliError::Config(format!(
                "{}: no reported concurrence to compare with",
                m.name
            ))
        })?;
        comparisons.push(Comparison {
            name: m.name.clone(),
            computed,
            reported,
            tolerance: sd,
            pass: (computed - reported).abs() <= sd + EPS,
        });
    }
    Ok(RegressionReport { comparisons })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_fixtures_are_complete() {
        let f = FixtureSet::builtin();
        assert_eq!(f.matrices.len(), 6);
        assert_eq!(f.concurrences.direct.len(), 3);
        assert_eq!(
            f.concurrences.corrected_at(0.9884, 0.0049),
            Some((0.27, 0.02))
        );
        let rates = f.rates.unwrap();
        assert_eq!(rates.loss.len(), 3);
        assert_eq!(rates.loss[0].ready[7], 7303.1);
    }

    #[test]
    fn empty_set_passes_vacuously() {
        let r = regression_check(&FixtureSet::default()).unwrap();
        assert!(r.passed() && r.comparisons.is_empty());
    }

    #[test]
    fn unmatched_matrix_is_a_config_error() {
        let mut f = FixtureSet::builtin();
        f.matrices[3].eta = Some(0.5);
        assert!(matches!(regression_check(&f), Err(CliError::Config(_))));
    }
}
