use super::AnalyticsError;
use crate::detection::{DetectorBank, DetectorModel, HeraldPattern, Outcome};
use crate::fock::{ModeRegister, PureState};
use crate::protocols::interfere;

/// `1 − min/baseline` for coincidence rates measured at the dip and far
/// from it.
pub fn hom_visibility(
    coincidence_min: f64,
    coincidence_baseline: f64,
) -> Result<f64, AnalyticsError> {
    if !(coincidence_baseline > 0.0) || coincidence_min < 0.0 {
        return Err(AnalyticsError::InvalidParameter(format!(
            "coincidences must be non-negative with a positive baseline, got {coincidence_min} / {coincidence_baseline}"
        )));
    }
    Ok(1.0 - coincidence_min / coincidence_baseline)
}

/// Coincidence probabilities of two single photons on a 50:50 splitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomRates {
    /// Zero delay, overlap `ξ`.
    pub coincidence_min: f64,
    /// Photons made fully distinguishable (large delay).
    pub coincidence_baseline: f64,
}

impl HomRates {
    pub fn visibility(&self) -> Result<f64, AnalyticsError> {
        hom_visibility(self.coincidence_min, self.coincidence_baseline)
    }
}

fn coincidence(xi: f64) -> Result<f64, AnalyticsError> {
    let pair = PureState::basis_state(ModeRegister::new(["i", "j"])?, 2, &[1, 1])?;
    let (out, groups) = interfere(&pair, "i", "j", xi)?;
    let det = DetectorModel::threshold(1.0)?;
    let bank = DetectorBank::new()
        .add("A", &det, &groups[0])?
        .add("B", &det, &groups[1])?;
    let pattern = HeraldPattern::new()
        .require("A", Outcome::Click)
        .require("B", Outcome::Click);
    Ok(bank.probability_pure(&out, &pattern)?)
}

/// Fock simulation of a delay-free HOM measurement with overlap `xi`.
pub fn simulate_hom(xi: f64) -> Result<HomRates, AnalyticsError> {
    Ok(HomRates {
        coincidence_min: coincidence(xi)?,
        coincidence_baseline: coincidence(0.0)?,
    })
}
