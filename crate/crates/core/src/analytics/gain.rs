use super::{state_concurrence, AnalyticsError};
use crate::protocols::{direct_transmission, ExperimentConfig};

/// Bisection stops once the bracket on T′ is narrower than this.
pub const INVERSION_TOL: f64 = 1e-10;

/// Transmission T′ at which the direct channel of `config` reaches a given
/// concurrence, and its ratio to the actual transmission in dB.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainEstimate {
    pub equivalent_transmission: f64,
    pub db: f64,
}

/// Concurrence of the direct channel of `config` at transmission `t`.
pub fn direct_concurrence(config: &ExperimentConfig, t: f64) -> Result<f64, AnalyticsError> {
    let mut c = config.clone();
    c.loss = 1.0 - t;
    state_concurrence(&direct_transmission(&c)?.rho_fe)
}

/// Inverts the direct-transmission concurrence curve of `config` (same
/// source noise and efficiencies) at `c_corrected` and compares the
/// resulting transmission with `1 − loss`.
pub fn effective_transmission_gain(
    c_corrected: f64,
    loss: f64,
    config: &ExperimentConfig,
) -> Result<GainEstimate, AnalyticsError> {
    if !(0.0..1.0).contains(&loss) {
        return Err(AnalyticsError::InvalidParameter(format!(
            "loss {loss} outside [0, 1)"
        )));
    }
    if !(0.0..=1.0).contains(&c_corrected) {
        return Err(AnalyticsError::InvalidParameter(format!(
            "concurrence {c_corrected} outside [0, 1]"
        )));
    }
    let t0 = 1.0 - loss;
    let best = direct_concurrence(config, 1.0)?;
    if c_corrected > best {
        return Err(AnalyticsError::Saturated {
            target: c_corrected,
            max: best,
        });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > INVERSION_TOL {
        let mid = 0.5 * (lo + hi);
        if direct_concurrence(config, mid)? < c_corrected {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok(GainEstimate {
        equivalent_transmission: t,
        db: 10.0 * (t / t0).log10(),
    })
}
