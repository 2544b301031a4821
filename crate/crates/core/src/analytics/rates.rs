use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::protocols::{
    corrected_channel, direct_transmission, DirectResult, ExperimentConfig, PipelineResult,
};

/// Herald probabilities per pulse and the matching rates in Hz.
///
/// The operation rate of the corrected channel is the probability that a
/// state is sent given that the channel is ready; that of the direct
/// channel is the probability that a state is heralded at all.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub repetition_rate: f64,
    pub p_channel_ready: f64,
    pub p_state_sent: f64,
    pub p_direct: f64,
    pub channel_ready_rate: f64,
    pub state_sent_rate: f64,
    pub direct_rate: f64,
}

impl RateReport {
    pub fn new(
        p_channel_ready: f64,
        p_state_sent: f64,
        p_direct: f64,
        repetition_rate: f64,
    ) -> Result<Self, AnalyticsError> {
        for p in [p_channel_ready, p_state_sent, p_direct] {
            if !(0.0..=1.0 + 1e-9).contains(&p) {
                return Err(AnalyticsError::InvalidParameter(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
        }
        if p_state_sent > p_channel_ready + 1e-15 {
            return Err(AnalyticsError::InvalidParameter(format!(
                "state-sent probability {p_state_sent} exceeds channel-ready probability {p_channel_ready}"
            )));
        }
        Ok(RateReport {
            repetition_rate,
            p_channel_ready,
            p_state_sent,
            p_direct,
            channel_ready_rate: p_channel_ready * repetition_rate,
            state_sent_rate: p_state_sent * repetition_rate,
            direct_rate: p_direct * repetition_rate,
        })
    }

    pub fn from_results(
        corrected: &PipelineResult,
        direct: &DirectResult,
        repetition_rate: f64,
    ) -> Result<Self, AnalyticsError> {
        RateReport::new(
            corrected.p_channel_ready,
            corrected.p_state_sent,
            direct.p_herald,
            repetition_rate,
        )
    }

    /// States sent per pulse on which the channel was ready.
    pub fn corrected_operation_rate(&self) -> f64 {
        if self.p_channel_ready > 0.0 {
            self.p_state_sent / self.p_channel_ready
        } else {
            0.0
        }
    }

    pub fn direct_operation_rate(&self) -> f64 {
        self.p_direct
    }

    /// Corrected over direct operation rate; NaN when the direct channel
    /// never fires.
    pub fn operation_ratio(&self) -> f64 {
        self.corrected_operation_rate() / self.direct_operation_rate()
    }
}

/// Evaluates both channels for `config` and reports their rates at the
/// configured repetition rate.
pub fn operation_rates(config: &ExperimentConfig) -> Result<RateReport, AnalyticsError> {
    let corrected = corrected_channel(config)?;
    let direct = direct_transmission(config)?;
    RateReport::from_results(&corrected, &direct, config.repetition_rate)
}
