use qrelay::analytics::{operation_rates, RateReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::fixtures::RateTable;
use crate::CliError;
use qrelay::protocols::ExperimentConfig;

/// Model herald probabilities per pulse next to the published ones.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateComparison {
    pub loss: f64,
    pub eta: f64,
    pub model: RateReport,
    pub reported_ready: f64,
    pub reported_sent: f64,
}

impl RateComparison {
    /// Model over reported channel-ready probability.
    pub fn ready_ratio(&self) -> f64 {
        self.model.p_channel_ready / self.reported_ready
    }

    pub fn sent_ratio(&self) -> f64 {
        self.model.p_state_sent / self.reported_sent
    }
}

/// Evaluates `base` at every (loss, η) of `table`. Reported rates are
/// converted to per-pulse probabilities with the table's repetition rate.
pub fn compare_rates(
    base: &ExperimentConfig,
    table: &RateTable,
) -> Result<Vec<RateComparison>, CliError> {
    let points: Vec<(usize, usize)> = (0..table.loss.len())
        .flat_map(|i| (0..table.eta.len()).map(move |j| (i, j)))
        .collect();
    points
        .par_iter()
        .map(|&(i, j)| {
            let series = &table.loss[i];
            let mut c = base.clone();
            c.loss = series.loss;
            c.amplifier.eta = table.eta[j];
            Ok(RateComparison {
                loss: series.loss,
                eta: table.eta[j],
                model: operation_rates(&c)?,
                reported_ready: series.ready[j] / table.repetition_rate,
                reported_sent: series.sent[j] / table.repetition_rate,
            })
        })
        .collect()
}
