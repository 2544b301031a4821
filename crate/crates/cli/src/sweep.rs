use std::cmp::Ordering;

use qrelay::analytics::{
    effective_transmission_gain, state_concurrence, AnalyticsError, RateReport,
};
use qrelay::protocols::{corrected_channel, direct_transmission, ExperimentConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_LOSSES: [f64; 3] = [0.9884, 0.958, 0.903];
pub const DEFAULT_ETAS: [f64; 8] = [
    0.0012, 0.0049, 0.0076, 0.0302, 0.0670, 0.1170, 0.1786, 0.2500,
];

/// Largest concurrence change tolerated between `n_max` and `n_max + 2`.
pub const CONVERGENCE_TOL: f64 = 1e-3;

/// A grid of channel losses and resource biases evaluated on one base
/// configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub losses: Vec<f64>,
    pub etas: Vec<f64>,
    pub base: ExperimentConfig,
}

impl SweepSpec {
    pub fn new(base: ExperimentConfig) -> Self {
        SweepSpec {
            losses: DEFAULT_LOSSES.to_vec(),
            etas: DEFAULT_ETAS.to_vec(),
            base,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.losses.is_empty() || self.etas.is_empty() {
            return Err(CliError::Config(
                "sweep needs at least one loss and one η".to_string(),
            ));
        }
        for &l in &self.losses {
            if !(0.0..1.0).contains(&l) {
                return Err(CliError::Config(format!("loss {l} outside [0, 1)")));
            }
        }
        for &e in &self.etas {
            if !(e > 0.0 && e < 1.0) {
                return Err(CliError::Config(format!("η {e} outside (0, 1)")));
            }
        }
        self.base
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))
    }

    fn config_at(&self, loss: f64, eta: Option<f64>) -> ExperimentConfig {
        let mut c = self.base.clone();
        c.loss = loss;
        if let Some(eta) = eta {
            c.amplifier.eta = eta;
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Direct,
    Corrected,
}

/// One evaluated grid point. Direct rows carry no η, gain or C_hv; their
/// ready and sent probabilities are both the idler herald probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub channel: Channel,
    pub loss: f64,
    pub eta: Option<f64>,
    pub gain_squared: Option<f64>,
    pub c_hv: Option<f64>,
    /// Direct-channel concurrence at the same loss.
    pub c_fe: f64,
    pub p_channel_ready: f64,
    pub p_state_sent: f64,
    pub channel_ready_rate: f64,
    pub state_sent_rate: f64,
    /// Equivalent transmission gain of the corrected channel over the
    /// direct one; absent when C_hv is zero or beyond the lossless direct
    /// channel.
    pub effective_db: Option<f64>,
    pub n_max: u32,
}

impl ResultRow {
    fn sort_key(&self, other: &Self) -> Ordering {
        self.loss
            .total_cmp(&other.loss)
            .then_with(|| match (self.eta, other.eta) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(a), Some(b)) => a.total_cmp(&b),
            })
    }
}

fn direct_row(config: &ExperimentConfig) -> Result<ResultRow, CliError> {
    let d = direct_transmission(config)?;
    let c_fe = state_concurrence(&d.rho_fe)?;
    Ok(ResultRow {
        channel: Channel::Direct,
        loss: config.loss,
        eta: None,
        gain_squared: None,
        c_hv: None,
        c_fe,
        p_channel_ready: d.p_herald,
        p_state_sent: d.p_herald,
        channel_ready_rate: d.p_herald * config.repetition_rate,
        state_sent_rate: d.p_herald * config.repetition_rate,
        effective_db: None,
        n_max: config.n_max,
    })
}

fn corrected_row(config: &ExperimentConfig, c_fe: f64) -> Result<ResultRow, CliError> {
    let r = corrected_channel(config)?;
    let c_hv = state_concurrence(&r.rho_hv)?;
    let rates = RateReport::new(
        r.p_channel_ready,
        r.p_state_sent,
        0.0,
        config.repetition_rate,
    )?;
    let effective_db = if c_hv > 0.0 {
        match effective_transmission_gain(c_hv, config.loss, config) {
            Ok(g) => Some(g.db),
            Err(AnalyticsError::Saturated { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    Ok(ResultRow {
        channel: Channel::Corrected,
        loss: config.loss,
        eta: Some(config.amplifier.eta),
        gain_squared: Some(config.amplifier.gain_squared()),
        c_hv: Some(c_hv),
        c_fe,
        p_channel_ready: rates.p_channel_ready,
        p_state_sent: rates.p_state_sent,
        channel_ready_rate: rates.channel_ready_rate,
        state_sent_rate: rates.state_sent_rate,
        effective_db,
        n_max: config.n_max,
    })
}

/// Evaluates every grid point: one direct row per loss followed by one
/// corrected row per (loss, η), sorted by loss and then η. `jobs` bounds
/// the worker threads (`None` lets rayon decide).
pub fn run_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<Vec<ResultRow>, CliError> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be at least 1".to_string()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    pool.install(|| {
        let direct: Vec<ResultRow> = spec
            .losses
            .par_iter()
            .map(|&l| direct_row(&spec.config_at(l, None)))
            .collect::<Result<_, _>>()?;
        let points: Vec<(f64, f64, f64)> = direct
            .iter()
            .flat_map(|d| spec.etas.iter().map(move |&e| (d.loss, e, d.c_fe)))
            .collect();
        let corrected: Vec<ResultRow> = points
            .par_iter()
            .map(|&(l, e, c_fe)| corrected_row(&spec.config_at(l, Some(e)), c_fe))
            .collect::<Result<_, _>>()?;
        let mut rows = direct;
        rows.extend(corrected);
        rows.sort_by(ResultRow::sort_key);
        Ok(rows)
    })
}

/// Largest concurrence change between two sweeps of the same grid.
pub fn max_concurrence_change(a: &[ResultRow], b: &[ResultRow]) -> Result<f64, CliError> {
    if a.len() != b.len() {
        return Err(CliError::Numerical(
            "sweeps cover different grids".to_string(),
        ));
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        if x.sort_key(y) != Ordering::Equal || x.channel != y.channel {
            return Err(CliError::Numerical(
                "sweeps cover different grids".to_string(),
            ));
        }
        worst = worst.max((x.c_fe - y.c_fe).abs());
        if let (Some(p), Some(q)) = (x.c_hv, y.c_hv) {
            worst = worst.max((p - q).abs());
        }
    }
    Ok(worst)
}

/// Reruns `spec` with two more photons per source and fails if any
/// concurrence moves by `CONVERGENCE_TOL` or more.
pub fn check_convergence(
    spec: &SweepSpec,
    rows: &[ResultRow],
    jobs: Option<usize>,
) -> Result<f64, CliError> {
    let mut finer = spec.clone();
    finer.base.n_max += 2;
    let change = max_concurrence_change(rows, &run_sweep(&finer, jobs)?)?;
    if change >= CONVERGENCE_TOL {
        return Err(CliError::Convergence {
            max_change: change,
            tolerance: CONVERGENCE_TOL,
        });
    }
    Ok(change)
}
