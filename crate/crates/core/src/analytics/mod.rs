//! Closed-form formulas, entanglement and interference metrics, the rate
//! model and the effective-transmission inversion.

mod formulas;
mod gain;
mod hom;
mod rates;
mod subspace;

pub use formulas::{
    average_fidelity, average_fidelity_with_error, biased_output, fidelity_after_ha, ha_output,
    loss_output, optimal_gain, QubitSpec, FIDELITY_QUADRATURE_TOL,
};
pub use gain::{direct_concurrence, effective_transmission_gain, GainEstimate, INVERSION_TOL};
pub use hom::{hom_visibility, simulate_hom, HomRates};
pub use rates::{operation_rates, RateReport};
pub use subspace::{concurrence, extract_subspace, state_concurrence, Extracted, SubspaceMatrix};

use thiserror::Error;

use crate::detection::DetectionError;
use crate::fock::FockError;
use crate::protocols::ProtocolError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("invalid subspace matrix: {0}")]
    InvalidSubspace(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("concurrence {target} is above the direct channel's maximum {max}")]
    Saturated { target: f64, max: f64 },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error(transparent)]
    Fock(#[from] FockError),
}
