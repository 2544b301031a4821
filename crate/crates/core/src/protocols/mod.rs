//! Composite procedures: the quantum-scissors amplifier, the entanglement
//! swapping stage, and the corrected and direct channels built from them.

mod config;
mod pipeline;
mod stages;

pub use config::{
    AmplifierSpec, DetectorPair, ExperimentConfig, PortEfficiency, SourceSettings, DEFAULT_N_MAX,
    DEFAULT_REPETITION_RATE,
};
pub use pipeline::{
    biased_corrected_channel, corrected_channel, direct_transmission, DirectResult, PipelineResult,
};
pub use stages::{entanglement_swap, heralded_amplifier, interfere};

use thiserror::Error;

use crate::detection::DetectionError;
use crate::fock::FockError;
use crate::optics::OpticsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("truncation N_max = {0} cannot hold two pairs per source")]
    TruncationTooSmall(u32),
    #[error("heralding never succeeds for this configuration")]
    NeverHeralded,
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error(transparent)]
    Fock(#[from] FockError),
}
