//! Truncated multimode Fock-space substrate: registers, basis enumeration,
//! sparse pure states, dense density operators and passive unitaries.

mod basis;
mod channel;
mod density;
mod pure;
mod register;
mod state;
mod unitary;

pub use basis::{FockBasis, FockBasisVector};
pub use channel::{KrausChannel, SingleModeOperator};
pub use density::{DensityOperator, PovmElement};
pub use pure::{PureState, PRUNE_THRESHOLD};
pub use register::ModeRegister;
pub use state::{fresh_label, OpticalState};
pub use unitary::{FockImage, ModeUnitary};

pub(crate) use channel::binomial;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("mode label `{0}` appears twice")]
    DuplicateMode(String),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("{photons} photons exceed the truncation of {max}")]
    Truncation { photons: u32, max: u32 },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("mode map is not unitary (max |U†U − I| = {0:e})")]
    NotUnitary(f64),
    #[error("POVM weight {0} outside [0, 1]")]
    InvalidPovm(f64),
    #[error("operands live on different registers or truncations")]
    RegisterMismatch,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
