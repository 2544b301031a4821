//! Simulation and closed-form analytics for lossy single-rail optical
//! channels corrected by heralded (quantum-scissors) amplification and
//! entanglement swapping.

pub mod analytics;
pub mod detection;
pub mod fock;
pub mod optics;
pub mod protocols;
