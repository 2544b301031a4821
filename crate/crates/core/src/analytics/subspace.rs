use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::fock::DensityOperator;

const TOL: f64 = 1e-9;

/// The `{|00⟩, |01⟩, |10⟩, |11⟩}` block of a two-mode state: the four
/// populations and the coherence `d = ⟨01|ρ|10⟩`. The block need not
/// carry unit trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceMatrix {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
    pub d: Complex64,
}

impl SubspaceMatrix {
    pub fn new(
        p00: f64,
        p01: f64,
        p10: f64,
        p11: f64,
        d: Complex64,
    ) -> Result<Self, AnalyticsError> {
        let m = SubspaceMatrix {
            p00,
            p01,
            p10,
            p11,
            d,
        };
        m.validate()?;
        Ok(m)
    }

    /// Populations `p00, p11` and a real coherence, with `p01 = p10 = 0`
    /// (enough for the concurrence).
    pub fn from_corners(p00: f64, p11: f64, d: f64) -> Self {
        SubspaceMatrix {
            p00,
            p01: 0.0,
            p10: 0.0,
            p11,
            d: Complex64::new(d, 0.0),
        }
    }

    pub fn validate(&self) -> Result<(), AnalyticsError> {
        let pops = [self.p00, self.p01, self.p10, self.p11];
        if pops.iter().any(|p| !p.is_finite() || *p < -TOL) || !self.d.norm().is_finite() {
            return Err(AnalyticsError::InvalidSubspace(format!(
                "negative or non-finite entry in {self:?}"
            )));
        }
        if pops.iter().sum::<f64>() > 1.0 + TOL {
            return Err(AnalyticsError::InvalidSubspace(format!(
                "populations of {self:?} exceed 1"
            )));
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.p00 + self.p01 + self.p10 + self.p11
    }

    /// `2·max(|d| − √(p00·p11), 0)`, with the populations as they stand in
    /// the block (no renormalization).
    pub fn concurrence(&self) -> f64 {
        (2.0 * (self.d.norm() - (self.p00.max(0.0) * self.p11.max(0.0)).sqrt())).clamp(0.0, 1.0)
    }
}

pub fn concurrence(m: &SubspaceMatrix) -> Result<f64, AnalyticsError> {
    m.validate()?;
    Ok(m.concurrence())
}

/// Subspace block of a two-mode state plus the largest coherence that
/// falls outside the `|01⟩`/`|10⟩` pair (zero for the states produced
/// here; kept as a diagnostic).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extracted {
    pub matrix: SubspaceMatrix,
    pub off_block: f64,
    /// Weight on states with more than one photon in some mode.
    pub outside_weight: f64,
}

pub fn extract_subspace(rho: &DensityOperator) -> Result<Extracted, AnalyticsError> {
    if rho.register().len() != 2 {
        return Err(AnalyticsError::InvalidSubspace(format!(
            "expected two modes, found {}",
            rho.register().len()
        )));
    }
    let block: [[u8; 2]; 4] = [[0, 0], [0, 1], [1, 0], [1, 1]];
    let pop = |v: &[u8; 2]| -> Result<f64, AnalyticsError> { Ok(rho.element(v, v)?.re) };
    let d = rho.element(&block[1], &block[2])?;
    let mut off_block: f64 = 0.0;
    for (i, r) in block.iter().enumerate() {
        for (j, c) in block.iter().enumerate() {
            let pair = (i.min(j), i.max(j));
            if i != j && pair != (1, 2) {
                off_block = off_block.max(rho.element(r, c)?.norm());
            }
        }
    }
    let matrix = SubspaceMatrix {
        p00: pop(&block[0])?,
        p01: pop(&block[1])?,
        p10: pop(&block[2])?,
        p11: pop(&block[3])?,
        d,
    };
    let outside_weight = rho.trace_weight() - matrix.trace();
    Ok(Extracted {
        matrix,
        off_block,
        outside_weight,
    })
}

/// Concurrence of a two-mode state read through its subspace block.
pub fn state_concurrence(rho: &DensityOperator) -> Result<f64, AnalyticsError> {
    Ok(extract_subspace(rho)?.matrix.concurrence())
}
