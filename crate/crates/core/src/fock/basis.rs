use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use super::{FockError, ModeRegister};

/// Photon occupation numbers, one entry per mode of a register.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockBasisVector(SmallVec<[u8; 16]>);

impl FockBasisVector {
    pub fn vacuum(modes: usize) -> Self {
        FockBasisVector(SmallVec::from_elem(0, modes))
    }

    pub fn from_slice(occupations: &[u8]) -> Self {
        FockBasisVector(SmallVec::from_slice(occupations))
    }

    pub fn occupations(&self) -> &[u8] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    pub fn get(&self, mode: usize) -> u8 {
        self.0[mode]
    }

    pub fn set(&mut self, mode: usize, n: u8) {
        self.0[mode] = n;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, n: u8) {
        self.0.push(n);
    }

    pub fn concat(&self, other: &FockBasisVector) -> Self {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        FockBasisVector(out)
    }

    /// Occupations at the given positions, in that order.
    pub fn select(&self, positions: &[usize]) -> Self {
        FockBasisVector(positions.iter().map(|&p| self.0[p]).collect())
    }

    pub fn remove(&mut self, mode: usize) -> u8 {
        self.0.remove(mode)
    }
}

impl fmt::Debug for FockBasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// Enumerated truncated basis: every occupation vector on `register` with
/// at most `max_photons` photons in total.
///
/// Ordering is by total photon number, then lexicographic with the largest
/// occupation of the first mode first (`|00⟩, |10⟩, |01⟩, |20⟩, |11⟩, …`).
pub struct FockBasis {
    register: ModeRegister,
    max_photons: u32,
    states: Vec<FockBasisVector>,
    index: HashMap<FockBasisVector, usize>,
}

impl FockBasis {
    pub fn new(register: ModeRegister, max_photons: u32) -> Arc<Self> {
        let modes = register.len();
        let mut states = Vec::new();
        for total in 0..=max_photons {
            let mut current = FockBasisVector::vacuum(modes);
            compositions(modes, 0, total, &mut current, &mut states);
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Arc::new(FockBasis {
            register,
            max_photons,
            states,
            index,
        })
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn max_photons(&self) -> u32 {
        self.max_photons
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockBasisVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &FockBasisVector {
        &self.states[i]
    }

    pub fn index_of(&self, v: &FockBasisVector) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn checked_index(&self, v: &FockBasisVector) -> Result<usize, FockError> {
        self.index_of(v).ok_or(FockError::Truncation {
            photons: v.total(),
            max: self.max_photons,
        })
    }
}

impl fmt::Debug for FockBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockBasis")
            .field("register", &self.register)
            .field("max_photons", &self.max_photons)
            .field("dim", &self.states.len())
            .finish()
    }
}

fn compositions(
    modes: usize,
    pos: usize,
    remaining: u32,
    current: &mut FockBasisVector,
    out: &mut Vec<FockBasisVector>,
) {
    if modes == 0 {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    if pos == modes - 1 {
        current.set(pos, remaining as u8);
        out.push(current.clone());
        current.set(pos, 0);
        return;
    }
    for n in (0..=remaining).rev() {
        current.set(pos, n as u8);
        compositions(modes, pos + 1, remaining - n, current, out);
    }
    current.set(pos, 0);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn dimension_is_stars_and_bars() {
        for modes in 1..6 {
            for cap in 0..5u32 {
                let reg = ModeRegister::new((0..modes).map(|i| format!("m{i}"))).unwrap();
                let basis = FockBasis::new(reg, cap);
                assert_eq!(
                    basis.dim() as u64,
                    binomial(cap as u64 + modes as u64, modes as u64)
                );
            }
        }
    }

    #[test]
    fn ordering_groups_by_total() {
        let reg = ModeRegister::new(["a", "b"]).unwrap();
        let basis = FockBasis::new(reg, 2);
        let got: Vec<Vec<u8>> = basis
            .states()
            .iter()
            .map(|s| s.occupations().to_vec())
            .collect();
        assert_eq!(
            got,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }
}
