use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::unitary::TransformCache;
use super::{DensityOperator, FockBasis, FockBasisVector, FockError, ModeRegister, ModeUnitary};

/// Amplitudes below this magnitude are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Sparse pure state on a truncated multimode Fock space.
///
/// The norm is not forced to one: heralding and truncation can leave a
/// sub-normalized vector, and `norm_sqr` is then the weight of that branch.
#[derive(Clone, Debug)]
pub struct PureState {
    register: ModeRegister,
    max_photons: u32,
    amplitudes: BTreeMap<FockBasisVector, Complex64>,
    dropped_weight: f64,
}

impl PureState {
    pub fn vacuum(register: ModeRegister, max_photons: u32) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(
            FockBasisVector::vacuum(register.len()),
            Complex64::new(1.0, 0.0),
        );
        PureState {
            register,
            max_photons,
            amplitudes,
            dropped_weight: 0.0,
        }
    }

    pub fn basis_state(
        register: ModeRegister,
        max_photons: u32,
        occupations: &[u8],
    ) -> Result<Self, FockError> {
        PureState::from_amplitudes(
            register,
            max_photons,
            [(occupations.to_vec(), Complex64::new(1.0, 0.0))],
        )
    }

    /// Builds a state from `(occupations, amplitude)` terms; repeated
    /// occupation vectors are summed.
    pub fn from_amplitudes<I>(
        register: ModeRegister,
        max_photons: u32,
        terms: I,
    ) -> Result<Self, FockError>
    where
        I: IntoIterator<Item = (Vec<u8>, Complex64)>,
    {
        let mut amplitudes: BTreeMap<FockBasisVector, Complex64> = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != register.len() {
                return Err(FockError::ShapeMismatch {
                    expected: register.len(),
                    found: occ.len(),
                });
            }
            let v = FockBasisVector::from_slice(&occ);
            if v.total() > max_photons {
                return Err(FockError::Truncation {
                    photons: v.total(),
                    max: max_photons,
                });
            }
            *amplitudes.entry(v).or_default() += amp;
        }
        let mut state = PureState {
            register,
            max_photons,
            amplitudes,
            dropped_weight: 0.0,
        };
        state.prune();
        Ok(state)
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn max_photons(&self) -> u32 {
        self.max_photons
    }

    /// Norm² discarded by truncating tensor products.
    pub fn dropped_weight(&self) -> f64 {
        self.dropped_weight
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockBasisVector, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, occupations: &[u8]) -> Complex64 {
        self.amplitudes
            .get(&FockBasisVector::from_slice(occupations))
            .copied()
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self, FockError> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(FockError::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.amplitudes.values_mut() {
            *a *= factor;
        }
        out.prune();
        out
    }

    /// Probability of finding exactly `n` photons in `mode`.
    pub fn photon_number_probability(&self, mode: &str, n: u8) -> Result<f64, FockError> {
        let m = self.register.index_of(mode)?;
        Ok(self
            .amplitudes
            .iter()
            .filter(|(v, _)| v.get(m) == n)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Tensor product on the concatenated register. The truncation of the
    /// result is the sum of both truncations, so nothing is dropped.
    pub fn tensor(&self, other: &PureState) -> Result<Self, FockError> {
        self.tensor_within(other, self.max_photons + other.max_photons)
    }

    /// Tensor product truncated at `max_photons`; the norm² of every dropped
    /// basis pair is accumulated in `dropped_weight`.
    pub fn tensor_within(&self, other: &PureState, max_photons: u32) -> Result<Self, FockError> {
        let register = self.register.concat(&other.register)?;
        let mut amplitudes = BTreeMap::new();
        let mut dropped = self.dropped_weight + other.dropped_weight;
        for (va, a) in &self.amplitudes {
            for (vb, b) in &other.amplitudes {
                let amp = a * b;
                if va.total() + vb.total() > max_photons {
                    dropped += amp.norm_sqr();
                    continue;
                }
                amplitudes.insert(va.concat(vb), amp);
            }
        }
        let mut out = PureState {
            register,
            max_photons,
            amplitudes,
            dropped_weight: dropped,
        };
        out.prune();
        Ok(out)
    }

    pub fn apply_unitary(&self, op: &ModeUnitary) -> Result<Self, FockError> {
        let positions = self.register.indices_of(op.modes())?;
        let mut cache = TransformCache::new(op);
        let mut out: BTreeMap<FockBasisVector, Complex64> = BTreeMap::new();
        for (occ, amp) in &self.amplitudes {
            let local = occ.select(&positions);
            if local.total() == 0 {
                *out.entry(occ.clone()).or_default() += amp;
                continue;
            }
            for (img, c) in cache.image(&local) {
                let mut v = occ.clone();
                for (k, &p) in positions.iter().enumerate() {
                    v.set(p, img.get(k));
                }
                *out.entry(v).or_default() += amp * c;
            }
        }
        let mut state = PureState {
            register: self.register.clone(),
            max_photons: self.max_photons,
            amplitudes: out,
            dropped_weight: self.dropped_weight,
        };
        state.prune();
        Ok(state)
    }

    pub fn with_vacuum_mode(&self, label: &str) -> Result<Self, FockError> {
        let register = self.register.with_mode(label)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(v, a)| {
                let mut v = v.clone();
                v.push(0);
                (v, *a)
            })
            .collect();
        Ok(PureState {
            register,
            max_photons: self.max_photons,
            amplitudes,
            dropped_weight: self.dropped_weight,
        })
    }

    pub fn relabel(&self, old: &str, new: &str) -> Result<Self, FockError> {
        Ok(PureState {
            register: self.register.renamed(old, new)?,
            ..self.clone()
        })
    }

    /// `⟨self|other⟩`; registers must match.
    pub fn inner(&self, other: &PureState) -> Result<Complex64, FockError> {
        if self.register != other.register {
            return Err(FockError::RegisterMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .filter_map(|(v, a)| other.amplitudes.get(v).map(|b| a.conj() * b))
            .sum())
    }

    /// Rescales each amplitude by `f(occupations)`; used for diagonal
    /// operators such as `√E` of a photon-counting POVM element.
    pub fn map_diagonal<F>(&self, f: F) -> Self
    where
        F: Fn(&FockBasisVector) -> f64,
    {
        let mut out = self.clone();
        for (v, a) in out.amplitudes.iter_mut() {
            *a *= f(v);
        }
        out.prune();
        out
    }

    /// Reduced density operator on `keep` (ordered as in this register),
    /// tracing out every other mode. The dense basis keeps this state's
    /// truncation.
    pub fn reduced_density<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator, FockError> {
        let reduced = self.register.subset(keep)?;
        let kept = self.register.indices_of(reduced.labels())?;
        let traced: Vec<usize> = (0..self.register.len())
            .filter(|i| !kept.contains(i))
            .collect();
        let basis = FockBasis::new(reduced, self.max_photons);
        let mut groups: BTreeMap<FockBasisVector, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (v, a) in &self.amplitudes {
            let k = basis.checked_index(&v.select(&kept))?;
            groups.entry(v.select(&traced)).or_default().push((k, *a));
        }
        let d = basis.dim();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for members in groups.values() {
            for &(i, ai) in members {
                for &(j, aj) in members {
                    m[(i, j)] += ai * aj.conj();
                }
            }
        }
        Ok(DensityOperator::from_matrix(basis, m)?.with_dropped_weight(self.dropped_weight))
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tensor_of_basis_states() {
        let e = PureState::basis_state(ModeRegister::new(["e"]).unwrap(), 1, &[1]).unwrap();
        let f = PureState::vacuum(ModeRegister::new(["f"]).unwrap(), 1);
        let ef = e.tensor(&f).unwrap();
        assert_eq!(ef.len(), 1);
        assert!((ef.amplitude(&[1, 0]) - c(1.0)).norm() < 1e-15);
        assert!((ef.norm_sqr() - 1.0).abs() < 1e-15);

        let vv = PureState::vacuum(ModeRegister::new(["a"]).unwrap(), 2)
            .tensor(&PureState::vacuum(ModeRegister::new(["b"]).unwrap(), 2))
            .unwrap();
        assert!((vv.amplitude(&[0, 0]) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn tensor_of_superpositions_is_uniform() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = |l: &str| {
            PureState::from_amplitudes(
                ModeRegister::new([l]).unwrap(),
                1,
                [(vec![0], c(s)), (vec![1], c(s))],
            )
            .unwrap()
        };
        let joint = plus("a").tensor(&plus("b")).unwrap();
        assert_eq!(joint.len(), 4);
        for (_, a) in joint.iter() {
            assert!((a - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn truncated_tensor_flags_dropped_weight() {
        let one =
            |l: &str| PureState::basis_state(ModeRegister::new([l]).unwrap(), 1, &[1]).unwrap();
        let t = one("a").tensor_within(&one("b"), 1).unwrap();
        assert!(t.is_empty());
        assert!((t.dropped_weight() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduced_density_of_bell_pair_is_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::from_amplitudes(
            ModeRegister::new(["a", "b"]).unwrap(),
            1,
            [(vec![0, 1], c(s)), (vec![1, 0], c(s))],
        )
        .unwrap();
        let rho = bell.reduced_density(&["a"]).unwrap();
        assert!((rho.element(&[0], &[0]).unwrap() - c(0.5)).norm() < 1e-15);
        assert!((rho.element(&[1], &[1]).unwrap() - c(0.5)).norm() < 1e-15);
        assert!(rho.element(&[0], &[1]).unwrap().norm() < 1e-15);
        let full = bell.reduced_density(&["a", "b"]).unwrap();
        assert!((full.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn label_collision_is_an_error() {
        let a = PureState::vacuum(ModeRegister::new(["a"]).unwrap(), 1);
        assert!(matches!(a.tensor(&a), Err(FockError::DuplicateMode(_))));
    }

    #[test]
    fn unitary_on_absent_mode_is_an_error() {
        let a = PureState::vacuum(ModeRegister::new(["a"]).unwrap(), 1);
        assert!(matches!(
            a.apply_unitary(&ModeUnitary::parity("zz")),
            Err(FockError::UnknownMode(_))
        ));
    }
}
