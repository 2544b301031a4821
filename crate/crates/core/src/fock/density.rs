use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::unitary::TransformCache;
use super::{
    FockBasis, FockBasisVector, FockError, KrausChannel, ModeRegister, ModeUnitary, PureState,
};

/// Dense density operator over an enumerated truncated basis.
///
/// Operators are allowed to be sub-normalized: after a projection the trace
/// is the probability of the recorded outcome and is carried along rather
/// than divided out.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    basis: Arc<FockBasis>,
    matrix: DMatrix<Complex64>,
    dropped_weight: f64,
}

/// Diagonal POVM element on a group of modes. Its value depends only on the
/// total photon number found in the group, which covers detectors with
/// internal sub-modes.
#[derive(Clone, Debug)]
pub struct PovmElement {
    modes: Vec<String>,
    weights: Vec<f64>,
}

impl PovmElement {
    pub fn new<S: Into<String>>(modes: Vec<S>, weights: Vec<f64>) -> Result<Self, FockError> {
        for &w in &weights {
            if !(-1e-12..=1.0 + 1e-12).contains(&w) || !w.is_finite() {
                return Err(FockError::InvalidPovm(w));
            }
        }
        Ok(PovmElement {
            modes: modes.into_iter().map(Into::into).collect(),
            weights,
        })
    }

    pub fn from_fn<S, F>(modes: Vec<S>, max_photons: u32, f: F) -> Result<Self, FockError>
    where
        S: Into<String>,
        F: Fn(u32) -> f64,
    {
        PovmElement::new(modes, (0..=max_photons).map(f).collect())
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn weight(&self, photons: u32) -> Option<f64> {
        self.weights.get(photons as usize).copied()
    }

    pub fn max_photons(&self) -> u32 {
        self.weights.len() as u32 - 1
    }
}

impl DensityOperator {
    pub fn zeros(basis: Arc<FockBasis>) -> Self {
        let d = basis.dim();
        DensityOperator {
            basis,
            matrix: DMatrix::zeros(d, d),
            dropped_weight: 0.0,
        }
    }

    pub fn from_pure(state: &PureState) -> Self {
        let basis = FockBasis::new(state.register().clone(), state.max_photons());
        let d = basis.dim();
        let mut vec = nalgebra::DVector::<Complex64>::zeros(d);
        for (v, a) in state.iter() {
            // Every stored amplitude respects the state's truncation.
            let i = basis.index_of(v).expect("amplitude outside truncation");
            vec[i] = *a;
        }
        DensityOperator {
            basis,
            matrix: &vec * vec.adjoint(),
            dropped_weight: state.dropped_weight(),
        }
    }

    pub fn from_matrix(
        basis: Arc<FockBasis>,
        matrix: DMatrix<Complex64>,
    ) -> Result<Self, FockError> {
        if matrix.nrows() != basis.dim() || matrix.ncols() != basis.dim() {
            return Err(FockError::ShapeMismatch {
                expected: basis.dim(),
                found: matrix.nrows(),
            });
        }
        Ok(DensityOperator {
            basis,
            matrix,
            dropped_weight: 0.0,
        })
    }

    pub(crate) fn with_dropped_weight(mut self, dropped: f64) -> Self {
        self.dropped_weight = dropped;
        self
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn register(&self) -> &ModeRegister {
        self.basis.register()
    }

    pub fn max_photons(&self) -> u32 {
        self.basis.max_photons()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn dropped_weight(&self) -> f64 {
        self.dropped_weight
    }

    /// Real part of the trace; the probability weight of this operator.
    pub fn trace_weight(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn element(&self, row: &[u8], col: &[u8]) -> Result<Complex64, FockError> {
        let i = self
            .basis
            .checked_index(&FockBasisVector::from_slice(row))?;
        let j = self
            .basis
            .checked_index(&FockBasisVector::from_slice(col))?;
        Ok(self.matrix[(i, j)])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DensityOperator {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            ..self.clone()
        }
    }

    pub fn normalized(&self) -> Result<Self, FockError> {
        let t = self.trace_weight();
        if t <= 0.0 {
            return Err(FockError::ZeroNorm);
        }
        Ok(self.scaled(1.0 / t))
    }

    /// Entrywise sum; both operators must share register and truncation.
    pub fn add(&self, other: &DensityOperator) -> Result<Self, FockError> {
        self.check_same_space(other)?;
        Ok(DensityOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix + &other.matrix,
            dropped_weight: self.dropped_weight + other.dropped_weight,
        })
    }

    /// Largest entrywise difference magnitude.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> Result<f64, FockError> {
        self.check_same_space(other)?;
        Ok((&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    fn check_same_space(&self, other: &DensityOperator) -> Result<(), FockError> {
        if self.register() != other.register() || self.max_photons() != other.max_photons() {
            return Err(FockError::RegisterMismatch);
        }
        Ok(())
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self, FockError> {
        self.tensor_within(other, self.max_photons() + other.max_photons())
    }

    /// Tensor product truncated at `max_photons`; the product-state weight
    /// falling outside is recorded in `dropped_weight`.
    pub fn tensor_within(
        &self,
        other: &DensityOperator,
        max_photons: u32,
    ) -> Result<Self, FockError> {
        let register = self.register().concat(other.register())?;
        let basis = FockBasis::new(register, max_photons);
        let mut out = DensityOperator::zeros(basis.clone());
        out.dropped_weight = self.dropped_weight + other.dropped_weight;
        let map: Vec<Vec<Option<usize>>> = self
            .basis
            .states()
            .iter()
            .map(|a| {
                other
                    .basis
                    .states()
                    .iter()
                    .map(|b| basis.index_of(&a.concat(b)))
                    .collect()
            })
            .collect();
        for i1 in 0..self.dim() {
            for i2 in 0..other.dim() {
                let Some(row) = map[i1][i2] else {
                    out.dropped_weight += (self.matrix[(i1, i1)] * other.matrix[(i2, i2)]).re;
                    continue;
                };
                for j1 in 0..self.dim() {
                    let a = self.matrix[(i1, j1)];
                    if a.norm_sqr() == 0.0 {
                        continue;
                    }
                    for j2 in 0..other.dim() {
                        if let Some(col) = map[j1][j2] {
                            out.matrix[(row, col)] = a * other.matrix[(i2, j2)];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reduced operator on `keep` (ordered as in this register).
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self, FockError> {
        let reduced_register = self.register().subset(keep)?;
        let kept: Vec<usize> = self.register().indices_of(reduced_register.labels())?;
        let traced: Vec<usize> = (0..self.register().len())
            .filter(|i| !kept.contains(i))
            .collect();
        let reduced = FockBasis::new(reduced_register, self.max_photons());
        let mut groups: BTreeMap<FockBasisVector, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, v) in self.basis.states().iter().enumerate() {
            let k = reduced
                .index_of(&v.select(&kept))
                .expect("reduced state within truncation");
            groups.entry(v.select(&traced)).or_default().push((i, k));
        }
        let mut out = DensityOperator::zeros(reduced);
        out.dropped_weight = self.dropped_weight;
        for members in groups.values() {
            for &(i, ki) in members {
                for &(j, kj) in members {
                    out.matrix[(ki, kj)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// Sparse matrix of a passive unitary on this basis: per column, the
    /// non-zero `(row, value)` entries.
    fn unitary_columns(&self, op: &ModeUnitary) -> Result<Vec<Vec<(usize, Complex64)>>, FockError> {
        let positions = self.register().indices_of(op.modes())?;
        let mut cache = TransformCache::new(op);
        let mut columns = Vec::with_capacity(self.dim());
        for (i, v) in self.basis.states().iter().enumerate() {
            let local = v.select(&positions);
            if local.total() == 0 {
                columns.push(vec![(i, Complex64::new(1.0, 0.0))]);
                continue;
            }
            let mut col = Vec::new();
            for (img, c) in cache.image(&local) {
                let mut w = v.clone();
                for (k, &p) in positions.iter().enumerate() {
                    w.set(p, img.get(k));
                }
                col.push((self.basis.checked_index(&w)?, *c));
            }
            columns.push(col);
        }
        Ok(columns)
    }

    pub fn apply_unitary(&self, op: &ModeUnitary) -> Result<Self, FockError> {
        let columns = self.unitary_columns(op)?;
        let d = self.dim();
        // U ρ
        let mut left = DMatrix::<Complex64>::zeros(d, d);
        for (i, col) in columns.iter().enumerate() {
            for &(k, c) in col {
                for j in 0..d {
                    let r = self.matrix[(i, j)];
                    if r.norm_sqr() != 0.0 {
                        left[(k, j)] += c * r;
                    }
                }
            }
        }
        // (U ρ) U†
        let mut out = DMatrix::<Complex64>::zeros(d, d);
        for (j, col) in columns.iter().enumerate() {
            for &(l, c) in col {
                let cc = c.conj();
                for k in 0..d {
                    let m = left[(k, j)];
                    if m.norm_sqr() != 0.0 {
                        out[(k, l)] += m * cc;
                    }
                }
            }
        }
        Ok(DensityOperator {
            basis: self.basis.clone(),
            matrix: out,
            dropped_weight: self.dropped_weight,
        })
    }

    pub fn apply_channel(&self, channel: &KrausChannel) -> Result<Self, FockError> {
        let m = self.register().index_of(channel.mode())?;
        let d = self.dim();
        let states = self.basis.states();
        let mut out = DMatrix::<Complex64>::zeros(d, d);
        for kraus in channel.operators() {
            // K acting on mode m: index of |to⟩ for each basis vector with
            // |from⟩ on that mode.
            let image: Vec<Option<(usize, f64)>> = states
                .iter()
                .map(|v| {
                    let n = v.get(m);
                    kraus
                        .entries()
                        .iter()
                        .find(|&&(from, _, _)| from == n)
                        .and_then(|&(_, to, c)| {
                            let mut w = v.clone();
                            w.set(m, to);
                            self.basis.index_of(&w).map(|k| (k, c))
                        })
                })
                .collect();
            for i in 0..d {
                let Some((ki, ci)) = image[i] else { continue };
                for j in 0..d {
                    let Some((kj, cj)) = image[j] else { continue };
                    let r = self.matrix[(i, j)];
                    if r.norm_sqr() != 0.0 {
                        out[(ki, kj)] += r * (ci * cj);
                    }
                }
            }
        }
        Ok(DensityOperator {
            basis: self.basis.clone(),
            matrix: out,
            dropped_weight: self.dropped_weight,
        })
    }

    /// `√E ρ √E` together with the outcome probability `Tr(E ρ)`.
    pub fn project(&self, element: &PovmElement) -> Result<(Self, f64), FockError> {
        let positions = self.register().indices_of(element.modes())?;
        let weights: Vec<f64> =
            self.basis
                .states()
                .iter()
                .map(|v| {
                    let n: u32 = positions.iter().map(|&p| v.get(p) as u32).sum();
                    element.weight(n).map(|w| w.clamp(0.0, 1.0).sqrt()).ok_or(
                        FockError::Truncation {
                            photons: n,
                            max: element.max_photons(),
                        },
                    )
                })
                .collect::<Result<_, _>>()?;
        let d = self.dim();
        let matrix = DMatrix::from_fn(d, d, |i, j| self.matrix[(i, j)] * (weights[i] * weights[j]));
        let out = DensityOperator {
            basis: self.basis.clone(),
            matrix,
            dropped_weight: self.dropped_weight,
        };
        let p = out.trace_weight();
        Ok((out, p))
    }

    pub fn with_vacuum_mode(&self, label: &str) -> Result<Self, FockError> {
        let register = self.register().with_mode(label)?;
        let basis = FockBasis::new(register, self.max_photons());
        let mut out = DensityOperator::zeros(basis.clone());
        out.dropped_weight = self.dropped_weight;
        let map: Vec<usize> = self
            .basis
            .states()
            .iter()
            .map(|v| {
                let mut w = v.clone();
                w.push(0);
                basis
                    .index_of(&w)
                    .expect("vacuum extension within truncation")
            })
            .collect();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out.matrix[(map[i], map[j])] = self.matrix[(i, j)];
            }
        }
        Ok(out)
    }

    pub fn relabel(&self, old: &str, new: &str) -> Result<Self, FockError> {
        let register = self.register().renamed(old, new)?;
        Ok(DensityOperator {
            basis: FockBasis::new(register, self.max_photons()),
            matrix: self.matrix.clone(),
            dropped_weight: self.dropped_weight,
        })
    }

    /// Copy of this operator on a wider truncation (zero padded).
    pub fn with_max_photons(&self, max_photons: u32) -> Result<Self, FockError> {
        let basis = FockBasis::new(self.register().clone(), max_photons);
        let mut out = DensityOperator::zeros(basis.clone());
        out.dropped_weight = self.dropped_weight;
        let map: Vec<Option<usize>> = self
            .basis
            .states()
            .iter()
            .map(|v| basis.index_of(v))
            .collect();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                match (map[i], map[j]) {
                    (Some(a), Some(b)) => out.matrix[(a, b)] = self.matrix[(i, j)],
                    _ if self.matrix[(i, j)].norm() > 0.0 => {
                        return Err(FockError::Truncation {
                            photons: self.basis.state(i).total().max(self.basis.state(j).total()),
                            max: max_photons,
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell(a: &str, b: &str) -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_amplitudes(
            ModeRegister::new([a, b]).unwrap(),
            1,
            [(vec![0, 1], c(s)), (vec![1, 0], c(s))],
        )
        .unwrap()
    }

    #[test]
    fn bell_reduction_is_maximally_mixed() {
        let rho = DensityOperator::from_pure(&bell("f", "e"));
        let red = rho.partial_trace(&["f"]).unwrap();
        assert!((red.element(&[0], &[0]).unwrap() - c(0.5)).norm() < 1e-12);
        assert!((red.element(&[1], &[1]).unwrap() - c(0.5)).norm() < 1e-12);
        assert!(red.element(&[0], &[1]).unwrap().norm() < 1e-12);
        assert!((red.trace_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tracing_nothing_is_identity() {
        let rho = DensityOperator::from_pure(&bell("f", "e"));
        let same = rho.partial_trace(&["f", "e"]).unwrap();
        assert!(same.max_abs_diff(&rho).unwrap() < 1e-15);
    }

    #[test]
    fn pure_state_has_unit_purity() {
        let rho = DensityOperator::from_pure(&bell("a", "b"));
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!(rho.hermiticity_defect() < 1e-15);
        assert!(rho.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn projection_probabilities() {
        let reg = ModeRegister::new(["m"]).unwrap();
        let one =
            DensityOperator::from_pure(&PureState::basis_state(reg.clone(), 2, &[1]).unwrap());
        let vac = DensityOperator::from_pure(&PureState::vacuum(reg.clone(), 2));
        let proj_one = PovmElement::new(vec!["m"], vec![0.0, 1.0, 0.0]).unwrap();
        assert!((one.project(&proj_one).unwrap().1 - 1.0).abs() < 1e-15);
        assert!(vac.project(&proj_one).unwrap().1.abs() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityOperator::from_pure(
            &PureState::from_amplitudes(reg, 2, [(vec![0], c(s)), (vec![1], c(s))]).unwrap(),
        );
        let click = PovmElement::from_fn(vec!["m"], 2, |n| if n > 0 { 1.0 } else { 0.0 }).unwrap();
        let (post, p) = plus.project(&click).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((post.trace_weight() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_povm_rejected() {
        assert!(PovmElement::new(vec!["m"], vec![1.5]).is_err());
        assert!(PovmElement::new(vec!["m"], vec![-0.1]).is_err());
    }

    #[test]
    fn project_rejects_short_element() {
        let reg = ModeRegister::new(["m"]).unwrap();
        let rho = DensityOperator::from_pure(&PureState::basis_state(reg, 2, &[2]).unwrap());
        let e = PovmElement::new(vec!["m"], vec![1.0, 0.0]).unwrap();
        assert!(rho.project(&e).is_err());
    }
}
