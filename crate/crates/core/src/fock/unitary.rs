use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FockBasisVector, FockError};

const UNITARITY_TOL: f64 = 1e-10;

/// Passive linear-optical transformation on a subset of modes.
///
/// Column `j` of `matrix` is the image of the creation operator of
/// `modes[j]`: `a†_j ↦ Σ_i matrix[(i, j)] a†_i`. Such maps conserve total
/// photon number, so they never push amplitude past a truncation.
#[derive(Clone, Debug)]
pub struct ModeUnitary {
    modes: Vec<String>,
    matrix: DMatrix<Complex64>,
}

/// Image of one occupation pattern: output patterns with amplitudes.
pub type FockImage = Vec<(FockBasisVector, Complex64)>;

impl ModeUnitary {
    pub fn new<S: Into<String>>(
        modes: Vec<S>,
        matrix: DMatrix<Complex64>,
    ) -> Result<Self, FockError> {
        let modes: Vec<String> = modes.into_iter().map(Into::into).collect();
        let k = modes.len();
        if matrix.nrows() != k || matrix.ncols() != k {
            return Err(FockError::ShapeMismatch {
                expected: k,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(FockError::DuplicateMode(m.clone()));
            }
        }
        let defect = (matrix.adjoint() * &matrix - DMatrix::identity(k, k))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > UNITARITY_TOL {
            return Err(FockError::NotUnitary(defect));
        }
        Ok(ModeUnitary { modes, matrix })
    }

    pub fn from_real<S: Into<String>>(modes: Vec<S>, rows: &[&[f64]]) -> Result<Self, FockError> {
        let k = rows.len();
        let matrix = DMatrix::from_fn(k, k, |i, j| Complex64::new(rows[i][j], 0.0));
        ModeUnitary::new(modes, matrix)
    }

    /// `a† ↦ e^{iφ} a†` on a single mode.
    pub fn phase(mode: &str, phi: f64) -> Self {
        ModeUnitary {
            modes: vec![mode.to_string()],
            matrix: DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi)),
        }
    }

    /// Photon-number parity `(-1)^n` on one mode.
    pub fn parity(mode: &str) -> Self {
        ModeUnitary {
            modes: vec![mode.to_string()],
            matrix: DMatrix::from_element(1, 1, Complex64::new(-1.0, 0.0)),
        }
    }

    pub fn modes(&self) -> &[String] {
        &self.modes
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        ModeUnitary {
            modes: self.modes.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Expands `Π_j (a†_j)^{n_j} / √(n_j!) |0⟩` under the mode map.
    pub fn transform(&self, input: &[u8]) -> FockImage {
        let k = self.modes.len();
        let mut poly: HashMap<FockBasisVector, Complex64> = HashMap::new();
        poly.insert(FockBasisVector::vacuum(k), Complex64::new(1.0, 0.0));
        for (j, &n) in input.iter().enumerate() {
            for _ in 0..n {
                let mut next: HashMap<FockBasisVector, Complex64> =
                    HashMap::with_capacity(poly.len() * k);
                for (mono, c) in &poly {
                    for i in 0..k {
                        let u = self.matrix[(i, j)];
                        if u.norm_sqr() == 0.0 {
                            continue;
                        }
                        let mut m = mono.clone();
                        m.set(i, m.get(i) + 1);
                        *next.entry(m).or_default() += c * u;
                    }
                }
                poly = next;
            }
        }
        let norm_in: f64 = input.iter().map(|&n| factorial(n)).product::<f64>().sqrt();
        let mut out: FockImage = poly
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-15)
            .map(|(m, c)| {
                let norm_out: f64 = m.occupations().iter().map(|&n| factorial(n)).product();
                let amp = c * norm_out.sqrt() / norm_in;
                (m, amp)
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

pub(crate) fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

/// Per-call cache of `ModeUnitary::transform` results.
pub(crate) struct TransformCache<'a> {
    op: &'a ModeUnitary,
    cache: HashMap<FockBasisVector, FockImage>,
}

impl<'a> TransformCache<'a> {
    pub(crate) fn new(op: &'a ModeUnitary) -> Self {
        TransformCache {
            op,
            cache: HashMap::new(),
        }
    }

    pub(crate) fn image(&mut self, local: &FockBasisVector) -> &FockImage {
        let op = self.op;
        self.cache
            .entry(local.clone())
            .or_insert_with(|| op.transform(local.occupations()))
    }
}
