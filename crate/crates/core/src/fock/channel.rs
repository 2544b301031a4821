use nalgebra::DMatrix;

/// One Kraus operator on a single mode, stored as `|to⟩⟨from|` entries.
#[derive(Clone, Debug, Default)]
pub struct SingleModeOperator {
    entries: Vec<(u8, u8, f64)>,
}

impl SingleModeOperator {
    pub fn new(entries: Vec<(u8, u8, f64)>) -> Self {
        SingleModeOperator { entries }
    }

    /// `(from, to, coefficient)` triples.
    pub fn entries(&self) -> &[(u8, u8, f64)] {
        &self.entries
    }

    pub fn to_matrix(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for &(from, to, c) in &self.entries {
            if (from as usize) < dim && (to as usize) < dim {
                m[(to as usize, from as usize)] += c;
            }
        }
        m
    }
}

/// Completely positive map on one mode, given by Kraus operators that never
/// raise photon number.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    mode: String,
    operators: Vec<SingleModeOperator>,
}

impl KrausChannel {
    pub fn new(mode: &str, operators: Vec<SingleModeOperator>) -> Self {
        KrausChannel {
            mode: mode.to_string(),
            operators,
        }
    }

    pub fn mode(&self) -> &str {
        &self.mode
    }

    pub fn operators(&self) -> &[SingleModeOperator] {
        &self.operators
    }

    /// `Σ_k K_k† K_k` on the first `dim` Fock levels.
    pub fn completeness(&self, dim: usize) -> DMatrix<f64> {
        self.operators
            .iter()
            .map(|k| {
                let m = k.to_matrix(dim);
                m.transpose() * m
            })
            .fold(DMatrix::zeros(dim, dim), |acc, m| acc + m)
    }
}

impl KrausChannel {
    /// Pure loss with transmission `t`:
    /// `K_k = Σ_n √C(n,k) √((1−t)^k t^(n−k)) |n−k⟩⟨n|` for `n ≤ max_photons`.
    pub fn loss(mode: &str, t: f64, max_photons: u32) -> Self {
        let r = 1.0 - t;
        let ops = (0..=max_photons)
            .map(|k| {
                let entries = (k..=max_photons)
                    .map(|n| {
                        let c = binomial(n, k) * r.powi(k as i32) * t.powi((n - k) as i32);
                        (n as u8, (n - k) as u8, c.sqrt())
                    })
                    .filter(|e| e.2 != 0.0)
                    .collect();
                SingleModeOperator::new(entries)
            })
            .collect();
        KrausChannel::new(mode, ops)
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n + 1 - i) as f64 / i as f64)
}
