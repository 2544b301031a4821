//! Closed-form single-rail results: loss, ideal amplification, fidelity and
//! the biased-entanglement limit.

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{AnalyticsError, SubspaceMatrix};

/// Requested accuracy of the averaged fidelity integral.
pub const FIDELITY_QUADRATURE_TOL: f64 = 1e-12;

/// `α|0⟩ + β|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitSpec {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitSpec {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self, AnalyticsError> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(AnalyticsError::InvalidParameter(format!(
                "qubit norm² {n} differs from 1"
            )));
        }
        Ok(QubitSpec { alpha, beta })
    }

    /// Real amplitudes `(√(1−β²), β)`.
    pub fn real(beta: f64) -> Result<Self, AnalyticsError> {
        if !(-1.0..=1.0).contains(&beta) {
            return Err(AnalyticsError::InvalidParameter(format!(
                "|β| = {beta} exceeds 1"
            )));
        }
        QubitSpec::new(
            Complex64::new((1.0 - beta * beta).sqrt(), 0.0),
            Complex64::new(beta, 0.0),
        )
    }
}

fn check_t(t: f64) -> Result<(), AnalyticsError> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(AnalyticsError::InvalidParameter(format!(
            "transmission {t} outside [0, 1]"
        )))
    }
}

fn check_gain(g: f64) -> Result<(), AnalyticsError> {
    if g.is_finite() && g > 0.0 {
        Ok(())
    } else {
        Err(AnalyticsError::InvalidParameter(format!(
            "gain {g} must be positive"
        )))
    }
}

/// `|β|²(1−T)|0⟩⟨0| + (α|0⟩ + g√T β|1⟩)(h.c.)`, unnormalized, in the
/// `{|0⟩, |1⟩}` basis.
fn damped(q: &QubitSpec, t: f64, g: f64) -> Matrix2<Complex64> {
    let b = q.beta * (g * t.sqrt());
    let a = q.alpha;
    Matrix2::new(
        a * a.conj() + q.beta.norm_sqr() * (1.0 - t),
        a * b.conj(),
        b * a.conj(),
        b * b.conj(),
    )
}

/// State of a single-rail qubit after a channel of transmission `t`.
pub fn loss_output(q: &QubitSpec, t: f64) -> Result<Matrix2<Complex64>, AnalyticsError> {
    check_t(t)?;
    Ok(damped(q, t, 1.0))
}

/// Heralded amplification by gain `g` after loss `t`: the normalized state
/// and the success probability `(1 + T|β|²(g²−1))/(1 + g²)` of ideal
/// scissors with `η = 1/(1+g²)`.
pub fn ha_output(
    q: &QubitSpec,
    t: f64,
    g: f64,
) -> Result<(Matrix2<Complex64>, f64), AnalyticsError> {
    check_t(t)?;
    check_gain(g)?;
    let norm = 1.0 + t * q.beta.norm_sqr() * (g * g - 1.0);
    let m = damped(q, t, g) / Complex64::new(norm, 0.0);
    Ok((m, norm / (1.0 + g * g)))
}

/// Overlap of the amplified state with the input for a real qubit of
/// one-photon weight `b = |β|²`.
pub fn fidelity_after_ha(b: f64, t: f64, g: f64) -> Result<f64, AnalyticsError> {
    check_t(t)?;
    check_gain(g)?;
    if !(0.0..=1.0).contains(&b) {
        return Err(AnalyticsError::InvalidParameter(format!(
            "|β|² = {b} outside [0, 1]"
        )));
    }
    let num = b * (1.0 - t) * (1.0 - b) + (1.0 - b + g * t.sqrt() * b).powi(2);
    Ok(num / (1.0 + t * b * (g * g - 1.0)))
}

/// Fidelity averaged uniformly over `|β|² ∈ [0, 1]`, with the quadrature
/// error estimate.
pub fn average_fidelity_with_error(t: f64, g: f64) -> Result<(f64, f64), AnalyticsError> {
    check_t(t)?;
    check_gain(g)?;
    let f = |b: f64| fidelity_after_ha(b.clamp(0.0, 1.0), t, g).expect("checked arguments");
    let out = quadrature::integrate(f, 0.0, 1.0, FIDELITY_QUADRATURE_TOL);
    Ok((out.integral, out.error_estimate))
}

pub fn average_fidelity(t: f64, g: f64) -> Result<f64, AnalyticsError> {
    average_fidelity_with_error(t, g).map(|(v, _)| v)
}

/// Gain in `[1, g_max]` maximizing the averaged fidelity: a logarithmic
/// scan followed by golden-section refinement around the best grid point.
pub fn optimal_gain(t: f64, g_max: f64) -> Result<(f64, f64), AnalyticsError> {
    check_t(t)?;
    if !(g_max >= 1.0 && g_max.is_finite()) {
        return Err(AnalyticsError::InvalidParameter(format!(
            "g_max {g_max} below 1"
        )));
    }
    let f = |g: f64| average_fidelity(t, g).expect("checked arguments");
    const STEPS: usize = 200;
    let grid: Vec<f64> = (0..=STEPS)
        .map(|k| g_max.powf(k as f64 / STEPS as f64))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&g| f(g)).collect();
    let best = (0..=STEPS)
        .max_by(|&i, &j| values[i].total_cmp(&values[j]))
        .expect("non-empty grid");
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(STEPS)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-9 * hi {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let candidates = [(grid[best], values[best]), (x1, f1), (x2, f2)];
    let (g, v) = candidates
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three candidates");
    Ok((g, v))
}

/// Two-mode state left by sending the `ε` arm of
/// `√ε|01⟩ + √(1−ε)|10⟩` through transmission `t` and amplifying with the
/// gain that satisfies `g√(εT) = √(1−ε)`.
pub fn biased_output(epsilon: f64, t: f64) -> Result<SubspaceMatrix, AnalyticsError> {
    check_t(t)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(AnalyticsError::InvalidParameter(format!(
            "ε = {epsilon} outside (0, 1)"
        )));
    }
    let n = 2.0 * (1.0 - epsilon) + (1.0 - t) * epsilon;
    let c = (1.0 - epsilon) / n;
    SubspaceMatrix::new(epsilon * (1.0 - t) / n, c, c, 0.0, Complex64::new(c, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_examples() {
        let q = QubitSpec::real(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let m = loss_output(&q, 0.5).unwrap();
        assert!((m[(1, 1)].re - 0.25).abs() < 1e-15);
        let pure = loss_output(&q, 1.0).unwrap();
        assert!((pure[(0, 1)].re - 0.5).abs() < 1e-15);
        let vac = QubitSpec::real(0.0).unwrap();
        let m = loss_output(&vac, 0.3).unwrap();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-15 && m[(1, 1)].norm() == 0.0);
    }

    #[test]
    fn amplified_one_photon_population() {
        let q = QubitSpec::real(1.0).unwrap();
        for (t, g) in [(0.1, 2.0), (0.5, 5.0), (0.9, 1.0)] {
            let (m, _) = ha_output(&q, t, g).unwrap();
            let want = g * g * t / (1.0 + t * (g * g - 1.0));
            assert!((m[(1, 1)].re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn fidelity_examples() {
        assert!((fidelity_after_ha(0.3, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        for (t, g) in [(0.1, 1.0), (0.5, 3.0)] {
            assert!((fidelity_after_ha(0.0, t, g).unwrap() - 1.0).abs() < 1e-15);
        }
        // b = 1/2, T = 1/2, g = 2: [1/8 + (1/2 + 1/√2)²] / (1 + 3/4)
        let want = (0.125 + (0.5 + std::f64::consts::FRAC_1_SQRT_2).powi(2)) / 1.75;
        assert!((fidelity_after_ha(0.5, 0.5, 2.0).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn biased_output_rejects_bad_arguments() {
        assert!(biased_output(0.0, 0.5).is_err());
        assert!(biased_output(0.5, 1.5).is_err());
    }
}
