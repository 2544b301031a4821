//! Optical components as passive unitaries and channels on Fock states.
//!
//! Polarization is carried by pairs of ordinary modes (one for H, one for
//! V), so wave plates and polarizing beam splitters are two- and four-mode
//! unitaries like any other.

use std::f64::consts::FRAC_PI_8;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{
    fresh_label, FockError, KrausChannel, ModeRegister, ModeUnitary, OpticalState, PureState,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mode `{0}` used for two ports")]
    ModeCollision(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Lossy channel. Transmission and loss are stored side by side so that
/// `loss + transmission == 1` holds for whichever one was specified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    transmission: f64,
    loss: f64,
}

impl ChannelSpec {
    pub fn new(transmission: f64) -> Result<Self, OpticsError> {
        check_unit("transmission", transmission)?;
        Ok(ChannelSpec {
            transmission,
            loss: 1.0 - transmission,
        })
    }

    pub fn from_loss(loss: f64) -> Result<Self, OpticsError> {
        check_unit("loss", loss)?;
        Ok(ChannelSpec {
            transmission: 1.0 - loss,
            loss,
        })
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }
}

/// Largest pair probability accepted by [`SourceSpec`]; above it the
/// truncated pair expansion is no longer a small correction.
pub const MAX_PAIR_PROBABILITY: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub pair_probability: f64,
    pub signal: String,
    pub idler: String,
    /// Overlap with photons from another source, in `[0, 1]`.
    pub indistinguishability: f64,
}

impl SourceSpec {
    pub fn new(pair_probability: f64, signal: &str, idler: &str) -> Result<Self, OpticsError> {
        let spec = SourceSpec {
            pair_probability,
            signal: signal.to_string(),
            idler: idler.to_string(),
            indistinguishability: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), OpticsError> {
        if !(0.0..MAX_PAIR_PROBABILITY).contains(&self.pair_probability) {
            return Err(OpticsError::InvalidParameter(format!(
                "pair probability {} outside [0, {MAX_PAIR_PROBABILITY})",
                self.pair_probability
            )));
        }
        check_unit("indistinguishability", self.indistinguishability)?;
        if self.signal == self.idler {
            return Err(OpticsError::ModeCollision(self.signal.clone()));
        }
        Ok(())
    }
}

fn check_unit(what: &str, x: f64) -> Result<(), OpticsError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(OpticsError::InvalidParameter(format!(
            "{what} {x} outside [0, 1]"
        )))
    }
}

fn real2(modes: [&str; 2], m: [[f64; 2]; 2]) -> Result<ModeUnitary, OpticsError> {
    if modes[0] == modes[1] {
        return Err(OpticsError::ModeCollision(modes[0].to_string()));
    }
    Ok(ModeUnitary::from_real(modes.to_vec(), &[&m[0], &m[1]])?)
}

/// `a†_i → √T a†_i + √(1−T) a†_j`, `a†_j → √(1−T) a†_i − √T a†_j`.
pub fn beam_splitter(t: f64, i: &str, j: &str) -> Result<ModeUnitary, OpticsError> {
    check_unit("beam-splitter transmission", t)?;
    let (s, r) = (t.sqrt(), (1.0 - t).sqrt());
    real2([i, j], [[s, r], [r, -s]])
}

/// Half-wave plate with its optic axis at `theta` from horizontal.
pub fn half_wave_plate(theta: f64, h: &str, v: &str) -> Result<ModeUnitary, OpticsError> {
    let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    real2([h, v], [[c, s], [s, -c]])
}

/// Quarter-wave plate with its fast axis at `theta`; retards V by `i` at
/// `theta = 0`.
pub fn quarter_wave_plate(theta: f64, h: &str, v: &str) -> Result<ModeUnitary, OpticsError> {
    if h == v {
        return Err(OpticsError::ModeCollision(h.to_string()));
    }
    let (c, s) = (theta.cos(), theta.sin());
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let off = (one - i) * s * c;
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[one * c * c + i * s * s, off, off, one * s * s + i * c * c],
    );
    Ok(ModeUnitary::new(vec![h, v], m)?)
}

/// Polarizing beam splitter: H is transmitted from `h_in` to `h_out`, V is
/// reflected from `v_in` to `v_out`. The reflection carries phase `+1`.
pub fn pbs(h_in: &str, v_in: &str, h_out: &str, v_out: &str) -> Result<ModeUnitary, OpticsError> {
    for (a, b) in [(h_in, v_in), (h_out, v_out), (h_in, v_out), (v_in, h_out)] {
        if a == b {
            return Err(OpticsError::ModeCollision(a.to_string()));
        }
    }
    let mut modes: Vec<&str> = Vec::new();
    for m in [h_in, v_in, h_out, v_out] {
        if !modes.contains(&m) {
            modes.push(m);
        }
    }
    let k = modes.len();
    let pos = |m: &str| modes.iter().position(|x| *x == m).expect("listed mode");
    let mut perm: Vec<usize> = (0..k).collect();
    perm[pos(h_in)] = pos(h_out);
    perm[pos(h_out)] = pos(h_in);
    perm[pos(v_in)] = pos(v_out);
    perm[pos(v_out)] = pos(v_in);
    let mut m = DMatrix::<Complex64>::zeros(k, k);
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = Complex64::new(1.0, 0.0);
    }
    Ok(ModeUnitary::new(modes, m)?)
}

/// Loss on one mode as a Kraus channel acting up to `max_photons`.
pub fn loss_channel(spec: &ChannelSpec, mode: &str, max_photons: u32) -> KrausChannel {
    KrausChannel::loss(mode, spec.transmission(), max_photons)
}

/// Two-mode squeezed vacuum `∝ Σ_n p^{n/2} |n, n⟩` holding at most
/// `max_photons` photons in total.
pub fn spdc_state(spec: &SourceSpec, max_photons: u32) -> Result<PureState, OpticsError> {
    spec.validate()?;
    if max_photons < 4 {
        return Err(OpticsError::InvalidParameter(format!(
            "truncation {max_photons} cannot hold two photon pairs"
        )));
    }
    spdc_pairs(spec, max_photons / 2)
}

/// Same expansion truncated at an explicit number of pairs (any value,
/// including single-pair sources used in cross-checks).
pub fn spdc_pairs(spec: &SourceSpec, max_pairs: u32) -> Result<PureState, OpticsError> {
    spec.validate()?;
    let register = ModeRegister::new([spec.signal.as_str(), spec.idler.as_str()])?;
    let lambda = spec.pair_probability.sqrt();
    let terms: Vec<(Vec<u8>, Complex64)> = (0..=max_pairs)
        .map(|n| {
            (
                vec![n as u8, n as u8],
                Complex64::new(lambda.powi(n as i32), 0.0),
            )
        })
        .collect();
    Ok(PureState::from_amplitudes(register, 2 * max_pairs, terms)?.normalized()?)
}

/// Splits every photon in `photon_mode` across `(h_label, v_label)` with a
/// half-wave plate at π/8 followed by a polarizing beam splitter. A single
/// photon becomes `(|1,0⟩ + |0,1⟩)/√2`.
pub fn prepare_path_entangled<S: OpticalState>(
    state: &S,
    photon_mode: &str,
    h_label: &str,
    v_label: &str,
) -> Result<S, OpticsError> {
    if h_label == v_label {
        return Err(OpticsError::ModeCollision(h_label.to_string()));
    }
    let v_in = fresh_label(state.register(), &format!("{photon_mode}/V"));
    let rotated = state
        .with_vacuum_mode(&v_in)?
        .apply_unitary(&half_wave_plate(FRAC_PI_8, photon_mode, &v_in)?)?;
    // The PBS sends H to `h_label` and V to `v_label`; with both outputs
    // on fresh modes this is a relabeling of its input ports.
    let routed = if photon_mode == h_label {
        rotated
    } else {
        rotated.relabel(photon_mode, h_label)?
    };
    Ok(routed.relabel(&v_in, v_label)?)
}

/// Ideal single-photon path entanglement `(|1_h 0_v⟩ + |0_h 1_v⟩)/√2`.
pub fn path_entangled_state(h_label: &str, v_label: &str) -> Result<PureState, OpticsError> {
    let photon = PureState::basis_state(ModeRegister::new([h_label])?, 1, &[1])?;
    prepare_path_entangled(&photon, h_label, h_label, v_label)
}

/// Bias set by a half-wave plate at `theta` in the resource preparation.
pub fn eta_from_hwp_angle(theta: f64) -> f64 {
    (2.0 * theta).sin()
}

/// `√η |1_a 0_v⟩ + √(1−η) |0_a 1_v⟩`.
pub fn resource_state(eta: f64, a: &str, v: &str) -> Result<PureState, OpticsError> {
    check_unit("resource bias", eta)?;
    let photon = PureState::basis_state(ModeRegister::new([a])?, 1, &[1])?.with_vacuum_mode(v)?;
    Ok(photon.apply_unitary(&beam_splitter(eta, a, v)?)?)
}

/// Moves amplitude `√(1−ξ)` of every photon in `mode` into a new unmatched
/// sub-mode, which is returned alongside the state. Unmatched photons only
/// meet other unmatched sub-modes at later beam splitters.
pub fn distinguishability_split<S: OpticalState>(
    state: &S,
    mode: &str,
    xi: f64,
) -> Result<(S, String), OpticsError> {
    check_unit("indistinguishability", xi)?;
    state.register().index_of(mode)?;
    let unmatched = fresh_label(state.register(), &format!("{mode}~"));
    let extended = state.with_vacuum_mode(&unmatched)?;
    if xi == 1.0 {
        return Ok((extended, unmatched));
    }
    let split = extended.apply_unitary(&beam_splitter(xi, mode, &unmatched)?)?;
    Ok((split, unmatched))
}
