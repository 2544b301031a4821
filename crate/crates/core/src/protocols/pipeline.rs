use num_complex::Complex64;

use super::{
    heralded_amplifier, interfere, AmplifierSpec, DetectorPair, ExperimentConfig, ProtocolError,
};
use crate::detection::{DetectorBank, HeraldPattern, Outcome};
use crate::fock::{DensityOperator, ModeRegister, ModeUnitary, OpticalState, PureState};
use crate::optics::{beam_splitter, prepare_path_entangled, spdc_state};

/// Output of the corrected channel.
#[derive(Clone, Debug)]
pub struct PipelineResult {
    /// Normalized state of (h, v) given the full herald, after the output
    /// analysis efficiencies.
    pub rho_hv: DensityOperator,
    /// Ancilla herald and amplifier herald.
    pub p_channel_ready: f64,
    /// Ancilla herald, amplifier herald and swap herald.
    pub p_state_sent: f64,
}

/// Output of the direct channel.
#[derive(Clone, Debug)]
pub struct DirectResult {
    /// Normalized state of (f, e) given the idler herald.
    pub rho_fe: DensityOperator,
    pub p_herald: f64,
}

/// Entangled pair source: photon x is split over (f, e), photon y over
/// (h, g). Ancilla source: photon in a is split over (a, v) with bias η and
/// its partner t is sent to the herald detector.
fn sources(config: &ExperimentConfig) -> Result<PureState, ProtocolError> {
    let pairs = spdc_state(&config.entangled_source_spec()?, config.n_max)?;
    let pairs = prepare_path_entangled(&pairs, "x", "f", "e")?;
    let pairs = prepare_path_entangled(&pairs, "y", "h", "g")?;
    let ancilla = spdc_state(&config.ancilla_source_spec()?, config.n_max)?
        .with_vacuum_mode("v")?
        .apply_unitary(&beam_splitter(config.amplifier.eta, "a", "v")?)?;
    Ok(pairs.tensor(&ancilla)?)
}

fn apply_output_efficiency(
    rho: &DensityOperator,
    modes: [&str; 2],
    config: &ExperimentConfig,
) -> Result<DensityOperator, ProtocolError> {
    let [e0, e1] = config.output_efficiency.ports();
    Ok(rho.apply_loss(modes[0], e0)?.apply_loss(modes[1], e1)?)
}

/// Half of the (h, g) pair is teleported into v through the lossy channel
/// on e, the amplifier from e to v, and the swap between f and g.
pub fn corrected_channel(config: &ExperimentConfig) -> Result<PipelineResult, ProtocolError> {
    config.validate()?;
    let state = sources(config)?
        .apply_loss("e", config.channel()?.transmission())?
        .apply_loss("a", config.amplifier.resource_delivery)?;
    let (state, ha) = interfere(&state, "e", "a", config.xi_ha)?;
    let (state, es) = interfere(&state, "f", "g", config.xi_es)?;

    let [d1, d2] = config.amplifier.detectors.models()?;
    let [d3, d4] = config.swap_detectors.models()?;
    let bank = DetectorBank::new()
        .add("T", &config.herald_detector, &["t"])?
        .add("D1", &d1, &ha[0])?
        .add("D2", &d2, &ha[1])?
        .add("D3", &d3, &es[0])?
        .add("D4", &d4, &es[1])?;
    let ready = HeraldPattern::new()
        .require("T", Outcome::Click)
        .exactly_one(&["D1", "D2"]);
    let sent = ready
        .clone()
        .exactly_one(&["D3", "D4"])
        .correct_on("D2", ModeUnitary::parity("v"))
        .correct_on("D4", ModeUnitary::parity("h"));

    let p_channel_ready = bank.probability_pure(&state, &ready)?;
    let heralded = bank.herald_pure(&state, &sent, &["h", "v"])?;
    if heralded.probability <= 0.0 {
        return Err(ProtocolError::NeverHeralded);
    }
    let rho_hv = apply_output_efficiency(&heralded.state.normalized()?, ["h", "v"], config)?;
    Ok(PipelineResult {
        rho_hv,
        p_channel_ready,
        p_state_sent: heralded.probability,
    })
}

/// The (f, e) state sent straight through the lossy channel, heralded by
/// a click on the partner photon.
pub fn direct_transmission(config: &ExperimentConfig) -> Result<DirectResult, ProtocolError> {
    config.validate()?;
    let state = spdc_state(&config.entangled_source_spec()?, config.n_max)?;
    let state = prepare_path_entangled(&state, "x", "f", "e")?
        .apply_loss("e", config.channel()?.transmission())?;
    let bank = DetectorBank::new().add("T", &config.herald_detector, &["y"])?;
    let pattern = HeraldPattern::new().require("T", Outcome::Click);
    let heralded = bank.herald_pure(&state, &pattern, &["f", "e"])?;
    if heralded.probability <= 0.0 {
        return Err(ProtocolError::NeverHeralded);
    }
    let rho_fe = apply_output_efficiency(&heralded.state.normalized()?, ["f", "e"], config)?;
    Ok(DirectResult {
        rho_fe,
        p_herald: heralded.probability,
    })
}

/// `√ε|0_h 1_e⟩ + √(1−ε)|1_h 0_e⟩` with e sent through transmission `t`
/// and amplified with the gain `g² = (1−ε)/(εT)` that rebalances the two
/// terms. Ideal photon-number-resolving scissors; returns the normalized
/// state on (h, v).
pub fn biased_corrected_channel(epsilon: f64, t: f64) -> Result<DensityOperator, ProtocolError> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(t > 0.0 && t <= 1.0) {
        return Err(ProtocolError::InvalidConfig(format!(
            "need 0 < ε < 1 and 0 < T ≤ 1, got ε = {epsilon}, T = {t}"
        )));
    }
    let reg = ModeRegister::new(["h", "e"])?;
    let psi = PureState::from_amplitudes(
        reg,
        1,
        [
            (vec![0, 1], Complex64::new(epsilon.sqrt(), 0.0)),
            (vec![1, 0], Complex64::new((1.0 - epsilon).sqrt(), 0.0)),
        ],
    )?;
    let rho = DensityOperator::from_pure(&psi).apply_loss("e", t)?;
    let g = ((1.0 - epsilon) / (epsilon * t)).sqrt();
    let spec = AmplifierSpec::with_gain(g, DetectorPair::pnr(1.0))?;
    let out = heralded_amplifier(&rho, "e", "v", &spec, 1.0)?;
    Ok(out.state.normalized()?)
}
