use super::{AmplifierSpec, DetectorPair, ProtocolError};
use crate::detection::{DetectorBank, HeraldPattern, HeraldResult, Heraldable};
use crate::fock::{fresh_label, ModeUnitary, OpticalState};
use crate::optics::{beam_splitter, distinguishability_split, resource_state};

/// 50:50 interference of `left` and `right` in front of two detectors.
///
/// A fraction `1 − xi` of the light in `right` is moved to an unmatched
/// sub-mode that meets only an (empty) unmatched partner of `left`, so it
/// reaches either detector without interfering. Returns the mode groups
/// watched by the `left`-port and `right`-port detectors.
pub fn interfere<S: OpticalState>(
    state: &S,
    left: &str,
    right: &str,
    xi: f64,
) -> Result<(S, [Vec<String>; 2]), ProtocolError> {
    let bs = beam_splitter(0.5, left, right)?;
    if xi == 1.0 {
        let out = state.apply_unitary(&bs)?;
        return Ok((out, [vec![left.to_string()], vec![right.to_string()]]));
    }
    let (split, right_u) = distinguishability_split(state, right, xi)?;
    let left_u = fresh_label(split.register(), &format!("{left}~"));
    let out = split
        .with_vacuum_mode(&left_u)?
        .apply_unitary(&bs)?
        .apply_unitary(&beam_splitter(0.5, &left_u, &right_u)?)?;
    Ok((
        out,
        [
            vec![left.to_string(), left_u],
            vec![right.to_string(), right_u],
        ],
    ))
}

/// Labels of `state` minus `drop`, plus `extra`.
fn remaining<S: OpticalState>(state: &S, drop: &[&str], extra: &[&str]) -> Vec<String> {
    state
        .register()
        .labels()
        .iter()
        .filter(|l| !drop.contains(&l.as_str()))
        .cloned()
        .chain(extra.iter().map(|s| s.to_string()))
        .collect()
}

/// Quantum-scissors amplifier teleporting `input` into the new mode
/// `output`. `xi` is the overlap between the input light and the resource
/// photon.
///
/// The two click outcomes differ by a parity flip on `output`, which is
/// undone when the second detector fires. The result is on every other
/// mode of `state` followed by `output`, sub-normalized to the success
/// probability.
pub fn heralded_amplifier<S: Heraldable>(
    state: &S,
    input: &str,
    output: &str,
    spec: &AmplifierSpec,
    xi: f64,
) -> Result<HeraldResult, ProtocolError> {
    spec.validate()?;
    state.register().index_of(input)?;
    if state.register().contains(output) {
        return Err(ProtocolError::InvalidConfig(format!(
            "output mode `{output}` already in use"
        )));
    }
    let keep = remaining(state, &[input], &[output]);
    let ancilla = fresh_label(&state.register().with_mode(output)?, "a");
    let resource = resource_state(spec.eta, &ancilla, output)?;
    let prepared = state
        .attach(&resource)?
        .apply_loss(&ancilla, spec.resource_delivery)?;
    let (mixed, groups) = interfere(&prepared, input, &ancilla, xi)?;
    let [d1, d2] = spec.detectors.models()?;
    let bank = DetectorBank::new()
        .add("D1", &d1, &groups[0])?
        .add("D2", &d2, &groups[1])?;
    let pattern = HeraldPattern::new()
        .exactly_one(&["D1", "D2"])
        .correct_on("D2", ModeUnitary::parity(output));
    Ok(mixed.herald(&bank, &pattern, &keep)?)
}

/// Scissors at η = 1/2 acting as a Bell measurement on `left` and
/// `right`; the phase flip heralded by the second detector is undone on
/// `corrected`.
pub fn entanglement_swap<S: Heraldable>(
    state: &S,
    left: &str,
    right: &str,
    corrected: &str,
    detectors: &DetectorPair,
    xi: f64,
) -> Result<HeraldResult, ProtocolError> {
    state.register().index_of(corrected)?;
    let keep = remaining(state, &[left, right], &[]);
    let (mixed, groups) = interfere(state, left, right, xi)?;
    let [d3, d4] = detectors.models()?;
    let bank = DetectorBank::new()
        .add("D3", &d3, &groups[0])?
        .add("D4", &d4, &groups[1])?;
    let pattern = HeraldPattern::new()
        .exactly_one(&["D3", "D4"])
        .correct_on("D4", ModeUnitary::parity(corrected));
    Ok(mixed.herald(&bank, &pattern, &keep)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{DensityOperator, ModeRegister, PureState};
    use crate::optics::path_entangled_state;
    use num_complex::Complex64;

    fn qubit(alpha: f64, beta: f64) -> DensityOperator {
        let reg = ModeRegister::new(["e"]).unwrap();
        DensityOperator::from_pure(
            &PureState::from_amplitudes(
                reg,
                1,
                [
                    (vec![0], Complex64::new(alpha, 0.0)),
                    (vec![1], Complex64::new(beta, 0.0)),
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn unit_gain_is_teleportation() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let spec = AmplifierSpec::new(0.5, DetectorPair::pnr(1.0)).unwrap();
        let res = heralded_amplifier(&qubit(s, s), "e", "v", &spec, 1.0).unwrap();
        assert!((res.probability - 0.5).abs() < 1e-12);
        let out = res.state.normalized().unwrap();
        assert_eq!(out.register().labels(), &["v".to_string()]);
        for (r, c, want) in [([0], [0], 0.5), ([1], [1], 0.5), ([0], [1], 0.5)] {
            assert!((out.element(&r, &c).unwrap().re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_input_success_probability() {
        // Only the resource photon can click: it reaches the scissors with
        // probability η·delivery and one of the two detectors fires with
        // probability `eff`.
        for (eta, delivery, eff) in [(0.5, 1.0, 1.0), (0.2, 0.8, 0.6), (0.05, 0.5, 0.9)] {
            let mut spec = AmplifierSpec::new(eta, DetectorPair::threshold(eff)).unwrap();
            spec.resource_delivery = delivery;
            let res = heralded_amplifier(&qubit(1.0, 0.0), "e", "v", &spec, 1.0).unwrap();
            assert!((res.probability - eta * delivery * eff).abs() < 1e-12);
            let out = res.state;
            assert!((out.element(&[0], &[0]).unwrap().re - res.probability).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_and_dense_amplifiers_agree() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let spec = AmplifierSpec::new(0.2, DetectorPair::threshold(0.7)).unwrap();
        let rho = qubit(s, s).apply_loss("e", 0.4).unwrap();
        let dense = heralded_amplifier(&rho, "e", "v", &spec, 0.9).unwrap();
        let psi = PureState::from_amplitudes(
            ModeRegister::new(["e"]).unwrap(),
            1,
            [
                (vec![0], Complex64::new(s, 0.0)),
                (vec![1], Complex64::new(s, 0.0)),
            ],
        )
        .unwrap()
        .apply_loss("e", 0.4)
        .unwrap();
        let pure = heralded_amplifier(&psi, "e", "v", &spec, 0.9).unwrap();
        let pure_v = pure.state.partial_trace(&["v"]).unwrap();
        assert!((dense.probability - pure.probability).abs() < 1e-13);
        let diff = dense.state.with_max_photons(pure_v.max_photons()).unwrap();
        assert!(diff.max_abs_diff(&pure_v).unwrap() < 1e-13);
    }

    #[test]
    fn ideal_swap_yields_bell_pair() {
        let pairs = path_entangled_state("f", "e")
            .unwrap()
            .tensor(&path_entangled_state("h", "g").unwrap())
            .unwrap();
        let res = entanglement_swap(&pairs, "f", "g", "h", &DetectorPair::pnr(1.0), 1.0).unwrap();
        assert!((res.probability - 0.5).abs() < 1e-12);
        let out = res.state.normalized().unwrap();
        assert_eq!(out.register().labels(), &["e".to_string(), "h".to_string()]);
        assert!((out.element(&[1, 0], &[0, 1]).unwrap().re - 0.5).abs() < 1e-12);
        assert!((out.purity() - 1.0).abs() < 1e-12);

        let thr =
            entanglement_swap(&pairs, "f", "g", "h", &DetectorPair::threshold(1.0), 1.0).unwrap();
        assert!((thr.probability - 0.75).abs() < 1e-12);
        // The extra quarter is the bunched |1_f 1_g⟩ term, which leaves e
        // and h empty.
        assert!((thr.state.element(&[0, 0], &[0, 0]).unwrap().re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn swap_on_vacuum_never_succeeds() {
        let vac = PureState::vacuum(ModeRegister::new(["f", "g", "h"]).unwrap(), 2);
        let res = entanglement_swap(&vac, "f", "g", "h", &DetectorPair::pnr(1.0), 1.0).unwrap();
        assert_eq!(res.probability, 0.0);
    }
}
