use num_complex::Complex64;
use proptest::prelude::*;
use qrelay::analytics::{fidelity_after_ha, state_concurrence, SubspaceMatrix};
use qrelay::detection::{
    povm_elements, DetectorBank, DetectorModel, DetectorRegistry, HeraldPattern, Outcome,
};
use qrelay::fock::{
    DensityOperator, KrausChannel, ModeRegister, ModeUnitary, OpticalState, PureState,
};
use qrelay::optics::{beam_splitter, half_wave_plate, quarter_wave_plate, spdc_state, SourceSpec};

const MAX: u32 = 3;

/// Random normalized state on modes (a, b, c) with at most `MAX` photons.
fn state() -> impl Strategy<Value = PureState> {
    let occupation = prop::collection::vec(0u8..=1, 3);
    let amp = (-1.0..1.0f64, -1.0..1.0f64);
    prop::collection::vec((occupation, amp), 1..6).prop_filter_map("zero state", |terms| {
        let reg = ModeRegister::new(["a", "b", "c"]).unwrap();
        let mut acc = std::collections::BTreeMap::new();
        for (occ, (re, im)) in terms {
            *acc.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += Complex64::new(re, im);
        }
        let psi = PureState::from_amplitudes(reg, MAX, acc).ok()?;
        (psi.norm_sqr() > 1e-3).then(|| psi.normalized().unwrap())
    })
}

fn circuit(t: f64, phi: f64, theta: f64) -> Vec<ModeUnitary> {
    vec![
        beam_splitter(t, "a", "b").unwrap(),
        ModeUnitary::phase("b", phi),
        quarter_wave_plate(theta, "b", "c").unwrap(),
        half_wave_plate(theta / 3.0, "a", "c").unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm_and_commute_with_densification(
        psi in state(), t in 0.0..=1.0f64, phi in -3.2..3.2f64, theta in -1.6..1.6f64,
    ) {
        let mut pure = psi.clone();
        let mut rho = DensityOperator::from_pure(&psi);
        for u in circuit(t, phi, theta) {
            pure = pure.apply_unitary(&u).unwrap();
            rho = rho.apply_unitary(&u).unwrap();
        }
        prop_assert!((pure.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((rho.trace_weight() - 1.0).abs() < 1e-12);
        prop_assert!(rho.hermiticity_defect() < 1e-12);
        prop_assert!((rho.purity() - 1.0).abs() < 1e-10);
        let diff = DensityOperator::from_pure(&pure).max_abs_diff(&rho).unwrap();
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn loss_composes_multiplicatively(psi in state(), t1 in 0.0..=1.0f64, t2 in 0.0..=1.0f64) {
        let rho = DensityOperator::from_pure(&psi);
        let two = rho.apply_loss("a", t1).unwrap().apply_loss("a", t2).unwrap();
        let one = rho.apply_loss("a", t1 * t2).unwrap();
        prop_assert!(two.max_abs_diff(&one).unwrap() < 1e-12);
        prop_assert!((one.trace_weight() - 1.0).abs() < 1e-12);
        prop_assert!(one.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn loss_kraus_operators_are_complete(t in 0.0..=1.0f64, n in 1u32..6) {
        let c = KrausChannel::loss("a", t, n);
        let m = c.completeness(n as usize + 1);
        let id = nalgebra::DMatrix::<f64>::identity(n as usize + 1, n as usize + 1);
        prop_assert!((m - id).abs().max() < 1e-12);
    }

    #[test]
    fn povms_resolve_the_identity(eff in 0.0..=1.0f64, n in 0u32..8) {
        for kind in ["threshold", "pnr"] {
            let det = DetectorRegistry::builtin().get(kind).unwrap();
            let elems = povm_elements(det.as_ref(), eff, &["a"], n).unwrap();
            for k in 0..=n {
                let ws: Vec<f64> = elems.iter().map(|(_, e)| e.weight(k).unwrap()).collect();
                prop_assert!(ws.iter().all(|w| (-1e-15..=1.0 + 1e-15).contains(w)));
                prop_assert!((ws.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{kind} n={k}: {ws:?}");
            }
        }
    }

    #[test]
    fn click_probability_is_monotone(e1 in 0.0..=1.0f64, e2 in 0.0..=1.0f64, n in 0u32..8) {
        let det = DetectorRegistry::builtin().get("threshold").unwrap();
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        prop_assert!(det.likelihood(Outcome::Click, n, lo) <= det.likelihood(Outcome::Click, n, hi) + 1e-15);
        prop_assert!(det.likelihood(Outcome::Click, n, lo) <= det.likelihood(Outcome::Click, n + 1, lo) + 1e-15);
    }

    #[test]
    fn threshold_equals_pnr_up_to_one_photon(eff in 0.0..=1.0f64) {
        let reg = DetectorRegistry::builtin();
        let (thr, pnr) = (reg.get("threshold").unwrap(), reg.get("pnr").unwrap());
        for n in 0..=1 {
            prop_assert!((thr.likelihood(Outcome::Click, n, eff) - pnr.likelihood(Outcome::Count(1), n, eff)).abs() < 1e-15);
            prop_assert!((thr.likelihood(Outcome::NoClick, n, eff) - pnr.likelihood(Outcome::Count(0), n, eff)).abs() < 1e-15);
        }
    }

    #[test]
    fn herald_patterns_partition_probability(psi in state(), ea in 0.0..=1.0f64, eb in 0.0..=1.0f64) {
        let bank = DetectorBank::new()
            .add("A", &DetectorModel::threshold(ea).unwrap(), &["a"]).unwrap()
            .add("B", &DetectorModel::pnr(eb).unwrap(), &["b"]).unwrap();
        let mut total = 0.0;
        for oa in [Outcome::NoClick, Outcome::Click] {
            for ob in (0..=MAX).map(Outcome::Count) {
                let pat = HeraldPattern::new().require("A", oa).require("B", ob);
                let p = bank.probability_pure(&psi, &pat).unwrap();
                let rho = DensityOperator::from_pure(&psi);
                let pd = bank.probability_density(&rho, &pat).unwrap();
                prop_assert!((p - pd).abs() < 1e-12);
                total += p;
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-12);

        let one = bank.probability_pure(&psi, &HeraldPattern::new().exactly_one(&["A", "B"])).unwrap();
        let split: f64 = [
            HeraldPattern::new().require("A", Outcome::Click).require("B", Outcome::Count(0)),
            HeraldPattern::new().require("A", Outcome::NoClick).require("B", Outcome::Count(1)),
        ]
        .iter()
        .map(|p| bank.probability_pure(&psi, p).unwrap())
        .sum();
        prop_assert!((one - split).abs() < 1e-12);
    }

    #[test]
    fn concurrence_ignores_local_phases(psi in state(), phi in -3.2..3.2f64, t in 0.0..=1.0f64) {
        let rho = DensityOperator::from_pure(&psi).apply_loss("b", t).unwrap().partial_trace(&["a", "b"]).unwrap();
        let turned = rho.apply_unitary(&ModeUnitary::phase("b", phi)).unwrap();
        let (c0, c1) = (state_concurrence(&rho).unwrap(), state_concurrence(&turned).unwrap());
        prop_assert!((c0 - c1).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&c0));

        let m = SubspaceMatrix::new(0.3, 0.2, 0.25, 0.05, Complex64::from_polar(0.1, phi)).unwrap();
        let r = SubspaceMatrix { d: Complex64::new(0.1, 0.0), ..m };
        prop_assert!((m.concurrence() - r.concurrence()).abs() < 1e-15);
    }

    #[test]
    fn fidelity_is_a_probability(b in 0.0..=1.0f64, t in 0.0..=1.0f64, g in 1.0..50.0f64) {
        let f = fidelity_after_ha(b, t, g).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn spdc_is_normalized_and_correlated(p in 0.0..0.1f64, n in 2u32..5) {
        let psi = spdc_state(&SourceSpec::new(p, "s", "i").unwrap(), 2 * n).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        for (v, _) in psi.iter() {
            prop_assert_eq!(v.get(0), v.get(1));
        }
    }
}
