use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use zeno_darwin::branch::{self, SystemAmplitudes};
use zeno_darwin::oracle::{evolve, exact_entropies, subsystem_entropy, Subsystem};
use zeno_darwin::{ModelKind, ModelParams, C64};

fn params() -> impl Strategy<Value = ModelParams> {
    (
        0usize..3,
        0.0..30.0f64,
        0.005..0.2f64,
        0.0..=FRAC_PI_2,
        0.0..4.0f64,
    )
        .prop_map(|(k, omega, tau, rabi, detuning)| match ModelKind::ALL[k] {
            ModelKind::Base => ModelParams::base(omega, tau).unwrap(),
            ModelKind::Zeno => ModelParams::zeno(omega, tau, rabi).unwrap(),
            ModelKind::AntiZeno => ModelParams::anti_zeno(omega, tau, rabi, detuning).unwrap(),
        })
}

fn amplitudes() -> impl Strategy<Value = SystemAmplitudes> {
    (0.0..FRAC_PI_2, 0.0..6.3f64).prop_map(|(t, phi)| {
        SystemAmplitudes::new(C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), phi)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_state_vector(p in params(), amps in amplitudes(), n in 1usize..=5, ell_frac in 0.0..=1.0f64) {
        let ell = (ell_frac * n as f64).round() as usize;
        let k = branch::kappa_modulus(&p).unwrap();
        let state = evolve(&amps, &p, ell, n).unwrap();
        for m in 0..=n {
            let e = exact_entropies(&state, m).unwrap();
            prop_assert!((e.system - branch::system_entropy(k, ell, &amps).unwrap()).abs() < 1e-9);
            prop_assert!((e.fragment - branch::fragment_entropy(k, ell, m, &amps).unwrap()).abs() < 1e-9);
            prop_assert!((e.joint - branch::joint_entropy(k, ell, m, &amps).unwrap()).abs() < 1e-9);
            let i = branch::mutual_information(k, ell, m, &amps).unwrap();
            prop_assert!((e.mutual_information() - i).abs() < 1e-9);
        }
    }

    #[test]
    fn untouched_ancillas_stay_pure(p in params(), amps in amplitudes()) {
        let n = 4;
        let state = evolve(&amps, &p, 2, n).unwrap();
        let fresh = Subsystem { system: false, ancillas: vec![2, 3] };
        prop_assert!(subsystem_entropy(&state, &fresh).unwrap().abs() < 1e-10);
    }
}

#[test]
fn oracle_state_norm_is_preserved_at_the_caps() {
    let amps = SystemAmplitudes::uniform();
    let p = ModelParams::base(5.0, 0.05).unwrap();
    assert!((evolve(&amps, &p, 12, 12).unwrap().norm() - 1.0).abs() < 1e-12);
    let z = ModelParams::anti_zeno(5.0, 0.05, 1.0, 0.5).unwrap();
    assert!((evolve(&amps, &z, 8, 8).unwrap().norm() - 1.0).abs() < 1e-12);
    assert!(evolve(&amps, &p, 13, 13).is_err());
    assert!(evolve(&amps, &z, 9, 9).is_err());
}
