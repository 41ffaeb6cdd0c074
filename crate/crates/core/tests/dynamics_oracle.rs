use jcesd_core::dynamics::mean_photon_number;
use jcesd_core::oracle::{
    build_raw_hamiltonian, oracle_concurrence_series, photon_number, propagate_eig, propagate_step,
};
use jcesd_core::{
    joint_density, uniform_grid, wootters_concurrence, BellSpec, Engine, ModelParams,
    TruncationPolicy,
};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI};

fn max_state_diff(
    ours_up: &[Complex64],
    ours_down: &[Complex64],
    raw: &[Complex64],
    n_fock: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for m in 0..n_fock {
        let up = ours_up.get(m).copied().unwrap_or_default();
        let down = ours_down.get(m).copied().unwrap_or_default();
        worst = worst
            .max((up - raw[m]).norm())
            .max((down - raw[n_fock + m]).norm());
    }
    worst
}

#[test]
fn trajectory_matches_runge_kutta() {
    let p = ModelParams::resonant(0.1, 0.0);
    let times = uniform_grid(20.0, 41).unwrap();
    let pair = Engine::new(TruncationPolicy::fixed(16))
        .trajectories(&p, 16, &times)
        .unwrap();
    let raw = build_raw_hamiltonian(&p, 40).unwrap();
    let rk = propagate_step(&raw, &raw.vacuum_state(true), &times, 0.05).unwrap();
    for (i, state) in rk.iter().enumerate() {
        let d = max_state_diff(&pair.up.comp_up[i], &pair.up.comp_down[i], state, 40);
        assert!(d < 1e-6, "t = {}: {d:e}", times[i]);
    }
}

#[test]
fn photon_number_at_strong_coupling() {
    let p = ModelParams::resonant(1.0, 0.0);
    let times = [0.0, 2.0];
    let pair = Engine::default().trajectories(&p, 128, &times).unwrap();
    let raw = build_raw_hamiltonian(&p, 200).unwrap();
    let exact = propagate_eig(&raw, &raw.vacuum_state(false), &times).unwrap();
    let want = photon_number(&exact[1], 200);
    let got = mean_photon_number(&pair.down, 1);
    assert!(want > 0.1);
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}

#[test]
fn joint_density_matches_oracle() {
    let p = ModelParams::resonant(0.3, 0.0);
    let times = uniform_grid(5.0, 11).unwrap();
    let engine = Engine::default();
    let pair = engine.trajectories(&p, 32, &times).unwrap();
    for bell in [
        BellSpec::anti_correlated(FRAC_PI_4),
        BellSpec::correlated(PI / 12.0),
    ] {
        let oracle = oracle_concurrence_series(&p, &p, &bell, &times, 60).unwrap();
        let last = times.len() - 1;
        let rho = joint_density(&pair.up, &pair.down, &pair.up, &pair.down, &bell, last).unwrap();
        let diff = (rho.matrix - oracle.rho[last])
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff:e}");
        let c = wootters_concurrence(&rho).unwrap();
        assert!((c - oracle.concurrence[last]).abs() < 1e-6);
    }
}

#[test]
fn swapping_subsystems_relabels_the_state() {
    let a = ModelParams::resonant(0.6, 0.0);
    let b = ModelParams::resonant(0.3, 0.0);
    let times = uniform_grid(15.0, 151).unwrap();
    let engine = Engine::new(TruncationPolicy::fixed(48));
    let alpha = PI / 5.0;
    // cosα|↑↓⟩ + sinα|↓↑⟩ read with the atoms exchanged has angle π/2 − α
    for (bell, swapped) in [
        (
            BellSpec::anti_correlated(alpha),
            BellSpec::anti_correlated(PI / 2.0 - alpha),
        ),
        (BellSpec::correlated(alpha), BellSpec::correlated(alpha)),
    ] {
        let ab = engine.series_at(&a, &b, &bell, &times, 48).unwrap();
        let ba = engine.series_at(&b, &a, &swapped, &times, 48).unwrap();
        for i in 0..times.len() {
            assert!((ab.concurrence[i] - ba.concurrence[i]).abs() < 1e-12);
            assert!((ab.photon1[i] - ba.photon2[i]).abs() < 1e-12);
            assert!((ab.photon2[i] - ba.photon1[i]).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn concurrence_is_a_valid_entanglement_measure(
        g in 0.0f64..0.8,
        g2 in 0.0f64..0.8,
        detuning in -0.4f64..0.4,
        alpha in 0.0f64..PI,
        correlated in any::<bool>(),
    ) {
        let p1 = ModelParams::with_detuning(1.0, detuning, g, alpha).unwrap();
        let p2 = ModelParams::with_detuning(1.0, detuning, g2, alpha).unwrap();
        let bell = if correlated { BellSpec::correlated(alpha) } else { BellSpec::anti_correlated(alpha) };
        let times = uniform_grid(6.0, 13).unwrap();
        let s = Engine::new(TruncationPolicy::fixed(32)).series_at(&p1, &p2, &bell, &times, 32).unwrap();
        prop_assert!((s.concurrence[0] - bell.initial_concurrence()).abs() < 1e-10);
        for i in 0..times.len() {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&s.concurrence[i]));
            prop_assert!(s.norm_error[i] < 1e-8);
            prop_assert!(s.photon1[i] >= 0.0 && s.photon2[i] >= 0.0);
        }
    }
}
