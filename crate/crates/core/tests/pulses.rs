use std::f64::consts::PI;

use georobust_core::linalg::{mat_exp_hermitian, pauli_x, pauli_y, pauli_z, C64};
use georobust_core::pulses::{
    apply_error, bright_state, dark_state, excited_state, hamiltonian_2level, hamiltonian_3level,
    pulse_area, ErrorModel, PulseSchedule, PulseSegment,
};
use proptest::prelude::*;

fn two(amplitude: f64, phase: f64) -> PulseSchedule {
    PulseSchedule::two_level(0.0, vec![PulseSegment::new(1.0, amplitude, phase).unwrap()]).unwrap()
}

#[test]
fn two_level_sign_convention() {
    let h = hamiltonian_2level(&two(1.0, 0.0), 0.5).unwrap();
    assert!(h.max_abs_diff(&pauli_x().scale_real(0.5)) < 1e-15);
    let h = hamiltonian_2level(&two(1.0, PI / 2.0), 0.5).unwrap();
    assert!(h.max_abs_diff(&pauli_y().scale_real(-0.5)) < 1e-15);
}

#[test]
fn lambda_equal_weight_couplings() {
    let s = PulseSchedule::lambda(PI / 2.0, 0.0, vec![PulseSegment::with_area(PI, 0.0).unwrap()]).unwrap();
    let h = hamiltonian_3level(&s, 1.0).unwrap();
    let expected = 1.0 / (2.0 * 2f64.sqrt());
    assert!((h.get(0, 2).norm() - expected).abs() < 1e-15);
    assert!((h.get(1, 2).norm() - expected).abs() < 1e-15);
}

#[test]
fn time_outside_schedule_is_rejected() {
    assert!(hamiltonian_2level(&two(1.0, 0.0), 1.5).is_err());
    assert!(hamiltonian_2level(&two(1.0, 0.0), -0.1).is_err());
}

#[test]
fn wrong_system_is_rejected() {
    assert!(hamiltonian_3level(&two(1.0, 0.0), 0.5).is_err());
}

#[test]
fn error_injection_examples() {
    let h = pauli_x().scale_real(0.5);
    assert_eq!(apply_error(&h, &ErrorModel::global(0.0).unwrap(), 0.0).unwrap(), h);
    let scaled = apply_error(&h, &ErrorModel::global(0.1).unwrap(), 0.0).unwrap();
    assert!(scaled.max_abs_diff(&h.scale_real(1.1)) < 1e-15);
    let custom = ErrorModel::custom(0.05, |_| pauli_z()).unwrap();
    let shifted = apply_error(&h, &custom, 0.0).unwrap();
    assert!(shifted.max_abs_diff(&(h + pauli_z().scale_real(0.05))) < 1e-15);
    assert!(ErrorModel::global(0.6).is_err());
}

#[test]
fn pulse_area_examples() {
    assert!((pulse_area(&two(1.0, 0.0)) - 1.0).abs() < 1e-15);
    assert_eq!(pulse_area(&PulseSchedule::two_level(0.0, vec![]).unwrap()), 0.0);
}

#[test]
fn malformed_text_is_rejected() {
    assert!(PulseSchedule::from_text("").is_err());
    assert!(PulseSchedule::from_text("system=two theta=0 phi=0\n1.0 -1.0 0.0\n").is_err());
    assert!(PulseSchedule::from_text("system=qutrit theta=0 phi=0\n").is_err());
}

proptest! {
    #[test]
    fn resonant_spectrum(amplitude in 0.0..3.0f64, phase in -7.0..7.0f64) {
        let h = hamiltonian_2level(&two(amplitude, phase), 0.5).unwrap();
        prop_assert!(h.trace().norm() < 1e-14);
        let (vals, _) = h.eigh().unwrap();
        prop_assert!((vals[0] + amplitude / 2.0).abs() < 1e-12);
        prop_assert!((vals[1] - amplitude / 2.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_restricts_to_two_level(
        theta in 0.0..PI, phi in 0.0..(2.0 * PI), amplitude in 0.1..3.0f64, phase in -4.0..4.0f64,
    ) {
        let lam = PulseSchedule::lambda(theta, phi, vec![PulseSegment::new(1.0, amplitude, phase).unwrap()]).unwrap();
        let h3 = hamiltonian_3level(&lam, 0.5).unwrap();
        let h2 = hamiltonian_2level(&two(amplitude, -phase), 0.5).unwrap();
        let basis = [bright_state(theta, phi), excited_state(), dark_state(theta, phi)];
        let rotated = h3.in_basis(&basis);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((rotated.get(i, j) - h2.get(i, j)).norm() < 1e-12);
            }
        }
        for k in 0..3 {
            prop_assert!(rotated.get(2, k).norm() < 1e-12);
        }
        let coupling = h3.matrix_element(&bright_state(theta, phi), &excited_state());
        prop_assert!((coupling - C64::from_polar(amplitude / 2.0, -phase)).norm() < 1e-12);
    }

    #[test]
    fn global_error_stretches_duration(
        duration in 0.1..6.0f64, amplitude in 0.1..2.0f64, phase in -4.0..4.0f64, beta in -0.5..0.5f64,
    ) {
        let s = PulseSchedule::two_level(0.0, vec![PulseSegment::new(duration, amplitude, phase).unwrap()]).unwrap();
        let h = s.segment_hamiltonian(0);
        let perturbed = apply_error(&h, &ErrorModel::global(beta).unwrap(), 0.0).unwrap();
        let a = mat_exp_hermitian(&perturbed, duration).unwrap();
        let b = mat_exp_hermitian(&h, (1.0 + beta) * duration).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn text_round_trip(
        areas in proptest::collection::vec((0.01..7.0f64, 0.0..(2.0 * PI)), 0..6),
        theta in 0.0..PI,
        lambda in any::<bool>(),
    ) {
        let segs: Vec<_> = areas.iter().map(|&(a, p)| PulseSegment::with_area(a, p).unwrap()).collect();
        let s = if lambda {
            PulseSchedule::lambda(theta, 1.0, segs).unwrap()
        } else {
            PulseSchedule::two_level(theta, segs).unwrap()
        };
        prop_assert_eq!(PulseSchedule::from_text(&s.to_text()).unwrap(), s);
    }
}
