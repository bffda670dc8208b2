use std::f64::consts::PI;

use georobust_core::gates::{build, GateFamily, GateSpec};
use georobust_core::harness::sweep::BuiltGate;
use georobust_core::linalg::{pauli_x, SquareOperator, StateVector};
use georobust_core::lindblad::{
    cardinal_states, default_channels, lindblad_rhs, propagate_density,
    propagate_schedule_density, CollapseChannel, DensityMatrix,
};
use georobust_core::pulses::{ErrorModel, System};
use georobust_core::simulate::propagate_schedule;
use georobust_core::{TimeGrid, C64};
use proptest::prelude::*;

fn plus() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_slice(&[C64::new(h, 0.0), C64::new(h, 0.0)])
}

#[test]
fn pure_dephasing_closed_form() {
    let gamma = 0.2;
    let p1 = SquareOperator::outer(&StateVector::basis(2, 1), &StateVector::basis(2, 1));
    let channels = [CollapseChannel::new(p1, gamma).unwrap()];
    let rho0 = DensityMatrix::pure(&plus()).unwrap();
    for t in [0.5, 2.0, 7.0] {
        let grid = TimeGrid::new(0.0, t, 400).unwrap();
        let rho = propagate_density(|_| SquareOperator::zeros(2), &channels, &grid, &rho0).unwrap();
        let coherence = rho.operator().get(0, 1);
        assert!((coherence.re - 0.5 * (-gamma * t / 2.0).exp()).abs() < 1e-10);
        assert!(coherence.im.abs() < 1e-12);
        assert!((rho.operator().get(1, 1).re - 0.5).abs() < 1e-12);
    }
}

#[test]
fn driven_decay_relaxes_to_ground() {
    let channels = default_channels(System::TwoLevel, 0.5, 0.0).unwrap();
    let rho0 = DensityMatrix::pure(&StateVector::basis(2, 1)).unwrap();
    let grid = TimeGrid::new(0.0, 40.0, 4000).unwrap();
    let rho = propagate_density(|_| SquareOperator::zeros(2), &channels, &grid, &rho0).unwrap();
    assert!((rho.expectation(&StateVector::basis(2, 0)) - 1.0).abs() < 1e-8);
}

#[test]
fn closed_limit_matches_unitary_propagation() {
    for family in GateFamily::ALL {
        let s = build(family, &GateSpec::not()).unwrap();
        let err = ErrorModel::global(0.03).unwrap();
        let u = propagate_schedule(&s, &err, 1000).unwrap();
        let channels = default_channels(s.system(), 0.0, 0.0).unwrap();
        for psi in cardinal_states(s.dim()) {
            let rho = propagate_schedule_density(&s, &err, &channels, 1000, &DensityMatrix::pure(&psi).unwrap())
                .unwrap();
            let expected = SquareOperator::outer(&u.apply(&psi), &u.apply(&psi));
            assert!(rho.operator().max_abs_diff(&expected) < 1e-7, "{family}");
        }
    }
}

#[test]
fn longest_gate_keeps_density_invariants() {
    let s = build(GateFamily::SrNhqc, &GateSpec::not()).unwrap();
    assert!((s.duration() - 4.0 * PI).abs() < 1e-12);
    let channels = default_channels(s.system(), 1e-4, 1e-4).unwrap();
    for psi in cardinal_states(3) {
        let rho = propagate_schedule_density(&s, &ErrorModel::none(), &channels, 1000, &DensityMatrix::pure(&psi).unwrap())
            .unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-9);
        assert!(rho.operator().hermiticity_error() < 1e-10);
        assert!(rho.min_eigenvalue().unwrap() >= -1e-8);
    }
}

#[test]
fn decoherence_grows_with_gate_time_within_a_system() {
    for system in [System::TwoLevel, System::ThreeLevelLambda] {
        let mut points: Vec<(f64, f64)> = GateFamily::ALL
            .into_iter()
            .filter(|f| f.system() == system)
            .map(|f| {
                let gate = BuiltGate::new(f, &GateSpec::not()).unwrap();
                (gate.schedule.duration(), 1.0 - gate.cardinal_fidelity(0.0, 1e-4, 500).unwrap())
            })
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in points.windows(2) {
            assert!(w[1].1 >= w[0].1, "{system:?}: {points:?}");
        }
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(CollapseChannel::new(pauli_x(), -1.0).is_err());
    let bad = SquareOperator::diagonal(&[C64::new(0.7, 0.0), C64::new(0.7, 0.0)]);
    assert!(DensityMatrix::new(bad).is_err());
    let rho = DensityMatrix::pure(&plus()).unwrap();
    assert!(lindblad_rhs(&rho, &SquareOperator::zeros(3), &[]).is_err());
}

proptest! {
    #[test]
    fn generator_is_traceless_and_hermitian(
        a in -1.0..1.0f64, g1 in 0.0..0.5f64, g2 in 0.0..0.5f64, x in 0.0..PI, y in 0.0..(2.0 * PI),
    ) {
        let psi = StateVector::from_slice(&[
            C64::new((x / 2.0).cos(), 0.0),
            C64::from_polar((x / 2.0).sin(), y),
        ]);
        let rho = DensityMatrix::pure(&psi).unwrap();
        let channels = default_channels(System::TwoLevel, g1, g2).unwrap();
        let d = lindblad_rhs(&rho, &pauli_x().scale_real(a), &channels).unwrap();
        prop_assert!(d.trace().norm() < 1e-14);
        prop_assert!(d.hermiticity_error() < 1e-14);
    }
}
