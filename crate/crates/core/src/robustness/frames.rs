//! Time-dependent auxiliary bases that follow the ideal evolution.
//!
//! Two-level: `zeta_1 = cos(a/2)|0> - i sin(a/2) e^{-i phi_R}|1>`,
//! `zeta_2 = -i sin(a/2) e^{i phi_R}|0> + cos(a/2)|1>`.
//!
//! Three-level, ordered `(mu_1, mu_2, mu_3)`: `mu_1 = |d>`,
//! `mu_2 = cos(a/2)|b> - i sin(a/2) e^{i phi_1}|e>`,
//! `mu_3 = -i sin(a/2) e^{-i phi_1}|b> + cos(a/2)|e>`. This is the two-level
//! frame on `{|b>, |e>}` with `phi_R = -phi_1`.
//!
//! The first `M` vectors span the computational subspace (`M = 2` in both
//! systems).

use crate::error::{Error, Result};
use crate::linalg::{StateVector, C64, I};
use crate::pulses::{bright_state, dark_state, excited_state, PulseSchedule, System};

pub const COMPUTATIONAL_DIM: usize = 2;

/// Frame vectors at the given auxiliary polar angle and drive phase.
pub fn frame_vectors(schedule: &PulseSchedule, alpha: f64, phase: f64) -> Vec<StateVector> {
    let (c, s) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
    match schedule.system() {
        System::TwoLevel => vec![
            StateVector::from_slice(&[C64::new(c, 0.0), -I * C64::from_polar(s, -phase)]),
            StateVector::from_slice(&[-I * C64::from_polar(s, phase), C64::new(c, 0.0)]),
        ],
        System::ThreeLevelLambda => {
            let f = schedule.frame();
            let b = bright_state(f.theta, f.phi);
            let d = dark_state(f.theta, f.phi);
            let e = excited_state();
            let mut mu2 = StateVector::zeros(3);
            let mut mu3 = StateVector::zeros(3);
            let to_e = -I * C64::from_polar(s, phase);
            let to_b = -I * C64::from_polar(s, -phase);
            for k in 0..3 {
                mu2[k] = b[k] * c + e[k] * to_e;
                mu3[k] = b[k] * to_b + e[k] * c;
            }
            vec![d, mu2, mu3]
        }
    }
}

/// Auxiliary polar angle and drive phase at time `t` (right-continuous at
/// segment boundaries).
pub fn frame_coordinates(schedule: &PulseSchedule, t: f64) -> Result<(f64, f64)> {
    if schedule.is_empty() {
        let alpha0 = schedule.alpha_marks()[0];
        return Ok((alpha0, 0.0));
    }
    let k = schedule.segment_index_at(t)?;
    let seg = schedule.segments()[k];
    let start = schedule.segment_starts()[k];
    let alpha = schedule.alpha_marks()[k] + seg.amplitude * (t - start);
    Ok((alpha, seg.phase))
}

pub fn frame_at(schedule: &PulseSchedule, t: f64) -> Result<Vec<StateVector>> {
    let (alpha, phase) = frame_coordinates(schedule, t)?;
    Ok(frame_vectors(schedule, alpha, phase))
}

pub fn initial_frame(schedule: &PulseSchedule) -> Vec<StateVector> {
    frame_at(schedule, 0.0).expect("t = 0 lies inside every non-empty schedule")
}

/// Frame at the end of the schedule, using the last segment's phase.
pub fn final_frame(schedule: &PulseSchedule) -> Vec<StateVector> {
    let alpha = *schedule.alpha_marks().last().expect("alpha marks are never empty");
    let phase = schedule.segments().last().map_or(0.0, |s| s.phase);
    frame_vectors(schedule, alpha, phase)
}

/// Index of the auxiliary vector that travels around the loop.
pub fn loop_index(system: System) -> usize {
    match system {
        System::TwoLevel => 0,
        System::ThreeLevelLambda => 1,
    }
}

#[derive(Debug, Clone)]
pub struct AuxiliaryBasis {
    pub times: Vec<f64>,
    pub frames: Vec<Vec<StateVector>>,
}

impl AuxiliaryBasis {
    /// Largest `|<mu_i|mu_j> - delta_ij|` over all samples.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for frame in &self.frames {
            for (i, a) in frame.iter().enumerate() {
                for (j, b) in frame.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((a.inner(b) - C64::new(target, 0.0)).norm());
                }
            }
        }
        worst
    }

    /// Smallest per-vector overlap magnitude between the first and last frame.
    pub fn cyclic_overlap(&self) -> f64 {
        match (self.frames.first(), self.frames.last()) {
            (Some(first), Some(last)) => first
                .iter()
                .zip(last)
                .map(|(a, b)| a.overlap(b))
                .fold(1.0, f64::min),
            _ => 1.0,
        }
    }

    pub fn is_cyclic(&self, tol: f64) -> bool {
        self.cyclic_overlap() >= 1.0 - tol
    }
}

/// Auxiliary frames sampled at `times`.
pub fn auxiliary_basis(schedule: &PulseSchedule, times: &[f64]) -> Result<AuxiliaryBasis> {
    if schedule.is_empty() {
        return Err(Error::InvalidSchedule("empty schedule has no auxiliary frame".into()));
    }
    let frames = times
        .iter()
        .map(|&t| frame_at(schedule, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(AuxiliaryBasis {
        times: times.to_vec(),
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::PulseSegment;
    use std::f64::consts::PI;

    fn lambda_loop() -> PulseSchedule {
        PulseSchedule::lambda(
            1.1,
            0.7,
            vec![
                PulseSegment::with_area(PI, 0.4).unwrap(),
                PulseSegment::with_area(PI, 1.9).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn three_level_frame_starts_at_dark_bright_excited() {
        let s = lambda_loop();
        let f = initial_frame(&s);
        assert!((f[0].overlap(&s.dark_state().unwrap()) - 1.0).abs() < 1e-15);
        assert!((f[1].overlap(&s.bright_state().unwrap()) - 1.0).abs() < 1e-15);
        assert!((f[2].overlap(&excited_state()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_loop_swaps_bright_and_excited() {
        let s = lambda_loop();
        let f = frame_at(&s, PI).unwrap();
        assert!((f[1].overlap(&excited_state()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frames_are_orthonormal_and_cyclic() {
        let s = lambda_loop();
        let times: Vec<f64> = (0..=1000).map(|k| s.duration() * k as f64 / 1000.0).collect();
        let basis = auxiliary_basis(&s, &times).unwrap();
        assert!(basis.orthonormality_error() < 1e-12);
        assert!(basis.is_cyclic(1e-8));
    }
}
