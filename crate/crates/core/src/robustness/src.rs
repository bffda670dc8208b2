//! Closed-form super-robust residuals and geometric phases for
//! piecewise-constant loops.
//!
//! With flat segments the SRC integral collapses to a phasor sum
//! `sum_j (a_j / 2) exp(-i I_j)`, where the running exponent `I` picks up
//! `delta_phi / cos(alpha_b)` at each boundary. Phases are the segment's own
//! drive phase (`phi_R` for two levels, `phi_1` for the Lambda system).

use std::f64::consts::PI;

use log::warn;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::pulses::{PulseSchedule, System};

use super::dmatrix::{d_matrix_exact, DMatrix};
use super::frames::{final_frame, initial_frame};

/// Boundaries with `|cos alpha| < 1 - POLE_TOL` are not at a pole.
const POLE_TOL: f64 = 1e-9;

/// Minimum frame overlap accepted as a closed loop.
pub const CYCLIC_TOL: f64 = 1e-8;

fn at_pole(alpha: f64) -> bool {
    alpha.cos().abs() >= 1.0 - POLE_TOL
}

fn phasor_sum(schedule: &PulseSchedule) -> Option<C64> {
    let segs = schedule.segments();
    let marks = schedule.alpha_marks();
    let mut running = 0.0;
    let mut total = C64::new(0.0, 0.0);
    for (j, seg) in segs.iter().enumerate() {
        if j > 0 {
            let dphi = seg.phase - segs[j - 1].phase;
            if dphi != 0.0 {
                if !at_pole(marks[j]) {
                    return None;
                }
                running += dphi / marks[j].cos();
            }
        }
        total += C64::from_polar(seg.area() / 2.0, -running);
    }
    Some(total)
}

/// The SRC integral read off a D matrix of `schedule`: `e^{i phi(0)} D_21`
/// in the two-level frame, `e^{i phi_1(0)} D_23` in the Lambda frame.
pub fn src_from_dmatrix(schedule: &PulseSchedule, d: &DMatrix) -> C64 {
    let phi0 = schedule.segments().first().map_or(0.0, |s| s.phase);
    let entry = match schedule.system() {
        System::TwoLevel => d.get(1, 0),
        System::ThreeLevelLambda => d.get(1, 2),
    };
    C64::from_polar(1.0, phi0) * entry
}

fn src_from_d(schedule: &PulseSchedule) -> Result<C64> {
    Ok(src_from_dmatrix(schedule, &d_matrix_exact(schedule)?))
}

fn src_residual(schedule: &PulseSchedule, system: System) -> Result<C64> {
    if schedule.system() != system {
        return Err(Error::SystemMismatch(format!(
            "expected {system:?} schedule, got {:?}",
            schedule.system()
        )));
    }
    if schedule.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    match phasor_sum(schedule) {
        Some(s) => Ok(s),
        None => {
            warn!("phase jump away from a pole; evaluating the SRC integral numerically");
            src_from_d(schedule)
        }
    }
}

/// Two-level SRC residual `D'_12`.
pub fn src_residual_2level(schedule: &PulseSchedule) -> Result<C64> {
    src_residual(schedule, System::TwoLevel)
}

/// Lambda-system SRC residual `D'_23`.
pub fn src_residual_3level(schedule: &PulseSchedule) -> Result<C64> {
    src_residual(schedule, System::ThreeLevelLambda)
}

/// SRC residual for either system.
pub fn src_residual_any(schedule: &PulseSchedule) -> Result<C64> {
    src_residual(schedule, schedule.system())
}

/// Same quantity read off the D matrix, for cross-checks.
pub fn src_residual_numeric(schedule: &PulseSchedule) -> Result<C64> {
    if schedule.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    src_from_d(schedule)
}

/// Wraps into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Geometric phase of the loop state: the jump terms
/// `(cos alpha - 1)/2 * delta_phi` plus `pi` per full turn of `alpha`
/// (the frame vector returns with a sign flip after each `2 pi`). Equals half
/// the solid angle swept on the loop's Bloch sphere; reported in `(-pi, pi]`.
pub fn geometric_phase(schedule: &PulseSchedule) -> Result<f64> {
    if schedule.is_empty() {
        return Ok(0.0);
    }
    let overlap = initial_frame(schedule)
        .iter()
        .zip(final_frame(schedule))
        .map(|(a, b)| a.overlap(&b))
        .fold(1.0, f64::min);
    if overlap < 1.0 - CYCLIC_TOL {
        return Err(Error::NonCyclic { overlap });
    }
    let segs = schedule.segments();
    let marks = schedule.alpha_marks();
    let mut gamma = 0.0;
    for j in 1..segs.len() {
        let dphi = segs[j].phase - segs[j - 1].phase;
        gamma += (marks[j].cos() - 1.0) / 2.0 * dphi;
    }
    let turns = ((marks[marks.len() - 1] - marks[0]) / (2.0 * PI)).round();
    Ok(wrap_phase(gamma + turns * PI))
}
