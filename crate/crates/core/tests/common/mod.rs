#![allow(dead_code)]

use std::f64::consts::PI;

use georobust_core::linalg::{StateVector, C64};
use georobust_core::pulses::{excited_state, PulseSchedule, System};
use georobust_core::robustness::{initial_frame, loop_index};
use georobust_core::simulate::sample_trajectory;

/// Bloch vectors of the loop state along the ideal trajectory, on the sphere
/// of `{|0>, |1>}` (two-level) or `{|b>, |e>}` (Lambda).
pub fn loop_bloch_path(schedule: &PulseSchedule, steps_per_pi: usize) -> Vec<[f64; 3]> {
    let frame = initial_frame(schedule);
    let start = frame[loop_index(schedule.system())];
    let reduce = |psi: &StateVector| -> StateVector {
        match schedule.system() {
            System::TwoLevel => *psi,
            System::ThreeLevelLambda => {
                let b = schedule.bright_state().unwrap();
                StateVector::from_slice(&[b.inner(psi), excited_state().inner(psi)])
            }
        }
    };
    let mut path = Vec::new();
    for seg in sample_trajectory(schedule, steps_per_pi).unwrap() {
        for u in &seg.propagators {
            path.push(reduce(&u.apply(&start)).bloch_vector());
        }
    }
    path
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Signed solid angle enclosed by a closed path on the unit sphere, by fan
/// triangulation from a generic reference point. Returned modulo `4 pi`.
pub fn solid_angle(path: &[[f64; 3]]) -> f64 {
    let p = {
        let v = [0.31, -0.47, 0.83];
        let n = dot(v, v).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    let mut total = 0.0;
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let num = dot(p, cross(a, b));
        let den = 1.0 + dot(p, a) + dot(a, b) + dot(b, p);
        total += 2.0 * num.atan2(den);
    }
    total.rem_euclid(4.0 * PI)
}

/// Orientation of the loop's sphere relative to the geometric-phase sign:
/// the Lambda loop is traversed clockwise in the `{|b>, |e>}` chart.
pub fn orientation(system: System) -> f64 {
    match system {
        System::TwoLevel => 1.0,
        System::ThreeLevelLambda => -1.0,
    }
}

/// Smallest distance between two angles modulo `2 pi`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
