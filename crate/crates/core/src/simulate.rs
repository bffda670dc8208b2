//! Schedule-level propagation on boundary-aligned grids.

use std::f64::consts::PI;

use crate::error::Result;
use crate::linalg::{mat_exp_hermitian, SquareOperator};
use crate::propagate::{propagate_unitary, TimeGrid};
use crate::pulses::{apply_error, ErrorModel, PulseSchedule};

/// Default grid density used by sweeps and the acceptance suite.
pub const DEFAULT_STEPS_PER_PI: usize = 2000;

/// One grid per segment, so every segment boundary is a grid point. Step
/// counts are even (Richardson-friendly) and at least 2.
pub fn segment_grids(schedule: &PulseSchedule, steps_per_pi: usize) -> Result<Vec<TimeGrid>> {
    schedule
        .segment_starts()
        .into_iter()
        .zip(schedule.segments())
        .map(|(start, seg)| {
            let raw = (seg.duration / PI * steps_per_pi as f64).ceil() as usize;
            let steps = raw.max(2).next_multiple_of(2);
            TimeGrid::new(start, start + seg.duration, steps)
        })
        .collect()
}

/// Propagator of the schedule under `error`, stepping each segment on its own
/// grid.
pub fn propagate_schedule(
    schedule: &PulseSchedule,
    error: &ErrorModel,
    steps_per_pi: usize,
) -> Result<SquareOperator> {
    let mut u = SquareOperator::identity(schedule.dim());
    for (k, grid) in segment_grids(schedule, steps_per_pi)?.iter().enumerate() {
        let h = schedule.segment_hamiltonian(k);
        // surface dimension errors of custom noise before stepping
        apply_error(&h, error, grid.t_start())?;
        let seg_u = propagate_unitary(
            |t| apply_error(&h, error, t).expect("noise operator validated"),
            grid,
        )?;
        u = seg_u * u;
    }
    Ok(u)
}

/// Exact propagator for the global Rabi error: the product of per-segment
/// exponentials of `(1 + beta) H_k`.
pub fn exact_propagator(schedule: &PulseSchedule, beta: f64) -> Result<SquareOperator> {
    let mut u = SquareOperator::identity(schedule.dim());
    for (k, seg) in schedule.segments().iter().enumerate() {
        let h = schedule.segment_hamiltonian(k).scale_real(1.0 + beta);
        u = mat_exp_hermitian(&h, seg.duration)? * u;
    }
    Ok(u)
}

/// Ideal propagators sampled on every grid point of every segment.
#[derive(Debug, Clone)]
pub struct SegmentSamples {
    pub grid: TimeGrid,
    pub hamiltonian: SquareOperator,
    /// `U(t_k)` for `k = 0..=steps`.
    pub propagators: Vec<SquareOperator>,
}

pub fn sample_trajectory(
    schedule: &PulseSchedule,
    steps_per_pi: usize,
) -> Result<Vec<SegmentSamples>> {
    let mut out = Vec::with_capacity(schedule.segments().len());
    let mut u = SquareOperator::identity(schedule.dim());
    for (k, grid) in segment_grids(schedule, steps_per_pi)?.into_iter().enumerate() {
        let h = schedule.segment_hamiltonian(k);
        let step = mat_exp_hermitian(&h, grid.dt())?;
        let mut props = Vec::with_capacity(grid.steps() + 1);
        props.push(u);
        for _ in 0..grid.steps() {
            u = step * u;
            props.push(u);
        }
        out.push(SegmentSamples {
            grid,
            hamiltonian: h,
            propagators: props,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::PulseSegment;

    fn schedule() -> PulseSchedule {
        PulseSchedule::two_level(
            0.0,
            vec![
                PulseSegment::with_area(PI, 0.3).unwrap(),
                PulseSegment::new(PI / 7.0, 0.6, 2.0).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn grids_align_with_segment_boundaries() {
        let s = schedule();
        let grids = segment_grids(&s, 100).unwrap();
        assert_eq!(grids.len(), 2);
        assert_eq!(grids[0].t_end(), grids[1].t_start());
        assert_eq!(grids[1].t_end(), s.duration());
        assert!(grids.iter().all(|g| g.steps() % 2 == 0));
    }

    #[test]
    fn grid_and_exact_propagators_agree() {
        let s = schedule();
        let err = ErrorModel::global(0.07).unwrap();
        let stepped = propagate_schedule(&s, &err, 200).unwrap();
        let exact = exact_propagator(&s, 0.07).unwrap();
        assert!(stepped.max_abs_diff(&exact) < 1e-12);
    }

    #[test]
    fn trajectory_ends_at_full_propagator() {
        let s = schedule();
        let samples = sample_trajectory(&s, 50).unwrap();
        let last = *samples.last().unwrap().propagators.last().unwrap();
        assert!(last.max_abs_diff(&exact_propagator(&s, 0.0).unwrap()) < 1e-12);
    }
}
