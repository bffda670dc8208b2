//! First- and second-order error-sensitivity integrals.
//!
//! `D = int_0^tau U(t)^dagger V(t) U(t) dt` is the first-order term of the
//! interaction-picture Dyson series for `H + beta V`; matrix elements are taken
//! between the auxiliary frame vectors at `t = 0`, so
//! `D_km = int <psi_k(t)|V(t)|psi_m(t)> dt` with `psi_k(t) = U(t) mu_k(0)`.
//! The second-order term is `G = int [D'(t), D(t)] dt + D(tau)^2`, giving
//! `U' = U (I - i beta D - beta^2/2 G + O(beta^3))`.

use crate::error::{Error, Result};
use crate::linalg::{SquareOperator, StateVector, C64, I};
use crate::pulses::{ErrorModel, PulseSchedule};
use crate::simulate::sample_trajectory;

use super::frames::{initial_frame, COMPUTATIONAL_DIM};

/// Largest tolerated gap between the N- and N/2-step trapezoid sums before a
/// grid is declared too coarse.
const COARSE_GRID_TOL: f64 = 1e-3;

/// Error-sensitivity matrix expressed in the initial auxiliary frame.
#[derive(Debug, Clone)]
pub struct DMatrix {
    entries: SquareOperator,
    basis: Vec<StateVector>,
    computational_dim: usize,
}

impl DMatrix {
    /// Wraps a lab-frame operator, expressing it in `basis`.
    pub fn from_operator(op: &SquareOperator, basis: Vec<StateVector>) -> Self {
        Self {
            entries: op.in_basis(&basis),
            basis,
            computational_dim: COMPUTATIONAL_DIM,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn computational_dim(&self) -> usize {
        self.computational_dim
    }

    /// `D_km` in the auxiliary frame.
    pub fn get(&self, k: usize, m: usize) -> C64 {
        self.entries.get(k, m)
    }

    pub fn entries(&self) -> &SquareOperator {
        &self.entries
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    /// Back to the lab frame: `B D B^dagger`.
    pub fn operator(&self) -> SquareOperator {
        let n = self.dim();
        let mut out = SquareOperator::zeros(n);
        for (k, bk) in self.basis.iter().enumerate() {
            for (m, bm) in self.basis.iter().enumerate() {
                out = out + SquareOperator::outer(bk, bm).scale(self.entries.get(k, m));
            }
        }
        out
    }

    /// `sum_{m < M} sum_k |D_km|^2`.
    pub fn column_weight(&self, m_dim: usize) -> f64 {
        (0..m_dim.min(self.dim()))
            .flat_map(|m| (0..self.dim()).map(move |k| (k, m)))
            .map(|(k, m)| self.get(k, m).norm_sqr())
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.entries().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct MagnusTerms {
    pub d: DMatrix,
    /// Second-order term as a lab-frame operator.
    pub g: SquareOperator,
}

/// Toggling-frame integrand samples `U^dagger V U` for each segment.
fn toggled_samples(
    schedule: &PulseSchedule,
    error: &ErrorModel,
    steps_per_pi: usize,
) -> Result<Vec<(f64, Vec<SquareOperator>)>> {
    sample_trajectory(schedule, steps_per_pi)?
        .into_iter()
        .map(|seg| {
            let values = seg
                .grid
                .points()
                .zip(&seg.propagators)
                .map(|(t, u)| {
                    let v = error.noise_operator(&seg.hamiltonian, t)?;
                    Ok(u.adjoint() * v * *u)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((seg.grid.dt(), values))
        })
        .collect()
}

fn trapezoid(values: &[SquareOperator], dt: f64, stride: usize) -> SquareOperator {
    let n = values.len() - 1;
    let h = dt * stride as f64;
    let mut acc = values[0].scale_real(0.5) + values[n].scale_real(0.5);
    for k in (stride..n).step_by(stride) {
        acc = acc + values[k];
    }
    acc.scale_real(h)
}

/// `D` by trapezoidal quadrature on the boundary-aligned grid with one
/// Richardson step per segment.
pub fn d_matrix(
    schedule: &PulseSchedule,
    error: &ErrorModel,
    steps_per_pi: usize,
) -> Result<DMatrix> {
    let mut total = SquareOperator::zeros(schedule.dim());
    for (dt, values) in toggled_samples(schedule, error, steps_per_pi)? {
        let fine = trapezoid(&values, dt, 1);
        let coarse = trapezoid(&values, dt, 2);
        let difference = fine.max_abs_diff(&coarse);
        if difference > COARSE_GRID_TOL {
            return Err(Error::GridTooCoarse { difference });
        }
        total = total + (fine.scale_real(4.0) - coarse).scale_real(1.0 / 3.0);
    }
    Ok(DMatrix::from_operator(&total, initial_frame_or_identity(schedule)))
}

/// `D` for the global Rabi error from the per-segment closed form: within a
/// flat segment `U^dagger H U` is constant, so `D = sum_k T_k U_{k-1}^dagger H_k U_{k-1}`.
pub fn d_matrix_exact(schedule: &PulseSchedule) -> Result<DMatrix> {
    let op = exact_d_operator(schedule)?;
    Ok(DMatrix::from_operator(&op, initial_frame_or_identity(schedule)))
}

pub(crate) fn exact_d_operator(schedule: &PulseSchedule) -> Result<SquareOperator> {
    let mut u = SquareOperator::identity(schedule.dim());
    let mut total = SquareOperator::zeros(schedule.dim());
    for (k, seg) in schedule.segments().iter().enumerate() {
        let h = schedule.segment_hamiltonian(k);
        total = total + (u.adjoint() * h * u).scale_real(seg.duration);
        u = crate::linalg::mat_exp_hermitian(&h, seg.duration)? * u;
    }
    Ok(total)
}

fn initial_frame_or_identity(schedule: &PulseSchedule) -> Vec<StateVector> {
    if schedule.is_empty() {
        (0..schedule.dim())
            .map(|k| StateVector::basis(schedule.dim(), k))
            .collect()
    } else {
        initial_frame(schedule)
    }
}

/// First two Magnus/Dyson terms. `D(t)` is accumulated with the trapezoid
/// rule and `int [D', D] dt` likewise.
pub fn magnus_terms(
    schedule: &PulseSchedule,
    error: &ErrorModel,
    steps_per_pi: usize,
) -> Result<MagnusTerms> {
    let dim = schedule.dim();
    let mut d_run = SquareOperator::zeros(dim);
    let mut comm_int = SquareOperator::zeros(dim);
    for (dt, values) in toggled_samples(schedule, error, steps_per_pi)? {
        let mut prev_comm = values[0].commutator(&d_run);
        for pair in values.windows(2) {
            let d_next = d_run + (pair[0] + pair[1]).scale_real(0.5 * dt);
            let next_comm = pair[1].commutator(&d_next);
            comm_int = comm_int + (prev_comm + next_comm).scale_real(0.5 * dt);
            d_run = d_next;
            prev_comm = next_comm;
        }
    }
    let g = comm_int + d_run * d_run;
    Ok(MagnusTerms {
        d: DMatrix::from_operator(&d_run, initial_frame_or_identity(schedule)),
        g,
    })
}

/// `U_ideal (I - i beta D - beta^2/2 G)`.
pub fn magnus_gate_approx(
    u_ideal: &SquareOperator,
    terms: &MagnusTerms,
    beta: f64,
) -> SquareOperator {
    let dim = u_ideal.dim();
    let d = terms.d.operator();
    let bracket = SquareOperator::identity(dim) - d.scale(I * beta)
        - terms.g.scale_real(0.5 * beta * beta);
    *u_ideal * bracket
}
