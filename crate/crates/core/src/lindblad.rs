//! Markovian open-system propagation.

use crate::error::{Error, Result};
use crate::linalg::{SquareOperator, StateVector, C64, I};
use crate::propagate::TimeGrid;
use crate::pulses::{apply_error, ErrorModel, PulseSchedule, System};
use crate::simulate::segment_grids;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct CollapseChannel {
    operator: SquareOperator,
    rate: f64,
}

impl CollapseChannel {
    pub fn new(operator: SquareOperator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) {
            return Err(Error::NegativeRate(rate));
        }
        Ok(Self { operator, rate })
    }

    pub fn operator(&self) -> &SquareOperator {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Decay and dephasing channels.
///
/// Two-level: `|0><1|` at `gamma1`, `|1><1|` at `gamma2`. Lambda system:
/// `|0><e|` and `|1><e|` at `gamma1 / 2` each, `|e><e|` at `gamma2`.
pub fn default_channels(system: System, gamma1: f64, gamma2: f64) -> Result<Vec<CollapseChannel>> {
    let ket = |dim, k| StateVector::basis(dim, k);
    let proj = |dim, i, j| SquareOperator::outer(&ket(dim, i), &ket(dim, j));
    match system {
        System::TwoLevel => Ok(vec![
            CollapseChannel::new(proj(2, 0, 1), gamma1)?,
            CollapseChannel::new(proj(2, 1, 1), gamma2)?,
        ]),
        System::ThreeLevelLambda => Ok(vec![
            CollapseChannel::new(proj(3, 0, 2), gamma1 / 2.0)?,
            CollapseChannel::new(proj(3, 1, 2), gamma1 / 2.0)?,
            CollapseChannel::new(proj(3, 2, 2), gamma2)?,
        ]),
    }
}

/// Validated density operator.
#[derive(Debug, Clone, Copy)]
pub struct DensityMatrix {
    rho: SquareOperator,
}

impl DensityMatrix {
    pub fn new(rho: SquareOperator) -> Result<Self> {
        let dm = Self { rho };
        dm.validate()?;
        Ok(dm)
    }

    pub fn pure(psi: &StateVector) -> Result<Self> {
        Self::new(SquareOperator::outer(psi, psi))
    }

    pub fn operator(&self) -> &SquareOperator {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `<psi|rho|psi>`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        self.rho.matrix_element(psi, psi).re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let herm = (self.rho + self.rho.adjoint()).scale_real(0.5);
        Ok(herm.eigh()?.0[0])
    }

    fn check_trace_and_hermiticity(rho: &SquareOperator) -> Result<()> {
        let herm = rho.hermiticity_error();
        if herm >= HERMITIAN_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix Hermiticity error {herm:.3e}"
            )));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() >= TRACE_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix trace {:.12} deviates from 1",
                tr.re
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        Self::check_trace_and_hermiticity(&self.rho)?;
        let min = self.min_eigenvalue()?;
        if min < -POSITIVITY_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix eigenvalue {min:.3e} is negative"
            )));
        }
        Ok(())
    }
}

fn check_dims(rho: &SquareOperator, h: &SquareOperator, channels: &[CollapseChannel]) -> Result<()> {
    let dim = rho.dim();
    for d in std::iter::once(h.dim()).chain(channels.iter().map(|c| c.operator.dim())) {
        if d != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: d });
        }
    }
    Ok(())
}

fn rhs_unchecked(rho: &SquareOperator, h: &SquareOperator, channels: &[CollapseChannel]) -> SquareOperator {
    let mut out = h.commutator(rho).scale(-I);
    for ch in channels {
        if ch.rate == 0.0 {
            continue;
        }
        let l = ch.operator;
        let ld = l.adjoint();
        let jump = l * *rho * ld - (ld * l).anticommutator(rho).scale_real(0.5);
        out = out + jump.scale_real(ch.rate);
    }
    out
}

/// `-i[H, rho] + sum_j G_j (L rho L^dagger - {L^dagger L, rho}/2)`.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    h: &SquareOperator,
    channels: &[CollapseChannel],
) -> Result<SquareOperator> {
    check_dims(&rho.rho, h, channels)?;
    Ok(rhs_unchecked(&rho.rho, h, channels))
}

fn rk4_step(
    rho: &SquareOperator,
    h: [&SquareOperator; 3],
    channels: &[CollapseChannel],
    dt: f64,
) -> SquareOperator {
    let k1 = rhs_unchecked(rho, h[0], channels);
    let k2 = rhs_unchecked(&(*rho + k1.scale_real(0.5 * dt)), h[1], channels);
    let k3 = rhs_unchecked(&(*rho + k2.scale_real(0.5 * dt)), h[1], channels);
    let k4 = rhs_unchecked(&(*rho + k3.scale_real(dt)), h[2], channels);
    *rho + (k1 + k2.scale_real(2.0) + k3.scale_real(2.0) + k4).scale_real(dt / 6.0)
}

/// The RK4 step is linear in `rho`; for a constant generator it is tabulated
/// once as a `dim^2 x dim^2` map.
struct StepMap {
    dim: usize,
    columns: Vec<SquareOperator>,
}

impl StepMap {
    fn new(h: &SquareOperator, channels: &[CollapseChannel], dt: f64) -> Self {
        let dim = h.dim();
        let columns = (0..dim * dim)
            .map(|idx| {
                let mut e = SquareOperator::zeros(dim);
                e.set(idx / dim, idx % dim, C64::new(1.0, 0.0));
                rk4_step(&e, [h, h, h], channels, dt)
            })
            .collect();
        Self { dim, columns }
    }

    fn apply(&self, rho: &SquareOperator) -> SquareOperator {
        let mut out = SquareOperator::zeros(self.dim);
        for (idx, col) in self.columns.iter().enumerate() {
            let c = rho.get(idx / self.dim, idx % self.dim);
            if c != C64::new(0.0, 0.0) {
                out = out + col.scale(c);
            }
        }
        out
    }
}

fn rk4_segment<F>(
    hamiltonian_at: &F,
    channels: &[CollapseChannel],
    grid: &TimeGrid,
    rho0: SquareOperator,
    constant: bool,
) -> Result<SquareOperator>
where
    F: Fn(f64) -> Result<SquareOperator>,
{
    let dt = grid.dt();
    let mut rho = rho0;
    let h_start = hamiltonian_at(grid.t_start())?;
    check_dims(&rho, &h_start, channels)?;
    let map = constant.then(|| StepMap::new(&h_start, channels, dt));
    for k in 0..grid.steps() {
        rho = match &map {
            Some(m) => m.apply(&rho),
            None => {
                let t = grid.point(k);
                let h0 = hamiltonian_at(t)?;
                let hm = hamiltonian_at(t + 0.5 * dt)?;
                let h1 = hamiltonian_at(grid.point(k + 1))?;
                check_dims(&rho, &h0, channels)?;
                rk4_step(&rho, [&h0, &hm, &h1], channels, dt)
            }
        };
        DensityMatrix::check_trace_and_hermiticity(&rho)?;
    }
    Ok(rho)
}

/// Classical RK4 over `grid`. Trace and Hermiticity are checked after every
/// step, positivity at the end.
pub fn propagate_density<F>(
    hamiltonian_at: F,
    channels: &[CollapseChannel],
    grid: &TimeGrid,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix>
where
    F: Fn(f64) -> SquareOperator,
{
    let rho = rk4_segment(&|t| Ok(hamiltonian_at(t)), channels, grid, rho0.rho, false)?;
    DensityMatrix::new(rho)
}

/// Open-system evolution of a schedule under `error`, one boundary-aligned
/// grid per segment.
pub fn propagate_schedule_density(
    schedule: &PulseSchedule,
    error: &ErrorModel,
    channels: &[CollapseChannel],
    steps_per_pi: usize,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    let mut rho = rho0.rho;
    for (k, grid) in segment_grids(schedule, steps_per_pi)?.iter().enumerate() {
        let h = schedule.segment_hamiltonian(k);
        rho = rk4_segment(&|t| apply_error(&h, error, t), channels, grid, rho, error.is_global())?;
    }
    DensityMatrix::new(rho)
}

/// The six cardinal Bloch states `|0>, |1>, |+>, |->, |+i>, |-i>`, embedded in
/// `dim` dimensions.
pub fn cardinal_states(dim: usize) -> Vec<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pairs = [
        (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        (C64::new(h, 0.0), C64::new(h, 0.0)),
        (C64::new(h, 0.0), C64::new(-h, 0.0)),
        (C64::new(h, 0.0), C64::new(0.0, h)),
        (C64::new(h, 0.0), C64::new(0.0, -h)),
    ];
    pairs
        .iter()
        .map(|&(a, b)| {
            let mut v = StateVector::zeros(dim);
            v[0] = a;
            v[1] = b;
            v
        })
        .collect()
}

/// Average of `<U_t psi|rho_out|U_t psi>` over the cardinal inputs. A 2x2
/// target is embedded on `{|0>, |1>}` for three-level schedules.
pub fn open_gate_fidelity(
    schedule: &PulseSchedule,
    error: &ErrorModel,
    channels: &[CollapseChannel],
    target: &SquareOperator,
    steps_per_pi: usize,
) -> Result<f64> {
    let dim = schedule.dim();
    let target = if target.dim() == dim { *target } else { target.embed(dim) };
    let states = cardinal_states(dim);
    let mut total = 0.0;
    for psi in &states {
        let rho0 = DensityMatrix::pure(psi)?;
        let rho = propagate_schedule_density(schedule, error, channels, steps_per_pi, &rho0)?;
        total += rho.expectation(&target.apply(psi));
    }
    Ok(total / states.len() as f64)
}

/// Same metric for a closed system with propagator `u`.
pub fn closed_gate_fidelity(u: &SquareOperator, target: &SquareOperator) -> f64 {
    let dim = u.dim();
    let target = if target.dim() == dim { *target } else { target.embed(dim) };
    let states = cardinal_states(dim);
    states
        .iter()
        .map(|psi| target.apply(psi).inner(&u.apply(psi)).norm_sqr())
        .sum::<f64>()
        / states.len() as f64
}
