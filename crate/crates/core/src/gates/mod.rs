//! Gate families as pulse schedules.
//!
//! | family  | system | NOT topology (areas)         | duration |
//! |---------|--------|------------------------------|----------|
//! | DG      | two    | single segment               | pi       |
//! | NGQC    | two    | orange slice at the axis     | 2 pi     |
//! | SR-NGQC | two    | 3 x pi from the pole         | 3 pi     |
//! | NHQC    | lambda | 2 x pi, jump at alpha = pi   | 2 pi     |
//! | SR-NHQC | lambda | 4 x pi                       | 4 pi     |
//!
//! Equatorial pi rotations are the only gates reachable by three pi pulses from
//! the pole, so other SR-NGQC specs use a 5-segment loop based at the axis
//! (areas `pi - theta, pi, pi, pi, theta`, duration `4 pi`).

mod solver;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{pauli_dot, SquareOperator, C64};
use crate::pulses::{PulseSchedule, PulseSegment, System};
use crate::robustness::{d_matrix_exact, src_residual_any, COMPUTATIONAL_DIM};
use crate::simulate::exact_propagator;

pub use solver::{levenberg_marquardt, multistart, seed_grid, Minimum, SolverOptions, SEED_GRID_ENV};

const AXIS_TOL: f64 = 1e-9;

/// Rotation `exp(i (angle/2) n . sigma)` about `n = (sin t cos p, sin t sin p, cos t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    pub theta: f64,
    pub phi: f64,
    pub angle: f64,
}

impl GateSpec {
    pub fn new(theta: f64, phi: f64, angle: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() || !angle.is_finite() {
            return Err(Error::Config(format!(
                "invalid gate spec theta={theta}, phi={phi}, angle={angle}"
            )));
        }
        Ok(Self { theta, phi, angle })
    }

    pub fn not() -> Self {
        Self { theta: FRAC_PI_2, phi: 0.0, angle: PI }
    }

    pub fn y() -> Self {
        Self { theta: FRAC_PI_2, phi: FRAC_PI_2, angle: PI }
    }

    pub fn z() -> Self {
        Self { theta: 0.0, phi: 0.0, angle: PI }
    }

    pub fn hadamard() -> Self {
        Self { theta: FRAC_PI_4, phi: 0.0, angle: PI }
    }

    /// `diag(1, i)` up to phase.
    pub fn s() -> Self {
        Self { theta: 0.0, phi: 0.0, angle: -FRAC_PI_2 }
    }

    /// `diag(1, e^{i pi/4})` up to phase.
    pub fn t() -> Self {
        Self { theta: 0.0, phi: 0.0, angle: -FRAC_PI_4 }
    }

    pub fn identity() -> Self {
        Self { theta: FRAC_PI_2, phi: 0.0, angle: 0.0 }
    }

    /// Named gate: `not`, `x`, `y`, `z`, `hadamard`/`h`, `s`, `t`, `id`.
    pub fn named(name: &str) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "not" | "x" => Self::not(),
            "y" => Self::y(),
            "z" => Self::z(),
            "hadamard" | "h" => Self::hadamard(),
            "s" => Self::s(),
            "t" => Self::t(),
            "id" | "identity" => Self::identity(),
            other => return Err(Error::Config(format!("unknown gate `{other}`"))),
        })
    }

    pub fn axis(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }

    pub fn is_equatorial(&self) -> bool {
        self.theta.cos().abs() < AXIS_TOL
    }

    fn is_trivial(&self) -> bool {
        (self.angle / 2.0).sin().abs() < AXIS_TOL
    }

    /// Equatorial pi rotation.
    fn is_not_class(&self) -> bool {
        self.is_equatorial() && (self.angle / 2.0).cos().abs() < AXIS_TOL
    }
}

/// `exp(i (angle/2) n . sigma)` on `{|0>, |1>}`.
pub fn target_unitary(spec: &GateSpec) -> SquareOperator {
    let half = spec.angle / 2.0;
    SquareOperator::identity(2).scale_real(half.cos())
        + pauli_dot(spec.axis()).scale(C64::new(0.0, half.sin()))
}

/// Target in the family's Hilbert space (embedded with `|e>` untouched).
pub fn target_for(family: GateFamily, spec: &GateSpec) -> SquareOperator {
    target_unitary(spec).embed(family.system().dim())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateFamily {
    Dg,
    Ngqc,
    SrNgqc,
    Nhqc,
    SrNhqc,
}

impl GateFamily {
    pub const ALL: [GateFamily; 5] = [
        GateFamily::Dg,
        GateFamily::Ngqc,
        GateFamily::SrNgqc,
        GateFamily::Nhqc,
        GateFamily::SrNhqc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateFamily::Dg => "dg",
            GateFamily::Ngqc => "ngqc",
            GateFamily::SrNgqc => "sr-ngqc",
            GateFamily::Nhqc => "nhqc",
            GateFamily::SrNhqc => "sr-nhqc",
        }
    }

    pub fn system(self) -> System {
        match self {
            GateFamily::Dg | GateFamily::Ngqc | GateFamily::SrNgqc => System::TwoLevel,
            GateFamily::Nhqc | GateFamily::SrNhqc => System::ThreeLevelLambda,
        }
    }

    /// NOT-gate duration with unit Rabi frequency.
    pub fn nominal_duration(self) -> f64 {
        match self {
            GateFamily::Dg => PI,
            GateFamily::Ngqc | GateFamily::Nhqc => 2.0 * PI,
            GateFamily::SrNgqc => 3.0 * PI,
            GateFamily::SrNhqc => 4.0 * PI,
        }
    }

    pub fn is_super_robust(self) -> bool {
        matches!(self, GateFamily::SrNgqc | GateFamily::SrNhqc)
    }

    pub fn is_geometric(self) -> bool {
        self != GateFamily::Dg
    }

    /// Subspace dimension used for the closed-system fidelity: the full
    /// three-level space for the Lambda families, the qubit otherwise.
    pub fn fidelity_dim(self) -> usize {
        self.system().dim()
    }
}

impl fmt::Display for GateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        GateFamily::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown gate family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Fixed(f64),
    Free(usize),
}

/// Fixed segment areas with phases that are either pinned or free.
#[derive(Debug, Clone)]
pub struct LoopAnsatz {
    system: System,
    theta: f64,
    phi: f64,
    areas: Vec<f64>,
    slots: Vec<Slot>,
    free: usize,
    enforce_src: bool,
}

impl LoopAnsatz {
    /// Every phase free; two-level frames start at `alpha0`, Lambda frames at
    /// `(theta, phi)`.
    pub fn free_phases(system: System, theta: f64, phi: f64, areas: Vec<f64>, enforce_src: bool) -> Self {
        let slots = (0..areas.len()).map(Slot::Free).collect();
        let free = areas.len();
        Self { system, theta, phi, areas, slots, free, enforce_src }
    }

    fn with_slots(system: System, theta: f64, phi: f64, parts: &[(f64, Slot)], enforce_src: bool) -> Self {
        let kept: Vec<(f64, Slot)> = parts.iter().copied().filter(|(a, _)| *a > AXIS_TOL).collect();
        let mut free = 0;
        for (_, s) in &kept {
            if let Slot::Free(k) = s {
                free = free.max(k + 1);
            }
        }
        Self {
            system,
            theta,
            phi,
            areas: kept.iter().map(|p| p.0).collect(),
            slots: kept.iter().map(|p| p.1).collect(),
            free,
            enforce_src,
        }
    }

    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn phases(&self, vars: &[f64]) -> Vec<f64> {
        self.slots
            .iter()
            .map(|s| match *s {
                Slot::Fixed(p) => p,
                Slot::Free(k) => vars[k].rem_euclid(TAU),
            })
            .collect()
    }

    pub fn schedule(&self, vars: &[f64]) -> Result<PulseSchedule> {
        let segments = self
            .areas
            .iter()
            .zip(self.phases(vars))
            .map(|(&a, p)| PulseSegment::with_area(a, p))
            .collect::<Result<Vec<_>>>()?;
        match self.system {
            System::TwoLevel => PulseSchedule::two_level(self.theta, segments),
            System::ThreeLevelLambda => PulseSchedule::lambda(self.theta, self.phi, segments),
        }
    }

    /// Stacked residual: gate (8), dynamical diagonal (2), SRC (2, optional).
    pub fn residual(&self, vars: &[f64], target: &SquareOperator) -> Result<Vec<f64>> {
        let schedule = self.schedule(vars)?;
        let mut out = gate_residual(&schedule, target)?;
        let d = d_matrix_exact(&schedule)?;
        for m in 0..COMPUTATIONAL_DIM {
            out.push(d.get(m, m).re);
        }
        if self.enforce_src {
            let s = src_residual_any(&schedule)?;
            out.push(s.re);
            out.push(s.im);
        }
        Ok(out)
    }
}

/// Entries of `P U P e^{-i arg Tr(T^dagger P U P)} - T` as (re, im) pairs.
fn gate_residual(schedule: &PulseSchedule, target: &SquareOperator) -> Result<Vec<f64>> {
    let u = exact_propagator(schedule, 0.0)?.block(COMPUTATIONAL_DIM);
    let t = target.block(COMPUTATIONAL_DIM);
    let overlap = (t.adjoint() * u).trace();
    let align = if overlap.norm() > 0.0 {
        (overlap / overlap.norm()).conj()
    } else {
        C64::new(1.0, 0.0)
    };
    Ok((u.scale(align) - t)
        .entries()
        .flat_map(|v| [v.re, v.im])
        .collect())
}

/// Phase-aligned distance `max |P U P - e^{i chi} T|`.
pub fn gate_distance(schedule: &PulseSchedule, target: &SquareOperator) -> Result<f64> {
    Ok(gate_residual(schedule, target)?
        .chunks(2)
        .map(|c| c[0].hypot(c[1]))
        .fold(0.0, f64::max))
}

fn ansatz(family: GateFamily, spec: &GateSpec) -> Result<LoopAnsatz> {
    use Slot::{Fixed, Free};
    let (t, p) = (spec.theta, spec.phi);
    Ok(match family {
        GateFamily::Dg => return Err(Error::Config("DG schedules are built in closed form".into())),
        GateFamily::Ngqc => LoopAnsatz::with_slots(
            System::TwoLevel,
            t,
            0.0,
            &[(PI - t, Free(0)), (PI, Free(1)), (t, Free(0))],
            false,
        ),
        GateFamily::SrNgqc if spec.is_not_class() => {
            LoopAnsatz::free_phases(System::TwoLevel, 0.0, 0.0, vec![PI; 3], true)
        }
        GateFamily::SrNgqc => LoopAnsatz::with_slots(
            System::TwoLevel,
            t,
            0.0,
            &[(PI - t, Free(0)), (PI, Free(1)), (PI, Free(2)), (PI, Free(3)), (t, Free(0))],
            true,
        ),
        GateFamily::Nhqc => LoopAnsatz::with_slots(
            System::ThreeLevelLambda,
            PI - t,
            (-p).rem_euclid(TAU),
            &[(PI, Fixed(0.0)), (PI, Free(0))],
            false,
        ),
        GateFamily::SrNhqc => LoopAnsatz::with_slots(
            System::ThreeLevelLambda,
            PI - t,
            (-p).rem_euclid(TAU),
            &[(PI, Fixed(0.0)), (PI, Free(0)), (PI, Free(1)), (PI, Free(2))],
            true,
        ),
    })
}

/// Solver outcome for one family and spec.
#[derive(Debug, Clone)]
pub struct PhaseJumpSolution {
    pub schedule: PulseSchedule,
    pub phases: Vec<f64>,
    /// `|SRC|` for the super-robust families, 0 for families that do not
    /// enforce it.
    pub residual_src: f64,
    pub residual_gate: f64,
    pub converged: bool,
}

fn dg_schedule(spec: &GateSpec) -> Result<PulseSchedule> {
    if spec.is_trivial() {
        return PulseSchedule::two_level(0.0, vec![]);
    }
    if !spec.is_equatorial() {
        return Err(Error::DetunedDrive(format!(
            "axis polar angle {} is off the equator",
            spec.theta
        )));
    }
    let gamma = crate::robustness::wrap_phase(spec.angle);
    let phase = if gamma > 0.0 { PI - spec.phi } else { -spec.phi };
    PulseSchedule::two_level(0.0, vec![PulseSegment::with_area(gamma.abs(), phase.rem_euclid(TAU))?])
}

/// Solves for the free phases with explicit options.
pub fn solve_phase_jumps_with(
    family: GateFamily,
    spec: &GateSpec,
    opts: &SolverOptions,
) -> Result<PhaseJumpSolution> {
    let target = target_for(family, spec);
    if family == GateFamily::Dg {
        let schedule = dg_schedule(spec)?;
        let residual_gate = gate_distance(&schedule, &target)?;
        return Ok(PhaseJumpSolution {
            phases: schedule.segments().iter().map(|s| s.phase).collect(),
            schedule,
            residual_src: 0.0,
            residual_gate,
            converged: residual_gate <= opts.tolerance,
        });
    }
    let ans = ansatz(family, spec)?;
    let f = |x: &[f64]| {
        ans.residual(x, &target)
            .unwrap_or_else(|_| vec![f64::MAX.sqrt(); 12])
    };
    let best = multistart(&f, ans.free_count(), opts);
    let schedule = ans.schedule(&best.x)?;
    let residual_src = if ans.enforce_src {
        src_residual_any(&schedule)?.norm()
    } else {
        0.0
    };
    Ok(PhaseJumpSolution {
        phases: ans.phases(&best.x),
        residual_gate: gate_distance(&schedule, &target)?,
        residual_src,
        converged: best.converged,
        schedule,
    })
}

/// Solves for the free phases, reading the seed spacing from the environment.
pub fn solve_phase_jumps(family: GateFamily, spec: &GateSpec) -> Result<PhaseJumpSolution> {
    solve_phase_jumps_with(family, spec, &SolverOptions::from_env()?)
}

/// Converged schedule or `SolverFailed`.
pub fn build(family: GateFamily, spec: &GateSpec) -> Result<PulseSchedule> {
    let sol = solve_phase_jumps(family, spec)?;
    if !sol.converged {
        return Err(Error::SolverFailed {
            family: family.name().into(),
            residual_src: sol.residual_src,
            residual_gate: sol.residual_gate,
        });
    }
    Ok(sol.schedule)
}

pub fn build_dg(spec: &GateSpec) -> Result<PulseSchedule> {
    build(GateFamily::Dg, spec)
}

pub fn build_ngqc(spec: &GateSpec) -> Result<PulseSchedule> {
    build(GateFamily::Ngqc, spec)
}

pub fn build_sr_ngqc(spec: &GateSpec) -> Result<PulseSchedule> {
    build(GateFamily::SrNgqc, spec)
}

pub fn build_nhqc(spec: &GateSpec) -> Result<PulseSchedule> {
    build(GateFamily::Nhqc, spec)
}

pub fn build_sr_nhqc(spec: &GateSpec) -> Result<PulseSchedule> {
    build(GateFamily::SrNhqc, spec)
}
