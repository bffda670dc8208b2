//! Time-ordered propagation with midpoint-sampled piecewise exponentials.

use crate::error::{Error, Result};
use crate::linalg::{mat_exp_hermitian, SquareOperator, StateVector, UNITARY_TOL};

/// Uniform grid on `[t_start, t_end]` with `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::ZeroSteps);
        }
        if !(t_end > t_start) {
            return Err(Error::InvalidGrid { t_start, t_end });
        }
        Ok(Self {
            t_start,
            t_end,
            steps,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps as f64
    }

    /// Grid point `k` in `0..=steps`; the last point is exactly `t_end`.
    pub fn point(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_end
        } else {
            self.t_start + k as f64 * self.dt()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |k| self.point(k))
    }

    fn midpoint(&self, k: usize) -> f64 {
        0.5 * (self.point(k) + self.point(k + 1))
    }
}

/// Iterates the per-step propagators `exp(-i H(t_mid) dt)`, reusing the last
/// exponential while the sampled Hamiltonian is unchanged.
struct StepExponentials<'a, F> {
    hamiltonian_at: &'a F,
    grid: &'a TimeGrid,
    k: usize,
    cache: Option<(SquareOperator, SquareOperator)>,
}

impl<F: Fn(f64) -> SquareOperator> Iterator for StepExponentials<'_, F> {
    type Item = Result<SquareOperator>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.k >= self.grid.steps() {
            return None;
        }
        let t = self.grid.midpoint(self.k);
        self.k += 1;
        let h = (self.hamiltonian_at)(t);
        if h.has_nan() {
            return Some(Err(Error::NanHamiltonian { t }));
        }
        if let Some((cached_h, step)) = &self.cache {
            if *cached_h == h {
                return Some(Ok(*step));
            }
        }
        let step = match mat_exp_hermitian(&h, self.grid.dt()) {
            Ok(s) => s,
            Err(e) => return Some(Err(e)),
        };
        self.cache = Some((h, step));
        Some(Ok(step))
    }
}

fn steps<'a, F: Fn(f64) -> SquareOperator>(
    hamiltonian_at: &'a F,
    grid: &'a TimeGrid,
) -> StepExponentials<'a, F> {
    StepExponentials {
        hamiltonian_at,
        grid,
        k: 0,
        cache: None,
    }
}

/// Time-ordered product of step exponentials over `grid`; later steps
/// multiply from the left.
pub fn propagate_unitary<F>(hamiltonian_at: F, grid: &TimeGrid) -> Result<SquareOperator>
where
    F: Fn(f64) -> SquareOperator,
{
    let dim = hamiltonian_at(grid.t_start()).dim();
    let mut u = SquareOperator::identity(dim);
    for step in steps(&hamiltonian_at, grid) {
        u = step? * u;
    }
    let err = u.unitarity_error();
    if err >= UNITARY_TOL {
        return Err(Error::InvariantViolation(format!(
            "propagator unitarity error {err:.3e}"
        )));
    }
    Ok(u)
}

/// State trajectory sampled at every grid point (`steps + 1` samples).
pub fn propagate_state<F>(
    hamiltonian_at: F,
    grid: &TimeGrid,
    psi0: &StateVector,
) -> Result<Vec<StateVector>>
where
    F: Fn(f64) -> SquareOperator,
{
    let norm0 = psi0.norm();
    if (norm0 - 1.0).abs() > 1e-9 {
        return Err(Error::InvariantViolation(format!(
            "initial state norm {norm0:.12} is not 1"
        )));
    }
    let mut out = Vec::with_capacity(grid.steps() + 1);
    let mut psi = *psi0;
    out.push(psi);
    for step in steps(&hamiltonian_at, grid) {
        psi = step?.apply(&psi);
        out.push(psi);
    }
    let last = out.last().map(StateVector::norm).unwrap_or(1.0);
    if (last - 1.0).abs() > 1e-9 {
        return Err(Error::InvariantViolation(format!(
            "state norm drifted to {last:.12}"
        )));
    }
    Ok(out)
}
