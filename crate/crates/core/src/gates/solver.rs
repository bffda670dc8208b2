//! Damped Gauss-Newton (Levenberg-Marquardt) with a deterministic multistart.

use std::f64::consts::PI;

use log::debug;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const SEED_GRID_ENV: &str = "GEOROBUST_SEED_GRID";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Seeds are placed at multiples of `pi / seed_divisions`.
    pub seed_divisions: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            seed_divisions: 6,
            max_iterations: 200,
            tolerance: 1e-6,
        }
    }
}

impl SolverOptions {
    /// Defaults, with the seed spacing overridden by `GEOROBUST_SEED_GRID`.
    pub fn from_env() -> Result<Self> {
        let mut opts = Self::default();
        if let Ok(raw) = std::env::var(SEED_GRID_ENV) {
            let n: usize = raw.trim().parse().map_err(|_| {
                Error::Config(format!("{SEED_GRID_ENV} must be a positive integer, got `{raw}`"))
            })?;
            if n == 0 {
                return Err(Error::Config(format!("{SEED_GRID_ENV} must be positive")));
            }
            opts.seed_divisions = n;
        }
        Ok(opts)
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    /// Largest absolute residual component.
    pub max_residual: f64,
    pub seed_index: usize,
    pub converged: bool,
}

fn inf_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Forward-difference Jacobian.
fn jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: &F, x: &[f64], r0: &[f64]) -> DMatrix<f64> {
    let h = 1e-7;
    let mut jac = DMatrix::zeros(r0.len(), x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        xp[j] = x[j] + h;
        let r = f(&xp);
        for i in 0..r0.len() {
            jac[(i, j)] = (r[i] - r0[i]) / h;
        }
        xp[j] = x[j];
    }
    jac
}

/// Levenberg-Marquardt from `x0`. Returns the final point and residual.
pub fn levenberg_marquardt<F>(f: &F, x0: &[f64], opts: &SolverOptions) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x);
    if x.is_empty() {
        return (x, r);
    }
    let mut cost = sum_sq(&r);
    let mut lambda = 1e-3;
    for _ in 0..opts.max_iterations {
        if inf_norm(&r) <= 1e-13 {
            break;
        }
        let jac = jacobian(f, &x, &r);
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&r);
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for i in 0..x.len() {
                a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rt = f(&trial);
            let ct = sum_sq(&rt);
            if ct < cost {
                x = trial;
                r = rt;
                cost = ct;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, r)
}

/// Seeds on the grid `k pi / N`, `k = 0..2N`, in lexicographic order.
pub fn seed_grid(n_vars: usize, divisions: usize) -> impl Iterator<Item = Vec<f64>> {
    let per_axis = 2 * divisions;
    let total = per_axis.pow(n_vars as u32);
    (0..total).map(move |mut idx| {
        let mut seed = vec![0.0; n_vars];
        for slot in seed.iter_mut().rev() {
            *slot = (idx % per_axis) as f64 * PI / divisions as f64;
            idx /= per_axis;
        }
        seed
    })
}

/// Runs LM from every seed in order; the first converged seed wins, otherwise
/// the best residual is returned.
pub fn multistart<F>(f: &F, n_vars: usize, opts: &SolverOptions) -> Minimum
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut best: Option<Minimum> = None;
    for (seed_index, seed) in seed_grid(n_vars, opts.seed_divisions).enumerate() {
        let (x, r) = levenberg_marquardt(f, &seed, opts);
        let max_residual = inf_norm(&r);
        let converged = max_residual <= opts.tolerance;
        if converged {
            debug!("seed {seed_index} converged with residual {max_residual:.3e}");
            return Minimum {
                x,
                max_residual,
                seed_index,
                converged,
            };
        }
        if best.as_ref().is_none_or(|b| max_residual < b.max_residual) {
            best = Some(Minimum {
                x,
                max_residual,
                seed_index,
                converged,
            });
        }
    }
    best.expect("the seed grid is never empty")
}
