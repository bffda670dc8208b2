//! Sweep orchestration and CSV output.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gates::{build, target_for, GateFamily, GateSpec};
use crate::linalg::SquareOperator;
use crate::lindblad::{closed_gate_fidelity, default_channels, open_gate_fidelity};
use crate::pulses::{ErrorModel, PulseSchedule};
use crate::robustness::{gate_fidelity, leakage, src_residual_any, COMPUTATIONAL_DIM};
use crate::simulate::{exact_propagator, propagate_schedule};

use super::config::SweepConfig;

pub const CSV_HEADER: &str = "family,beta,gamma,fidelity,infidelity,leakage,src_residual";
pub const GRID_CSV_HEADER: &str =
    "comparison,beta,gamma,fidelity_geometric,fidelity_dynamical,delta_f";

/// One evaluated `(family, beta, gamma)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateReport {
    pub family: GateFamily,
    pub beta: f64,
    pub gamma: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub leakage: f64,
    pub src_residual: f64,
}

/// A built schedule with its target.
#[derive(Debug, Clone)]
pub struct BuiltGate {
    pub family: GateFamily,
    pub schedule: PulseSchedule,
    pub target: SquareOperator,
}

impl BuiltGate {
    pub fn new(family: GateFamily, spec: &GateSpec) -> Result<Self> {
        Ok(Self {
            family,
            schedule: build(family, spec)?,
            target: target_for(family, spec),
        })
    }

    /// Closed-system fidelity under the global Rabi error. Two-level gates
    /// compare the qubit block with the target; Lambda gates compare the full
    /// three-level propagator with the error-free one.
    pub fn closed_fidelity(&self, beta: f64, steps_per_pi: usize) -> Result<f64> {
        let u = propagate_schedule(&self.schedule, &ErrorModel::global(beta)?, steps_per_pi)?;
        self.fidelity_of(&u)
    }

    /// Same metric from the per-segment closed-form propagator.
    pub fn closed_fidelity_exact(&self, beta: f64) -> Result<f64> {
        self.fidelity_of(&exact_propagator(&self.schedule, beta)?)
    }

    fn fidelity_of(&self, u: &SquareOperator) -> Result<f64> {
        if self.schedule.dim() == COMPUTATIONAL_DIM {
            gate_fidelity(u, &self.target, COMPUTATIONAL_DIM)
        } else {
            let u0 = exact_propagator(&self.schedule, 0.0)?;
            gate_fidelity(u, &u0, self.schedule.dim())
        }
    }

    /// Cardinal-state average fidelity; `gamma = 0` runs the closed system.
    pub fn cardinal_fidelity(&self, beta: f64, gamma: f64, steps_per_pi: usize) -> Result<f64> {
        let err = ErrorModel::global(beta)?;
        if gamma == 0.0 {
            let u = propagate_schedule(&self.schedule, &err, steps_per_pi)?;
            return Ok(closed_gate_fidelity(&u, &self.target));
        }
        let channels = default_channels(self.schedule.system(), gamma, gamma)?;
        open_gate_fidelity(&self.schedule, &err, &channels, &self.target, steps_per_pi)
    }

    pub fn src_residual(&self) -> Result<f64> {
        Ok(src_residual_any(&self.schedule)?.norm())
    }

    /// Full report: closed metric at `gamma = 0`, cardinal open-system metric
    /// otherwise.
    pub fn report(&self, beta: f64, gamma: f64, steps_per_pi: usize) -> Result<GateReport> {
        let u = propagate_schedule(&self.schedule, &ErrorModel::global(beta)?, steps_per_pi)?;
        let fidelity = if gamma == 0.0 {
            self.fidelity_of(&u)?
        } else {
            self.cardinal_fidelity(beta, gamma, steps_per_pi)?
        };
        Ok(GateReport {
            family: self.family,
            beta,
            gamma,
            fidelity,
            infidelity: 1.0 - fidelity,
            leakage: leakage(&u, COMPUTATIONAL_DIM)?,
            src_residual: self.src_residual()?,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<GateReport>,
}

fn fmt_float(x: f64) -> String {
    format!("{x:.12e}")
}

impl SweepResult {
    /// Rows ordered by `(family name, beta, gamma)`.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.family
                .name()
                .cmp(b.family.name())
                .then(a.beta.total_cmp(&b.beta))
                .then(a.gamma.total_cmp(&b.gamma))
        });
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.family.name(),
                fmt_float(r.beta),
                fmt_float(r.gamma),
                fmt_float(r.fidelity),
                fmt_float(r.infidelity),
                fmt_float(r.leakage),
                fmt_float(r.src_residual)
            );
        }
        out
    }

    pub fn find(&self, family: GateFamily, beta: f64, gamma: f64) -> Option<&GateReport> {
        self.rows
            .iter()
            .find(|r| r.family == family && r.beta == beta && r.gamma == gamma)
    }
}

/// Runs `f` inside a pool of `jobs` threads (0 = automatic).
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn build_all(families: &[GateFamily], spec: &GateSpec) -> Result<Vec<BuiltGate>> {
    families.iter().map(|&f| BuiltGate::new(f, spec)).collect()
}

/// Closed (`gamma = 0`) and open (`gamma > 0`) sweep over the config grid.
pub fn sweep_beta(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let gates = build_all(&config.families, &config.gate)?;
    let tasks: Vec<(usize, f64, f64)> = (0..gates.len())
        .flat_map(|g| {
            config
                .betas
                .iter()
                .flat_map(move |&b| config.gammas.iter().map(move |&gm| (g, b, gm)))
        })
        .collect();
    let rows = with_pool(config.jobs, || {
        tasks
            .par_iter()
            .map(|&(g, beta, gamma)| gates[g].report(beta, gamma, config.steps_per_pi))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut result = SweepResult { rows };
    result.sort();
    Ok(result)
}

/// `F_geometric - F_dynamical` at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub comparison: String,
    pub beta: f64,
    pub gamma: f64,
    pub fidelity_geometric: f64,
    pub fidelity_dynamical: f64,
    pub delta_f: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
}

impl GridResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(GRID_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.comparison,
                fmt_float(r.beta),
                fmt_float(r.gamma),
                fmt_float(r.fidelity_geometric),
                fmt_float(r.fidelity_dynamical),
                fmt_float(r.delta_f)
            );
        }
        out
    }
}

/// `Delta F` of SR-NGQC and NGQC against DG with the cardinal-state metric at
/// every `(beta, gamma)`.
pub fn sweep_grid(config: &SweepConfig) -> Result<GridResult> {
    config.validate()?;
    let families = [GateFamily::Dg, GateFamily::Ngqc, GateFamily::SrNgqc];
    let gates = build_all(&families, &config.gate)?;
    let tasks: Vec<(usize, f64, f64)> = (0..gates.len())
        .flat_map(|g| {
            config
                .betas
                .iter()
                .flat_map(move |&b| config.gammas.iter().map(move |&gm| (g, b, gm)))
        })
        .collect();
    let values = with_pool(config.jobs, || {
        tasks
            .par_iter()
            .map(|&(g, b, gm)| gates[g].cardinal_fidelity(b, gm, config.steps_per_pi))
            .collect::<Result<Vec<_>>>()
    })??;
    let per_family = config.betas.len() * config.gammas.len();
    let mut rows = Vec::new();
    for (geo, label) in [(2usize, "sr-ngqc-dg"), (1usize, "ngqc-dg")] {
        for (k, &(_, beta, gamma)) in tasks[..per_family].iter().enumerate() {
            let fg = values[geo * per_family + k];
            let fd = values[k];
            rows.push(GridRow {
                comparison: label.into(),
                beta,
                gamma,
                fidelity_geometric: fg,
                fidelity_dynamical: fd,
                delta_f: fg - fd,
            });
        }
    }
    rows.sort_by(|a, b| {
        a.comparison
            .cmp(&b.comparison)
            .then(a.beta.total_cmp(&b.beta))
            .then(a.gamma.total_cmp(&b.gamma))
    });
    Ok(GridResult { rows })
}
