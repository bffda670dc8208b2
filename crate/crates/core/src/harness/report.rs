//! Text reports: NOT-gate robustness table and SRC checks.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::Result;
use crate::gates::{GateFamily, GateSpec};
use crate::robustness::{order_fit, quadratic_quartic_fit, src_residual_numeric};

use super::config::linspace;
use super::sweep::{with_pool, BuiltGate};

pub const COEFFICIENT_TOL: f64 = 0.03;
pub const MIN_QUARTIC_SLOPE: f64 = 3.7;
pub const MAX_SR_INFIDELITY: f64 = 5e-3;
pub const SRC_TOL: f64 = 1e-6;
pub const SRC_AGREEMENT_TOL: f64 = 1e-7;

/// Expected robustness law of a family's NOT gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    Quadratic(f64),
    Quartic,
}

pub fn expected_law(family: GateFamily) -> Law {
    match family {
        GateFamily::Dg | GateFamily::Ngqc => Law::Quadratic(PI * PI / 8.0),
        GateFamily::Nhqc => Law::Quadratic(PI * PI / 3.0),
        GateFamily::SrNgqc | GateFamily::SrNhqc => Law::Quartic,
    }
}

/// Symmetric grid on `[-0.05, 0.05]` without `beta = 0`.
pub fn quadratic_fit_betas() -> Vec<f64> {
    linspace(-0.05, 0.05, 11).into_iter().filter(|b| b.abs() > 1e-12).collect()
}

pub fn quartic_fit_betas() -> Vec<f64> {
    linspace(0.02, 0.1, 5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub family: GateFamily,
    pub duration: f64,
    pub nominal_duration: f64,
    pub quadratic_coefficient: f64,
    pub slope: f64,
    pub infidelity_at_0p1: f64,
    pub pass: bool,
}

impl Table1Row {
    fn expectation(&self) -> String {
        match expected_law(self.family) {
            Law::Quadratic(c) => format!("c2 = {c:.6}"),
            Law::Quartic => format!("slope >= {MIN_QUARTIC_SLOPE}"),
        }
    }
}

pub fn table1_row(family: GateFamily, steps_per_pi: usize) -> Result<Table1Row> {
    let gate = BuiltGate::new(family, &GateSpec::not())?;
    let qb = quadratic_fit_betas();
    let qy = qb
        .iter()
        .map(|&b| gate.closed_fidelity(b, steps_per_pi).map(|f| 1.0 - f))
        .collect::<Result<Vec<_>>>()?;
    let (c2, _) = quadratic_quartic_fit(&qb, &qy)?;
    let sb = quartic_fit_betas();
    let sy = sb
        .iter()
        .map(|&b| gate.closed_fidelity(b, steps_per_pi).map(|f| 1.0 - f))
        .collect::<Result<Vec<_>>>()?;
    let slope = order_fit(&sb, &sy)?;
    let infidelity_at_0p1 = *sy.last().expect("fit grid is non-empty");
    let duration = gate.schedule.duration();
    let nominal_duration = family.nominal_duration();
    let law_ok = match expected_law(family) {
        Law::Quadratic(c) => ((c2 - c) / c).abs() <= COEFFICIENT_TOL,
        Law::Quartic => slope >= MIN_QUARTIC_SLOPE && infidelity_at_0p1 <= MAX_SR_INFIDELITY,
    };
    Ok(Table1Row {
        family,
        duration,
        nominal_duration,
        quadratic_coefficient: c2,
        slope,
        infidelity_at_0p1,
        pass: law_ok && (duration - nominal_duration).abs() < 1e-9,
    })
}

pub fn table1(steps_per_pi: usize, jobs: usize) -> Result<Vec<Table1Row>> {
    with_pool(jobs, || {
        GateFamily::ALL
            .par_iter()
            .map(|&f| table1_row(f, steps_per_pi))
            .collect::<Result<Vec<_>>>()
    })?
}

pub fn format_table1(rows: &[Table1Row]) -> String {
    let mut out = String::from(
        "family   gate_time/pi  expected_time/pi  c2_fit        slope   1-F(0.1)      expected          result\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<8} {:>12.6} {:>17.6}  {:<12.6e}  {:>6.3}  {:<12.6e}  {:<16}  {}",
            r.family.name(),
            r.duration / PI,
            r.nominal_duration / PI,
            r.quadratic_coefficient,
            r.slope,
            r.infidelity_at_0p1,
            r.expectation(),
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrcCheck {
    pub family: GateFamily,
    pub closed_form: f64,
    pub agreement: f64,
    pub pass: bool,
}

/// Closed-form SRC against the D-matrix entry for every geometric family;
/// the super-robust families must also satisfy `|SRC| <= 1e-6`.
pub fn check_src(spec: &GateSpec) -> Result<Vec<SrcCheck>> {
    GateFamily::ALL
        .iter()
        .filter(|f| f.is_geometric())
        .map(|&family| {
            let gate = BuiltGate::new(family, spec)?;
            let closed = crate::robustness::src_residual_any(&gate.schedule)?;
            let numeric = src_residual_numeric(&gate.schedule)?;
            let agreement = (closed - numeric).norm();
            let small = !family.is_super_robust() || closed.norm() <= SRC_TOL;
            Ok(SrcCheck {
                family,
                closed_form: closed.norm(),
                agreement,
                pass: small && agreement <= SRC_AGREEMENT_TOL,
            })
        })
        .collect()
}

pub fn format_src(rows: &[SrcCheck]) -> String {
    let mut out = String::from("family   |src|                 |closed - d_matrix|    result\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<8} {:<20.12e}  {:<20.12e}  {}",
            r.family.name(),
            r.closed_form,
            r.agreement,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}
