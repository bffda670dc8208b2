//! Gate-fidelity measures.
//!
//! The projected-trace form is used directly; the state normalisation
//! coefficients that would rescale the projected block are dropped (their
//! effect is `O(beta^4)`).

use crate::error::{Error, Result};
use crate::linalg::SquareOperator;

use super::dmatrix::DMatrix;

fn check_subspace(m: usize, dim: usize) -> Result<()> {
    if m == 0 || m > dim {
        return Err(Error::SubspaceTooLarge { m, dim });
    }
    Ok(())
}

/// `(1/M) |Tr(P U_actual P U_target^dagger)|` on the leading `M x M` block.
pub fn gate_fidelity(u_actual: &SquareOperator, u_target: &SquareOperator, m: usize) -> Result<f64> {
    check_subspace(m, u_actual.dim())?;
    check_subspace(m, u_target.dim())?;
    let a = u_actual.block(m);
    let t = u_target.block(m);
    Ok((a * t.adjoint()).trace().norm() / m as f64)
}

/// Mean population leaving the leading `M`-dimensional subspace.
pub fn leakage(u: &SquareOperator, m: usize) -> Result<f64> {
    check_subspace(m, u.dim())?;
    let kept: f64 = (0..m)
        .flat_map(|j| (0..m).map(move |i| (i, j)))
        .map(|(i, j)| u.get(i, j).norm_sqr())
        .sum();
    Ok((1.0 - kept / m as f64).max(0.0))
}

/// `1 - beta^2/(2M) sum_{m<M} sum_k |D_km|^2`.
pub fn fidelity_prediction(d: &DMatrix, beta: f64, m: usize) -> Result<f64> {
    check_subspace(m, d.dim())?;
    Ok(1.0 - beta * beta / (2.0 * m as f64) * d.column_weight(m))
}
