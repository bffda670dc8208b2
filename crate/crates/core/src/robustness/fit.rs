//! Power-law fits of infidelity against error strength.

use crate::error::{Error, Result};

/// Least-squares slope of `log(1 - F)` against `log |beta|`.
pub fn order_fit(betas: &[f64], infidelities: &[f64]) -> Result<f64> {
    if betas.len() != infidelities.len() || betas.len() < 2 {
        return Err(Error::InvalidFitInput(format!(
            "need at least two paired points, got {} betas and {} infidelities",
            betas.len(),
            infidelities.len()
        )));
    }
    if let Some(b) = betas.iter().find(|b| !(**b > 0.0)) {
        return Err(Error::InvalidFitInput(format!("beta {b} is not positive")));
    }
    if let Some(y) = infidelities.iter().find(|y| !(**y > 1e-12)) {
        return Err(Error::InvalidFitInput(format!("infidelity {y} is not above 1e-12")));
    }
    let xs: Vec<f64> = betas.iter().map(|b| b.ln()).collect();
    let ys: Vec<f64> = infidelities.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidFitInput("all betas are equal".into()));
    }
    Ok(sxy / sxx)
}

/// Coefficients `(c2, c4)` of `1 - F = c2 beta^2 + c4 beta^4` by least squares.
pub fn quadratic_quartic_fit(betas: &[f64], infidelities: &[f64]) -> Result<(f64, f64)> {
    if betas.len() != infidelities.len() {
        return Err(Error::InvalidFitInput("length mismatch".into()));
    }
    let (mut a, mut b, mut c, mut r2, mut r4) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in betas.iter().zip(infidelities) {
        let (x2, x4) = (x * x, x.powi(4));
        a += x2 * x2;
        b += x2 * x4;
        c += x4 * x4;
        r2 += x2 * y;
        r4 += x4 * y;
    }
    let det = a * c - b * b;
    if det.abs() <= f64::EPSILON * a * c {
        return Err(Error::InvalidFitInput(
            "need at least two distinct nonzero |beta| values".into(),
        ));
    }
    Ok(((r2 * c - r4 * b) / det, (a * r4 - b * r2) / det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_power_laws() {
        let betas = [0.02, 0.04, 0.06, 0.08, 0.1];
        let quad: Vec<f64> = betas.iter().map(|b| 1.7 * b * b).collect();
        let quart: Vec<f64> = betas.iter().map(|b| 3.0 * b.powi(4)).collect();
        assert!((order_fit(&betas, &quad).unwrap() - 2.0).abs() < 1e-9);
        assert!((order_fit(&betas, &quart).unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn joint_fit_recovers_coefficients() {
        let betas: Vec<f64> = (-5..=5).map(|k| 0.01 * k as f64).collect();
        let y: Vec<f64> = betas.iter().map(|b| 1.2 * b * b - 4.0 * b.powi(4)).collect();
        let (c2, c4) = quadratic_quartic_fit(&betas, &y).unwrap();
        assert!((c2 - 1.2).abs() < 1e-9);
        assert!((c4 + 4.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(order_fit(&[0.1, -0.1], &[1e-3, 1e-3]).is_err());
        assert!(order_fit(&[0.1, 0.2], &[0.0, 1e-3]).is_err());
        assert!(order_fit(&[0.1], &[1e-3]).is_err());
        assert!(quadratic_quartic_fit(&[0.0, 0.0], &[0.0, 0.0]).is_err());
    }
}
