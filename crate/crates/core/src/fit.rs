//! Linear least squares on small design matrices.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coeffs: Vec<f64>,
    /// Root-mean-square residual.
    pub rms: f64,
}

/// Fits `y ≈ Σ_j c_j φ_j(x)` for the basis functions `basis`.
pub fn least_squares(xs: &[f64], ys: &[f64], basis: &[fn(f64) -> f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < basis.len() {
        return Err(Error::InvalidArgument(format!(
            "least squares needs at least {} samples, got {}",
            basis.len(),
            xs.len()
        )));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite("least squares ordinate".into()));
    }
    let a = DMatrix::from_fn(xs.len(), basis.len(), |i, j| basis[j](xs[i]));
    let b = DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let c = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Invariant(format!("least squares: {e}")))?;
    let resid = &a * &c - &b;
    let rms = (resid.norm_squared() / xs.len() as f64).sqrt();
    Ok(LinearFit { coeffs: c.iter().copied().collect(), rms })
}
