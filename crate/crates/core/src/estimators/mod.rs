//! Quadrature estimators for drift, entropy and mutual information, their
//! asymptotic rates, and the inequality report.
//!
//! Rates are extrapolated by least squares over a time grid:
//! `ℓ_t ≈ ℓt + b√t + c` and `h_t ≈ ht + a·log t + c + d/t`. Both bases
//! reproduce flat space exactly (rate 0), and on hyperbolic spaces they
//! remove the `O(1)` offset and the `½·log t` entropy term that bias the
//! plain ratio and increment.

mod report;

pub use report::{
    ensemble_drift, finite_dim_bound_check, inequality_report, normalized_slack, AsymptoticReport,
    Component, Ensemble, FiniteDimCheck, InequalityCheck, QuantityReport, ReportTarget,
    EQUALITY_TOL, FINITE_DIM_TOL, SLACK_TOL, ZERO_RATE_TOL,
};

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::heat_kernels::KernelEval;
use crate::model_spaces::ModelManifold;
use crate::quadrature::Tolerance;
use serde::Serialize;
use std::collections::BTreeMap;

type Space = ModelManifold<f64>;

fn kernel(space: &Space) -> Result<KernelEval<f64>> {
    let k = KernelEval::new(space)?;
    if !space.is_homogeneous() {
        return Err(Error::NoKernel(space.label()));
    }
    Ok(k)
}

fn tol() -> Tolerance<f64> {
    Tolerance::new(1e-12, 1e-12)
}

/// `ℓ_t = ∫ d(o,x) q(t,o,x) dx`.
pub fn expected_distance(space: &Space, t: f64) -> Result<f64> {
    let k = kernel(space)?;
    k.ensure_normalized(t)?;
    Ok(k.radial_integral(t, |r, lqa, _| r * lqa.exp(), tol())?.value)
}

/// The literal ratio `ℓ_t/t`.
pub fn drift_quadrature(space: &Space, t: f64) -> Result<f64> {
    Ok(expected_distance(space, t)? / t)
}

/// `h_t = −∫ q log q`.
pub fn entropy_quadrature(space: &Space, t: f64) -> Result<f64> {
    let k = kernel(space)?;
    k.ensure_normalized(t)?;
    Ok(k.radial_integral(t, |_, lqa, lq| -lq * lqa.exp(), tol())?.value)
}

/// `I_t^T = h_T − h_{T−t}` on a homogeneous space.
pub fn mutual_information(space: &Space, t: f64, big_t: f64) -> Result<f64> {
    if !(t > 0.0 && big_t > t) {
        return Err(Error::InvalidArgument(format!("need 0 < t < T, got t = {t}, T = {big_t}")));
    }
    let i = entropy_quadrature(space, big_t)? - entropy_quadrature(space, big_t - t)?;
    if i < -1e-8 {
        return Err(Error::Invariant(format!("negative mutual information {i} at t = {t}, T = {big_t}")));
    }
    Ok(i)
}

/// A rate read off a grid of `(t, value)` samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEstimate {
    /// Least-squares rate over the full grid.
    pub extrapolated: f64,
    /// Same fit restricted to the top half of the grid.
    pub extrapolated_top: f64,
    /// `value(t_max)/t_max`.
    pub ratio: f64,
    /// `(value(t_n) − value(t_{n−1}))/(t_n − t_{n−1})`.
    pub increment: f64,
    pub residual: f64,
    /// Full-grid and top-half fits agree within 10% relative + 0.02.
    pub converged: bool,
    pub samples: Vec<(f64, f64)>,
}

impl RateEstimate {
    /// Uncertainty of the extrapolation: spread of the two fits.
    pub fn halfwidth(&self) -> f64 {
        (self.extrapolated - self.extrapolated_top).abs().max(1e-9)
    }
}

fn rate(samples: Vec<(f64, f64)>, basis: &[fn(f64) -> f64]) -> Result<RateEstimate> {
    let n = samples.len();
    if n < basis.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "time grid needs at least {} points, got {n}",
            basis.len() + 1
        )));
    }
    let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let vs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let full = least_squares(&ts, &vs, basis)?;
    let lo = (n / 2).min(n - basis.len());
    let top = least_squares(&ts[lo..], &vs[lo..], basis)?;
    let (a, b) = (full.coeffs[0], top.coeffs[0]);
    Ok(RateEstimate {
        extrapolated: a,
        extrapolated_top: b,
        ratio: vs[n - 1] / ts[n - 1],
        increment: (vs[n - 1] - vs[n - 2]) / (ts[n - 1] - ts[n - 2]),
        residual: full.rms,
        converged: (a - b).abs() <= 0.1 * a.abs().max(b.abs()) + 0.02,
        samples,
    })
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 4 {
        return Err(Error::InvalidArgument(format!("time grid needs at least 4 points, got {}", t_grid.len())));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || !(t_grid[0] > 0.0) {
        return Err(Error::InvalidArgument("time grid must be positive and increasing".into()));
    }
    Ok(())
}

/// Subadditivity audit entry `L_{s+t} − L_s − L_t > tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditivityViolation {
    pub s: f64,
    pub t: f64,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftLimit {
    pub rate: RateEstimate,
    /// `ℓ_{t_max}/t_max`.
    pub ell_hat: f64,
    /// `ℓ_t/t` is non-increasing along the grid.
    pub ratio_monotone: bool,
    pub violations: Vec<SubadditivityViolation>,
}

/// Tolerance of the subadditivity audit.
pub const SUBADDITIVITY_TOL: f64 = 1e-6;

/// Drift rate from `ℓ_t` on `t_grid`, with the audit
/// `L_{s+t} ≤ L_s + L_t + tol` over all grid pairs.
pub fn drift_subadditive_limit(space: &Space, t_grid: &[f64]) -> Result<DriftLimit> {
    check_grid(t_grid)?;
    let mut cache = BTreeMap::new();
    let mut ell = |t: f64| -> Result<f64> {
        if let Some(v) = cache.get(&t.to_bits()) {
            return Ok(*v);
        }
        let v = expected_distance(space, t)?;
        cache.insert(t.to_bits(), v);
        Ok(v)
    };
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        samples.push((t, ell(t)?));
    }
    let mut violations = vec![];
    for (i, &s) in t_grid.iter().enumerate() {
        for &t in &t_grid[i..] {
            let excess = ell(s + t)? - ell(s)? - ell(t)?;
            if excess > SUBADDITIVITY_TOL {
                violations.push(SubadditivityViolation { s, t, excess });
            }
        }
    }
    let ratio_monotone = samples.windows(2).all(|w| w[1].1 / w[1].0 <= w[0].1 / w[0].0 + 1e-12);
    let rate = rate(samples, &[|t| t, |t| t.sqrt(), |_| 1.0])?;
    Ok(DriftLimit { ell_hat: rate.ratio, ratio_monotone, violations, rate })
}

/// Entropy rate `h` from `h_t` on `t_grid`.
pub fn entropy_rate(space: &Space, t_grid: &[f64]) -> Result<RateEstimate> {
    check_grid(t_grid)?;
    let samples = t_grid
        .iter()
        .map(|&t| Ok((t, entropy_quadrature(space, t)?)))
        .collect::<Result<Vec<_>>>()?;
    rate(samples, &[|t| t, |t| t.ln(), |_| 1.0, |t| 1.0 / t])
}

/// Default time grid `{40, 45, …, 80}/k²`, so every space is probed at the
/// same natural time.
pub fn default_t_grid(space: &Space) -> Vec<f64> {
    let k = space.curvature_scale();
    let scale = if k > 0.0 { 1.0 / (k * k) } else { 1.0 };
    (0..9).map(|i| (40.0 + 5.0 * i as f64) * scale).collect()
}
