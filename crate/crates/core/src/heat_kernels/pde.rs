//! Explicit finite-volume solver for the radial forward equation
//! `∂_t ρ = ½ ∂_rr ρ − ∂_r(f ρ)`, `f = ½ p'/p`.
//!
//! The flux is written as `F = −½ p ∂_r(ρ/p)`, which makes the discrete
//! scheme exact on the stationary profile `ρ ∝ p` and needs only ratios of
//! `p`, taken through `ln p` so that fast-growing profiles stay finite.

use crate::error::{Error, Result};
use crate::model_spaces::ProfileFunction;
use crate::scalar::Real;
use std::fmt::Write as _;

/// Density of the radial process with respect to `dr` on a cell-centred grid.
#[derive(Debug, Clone)]
pub struct RadialDensityGrid<T> {
    pub dr: T,
    /// Cell centres `(i + ½)·dr`.
    pub r_grid: Vec<T>,
    pub t_grid: Vec<T>,
    /// `rho[j][i]` is the density at `t_grid[j]`, `r_grid[i]`.
    pub rho: Vec<Vec<T>>,
    pub mass: Vec<T>,
    /// Probability absorbed at `r_max` by the final time.
    pub leaked: T,
}

/// Number of stored snapshots, excluding `t = 0`.
const SNAPSHOTS: usize = 200;

/// Solves the forward equation from a point mass at `r0`.
///
/// A start `r0 < dr` is the pole limit and lands in the first cell;
/// otherwise the grid must resolve the start, `dr ≤ r0/10`.
pub fn radial_fokker_planck<T: Real>(
    profile: &ProfileFunction<T>,
    r0: T,
    dt: T,
    dr: T,
    t_max: T,
    r_max: T,
) -> Result<RadialDensityGrid<T>> {
    let (half, zero) = (T::lit(0.5), T::zero());
    if !(r0 > zero && dt > zero && dr > zero && t_max > zero && r_max > r0) {
        return Err(Error::InvalidArgument("need r0, dt, dr, t_max > 0 and r_max > r0".into()));
    }
    if r0 >= dr && dr > r0 / T::lit(10.0) {
        return Err(Error::InvalidArgument(format!("dr = {dr} does not resolve r0 = {r0} (need dr <= r0/10)")));
    }
    let n = (r_max / dr).ceil().to_usize().unwrap_or(0);
    if n < 2 {
        return Err(Error::InvalidArgument("grid needs at least two cells".into()));
    }
    let r_grid: Vec<T> = (0..n).map(|i| (T::from_usize_lossy(i) + half) * dr).collect();
    let ln_pc: Vec<T> = r_grid.iter().map(|&r| profile.ln_p(r)).collect();
    // interface i+½ sits at (i+1)·dr
    let ln_pf: Vec<T> = (0..n).map(|i| profile.ln_p(T::from_usize_lossy(i + 1) * dr)).collect();
    // out[i] = p_{i+½}/p_i, back[i] = p_{i+½}/p_{i+1}, inward[i] = p_{i−½}/p_i
    let out: Vec<T> = (0..n).map(|i| (ln_pf[i] - ln_pc[i]).exp()).collect();
    let back: Vec<T> = (0..n - 1).map(|i| (ln_pf[i] - ln_pc[i + 1]).exp()).collect();
    let inward: Vec<T> = (0..n).map(|i| if i == 0 { zero } else { (ln_pf[i - 1] - ln_pc[i]).exp() }).collect();
    if out.iter().chain(&back).chain(&inward).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("profile '{}' ratios on the grid", profile.label())));
    }

    let mut limit = T::lit(0.4) * dr * dr;
    for i in 0..n {
        let s = out[i] + inward[i];
        limit = limit.min(T::lit(2.0) * dr * dr / s);
    }
    if dt > limit {
        return Err(Error::Cfl { dt: dt.as_f64(), limit: limit.as_f64() });
    }

    let steps = (t_max / dt).round().to_usize().unwrap_or(0).max(1);
    let stride = (steps / SNAPSHOTS).max(1);
    let mut rho = vec![zero; n];
    let start = ((r0 / dr).floor().to_usize().unwrap_or(0)).min(n - 1);
    rho[start] = dr.recip();

    let mass_of = |rho: &[T]| rho.iter().fold(zero, |s, x| s + *x) * dr;
    let mut grid = RadialDensityGrid {
        dr,
        r_grid,
        t_grid: vec![zero],
        rho: vec![rho.clone()],
        mass: vec![mass_of(&rho)],
        leaked: zero,
    };
    let c = dt / (dr * dr) * half;
    let mut flux = vec![zero; n];
    for step in 1..=steps {
        // flux[i] = dt/dr · F_{i+½}
        for i in 0..n - 1 {
            flux[i] = -c * (rho[i + 1] * back[i] - rho[i] * out[i]);
        }
        flux[n - 1] = c * rho[n - 1] * out[n - 1];
        grid.leaked = grid.leaked + flux[n - 1] * dr;
        rho[0] = rho[0] - flux[0];
        for i in 1..n {
            rho[i] = rho[i] - (flux[i] - flux[i - 1]);
        }
        if step % stride == 0 || step == steps {
            grid.t_grid.push(dt * T::from_usize_lossy(step));
            grid.mass.push(mass_of(&rho));
            grid.rho.push(rho.clone());
        }
    }
    Ok(grid)
}

impl<T: Real> RadialDensityGrid<T> {
    /// Index of the stored snapshot closest to `t`.
    pub fn snapshot(&self, t: T) -> usize {
        let mut best = 0;
        for (j, &tj) in self.t_grid.iter().enumerate() {
            if (tj - t).abs() < (self.t_grid[best] - t).abs() {
                best = j;
            }
        }
        best
    }

    /// CDF of the radial law at snapshot `j`, linear within cells.
    pub fn cdf(&self, j: usize, r: T) -> T {
        let rho = &self.rho[j];
        let x = r / self.dr;
        if !(x > T::zero()) {
            return T::zero();
        }
        let full = x.floor().to_usize().unwrap_or(usize::MAX).min(rho.len());
        let mut acc = rho[..full].iter().fold(T::zero(), |s, v| s + *v) * self.dr;
        if full < rho.len() {
            acc = acc + rho[full] * (x - T::from_usize_lossy(full)) * self.dr;
        }
        acc
    }

    /// `Σ |ρ_i − g(r_i)|·dr` at snapshot `j`.
    pub fn l1_distance(&self, j: usize, g: impl Fn(T) -> T) -> T {
        self.rho[j]
            .iter()
            .zip(&self.r_grid)
            .fold(T::zero(), |s, (rho, &r)| s + (*rho - g(r)).abs())
            * self.dr
    }

    /// CSV with header `t,r,rho`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,r,rho\n");
        for (j, t) in self.t_grid.iter().enumerate() {
            for (r, rho) in self.r_grid.iter().zip(&self.rho[j]) {
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", t.as_f64(), r.as_f64(), rho.as_f64());
            }
        }
        out
    }
}
