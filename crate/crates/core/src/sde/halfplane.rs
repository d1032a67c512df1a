use super::{path_rng, recorded, SimConfig};
use crate::error::{Error, Result};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// One half-plane trajectory; `y > 0` at every recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlanePath {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Brownian motion for `½Δ` on the half-plane: `dx = y dB₁`, `dy = y dB₂`.
///
/// `y` is advanced exactly, `y ← y·exp(ΔB₂ − Δt/2)`; `x` uses the midpoint
/// `½(yₙ + yₙ₊₁)`.
pub fn simulate_halfplane(cfg: &SimConfig, start: (f64, f64)) -> Result<Vec<HalfPlanePath>> {
    let steps = cfg.steps()?;
    if !(start.1 > 0.0) || !start.0.is_finite() {
        return Err(Error::InvalidPoint(format!("half-plane start needs y > 0, got {start:?}")));
    }
    let sq = cfg.dt.sqrt();
    let paths = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(cfg.seed, i, 0);
            let cap = steps / cfg.record_stride + 2;
            let mut p = HalfPlanePath {
                times: Vec::with_capacity(cap),
                x: Vec::with_capacity(cap),
                y: Vec::with_capacity(cap),
            };
            let (mut x, mut y) = start;
            p.times.push(0.0);
            p.x.push(x);
            p.y.push(y);
            for n in 1..=steps {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                let y_next = y * (sq * z2 - 0.5 * cfg.dt).exp();
                x += 0.5 * (y + y_next) * sq * z1;
                y = y_next;
                if recorded(n, steps, cfg.record_stride) {
                    p.times.push(n as f64 * cfg.dt);
                    p.x.push(x);
                    p.y.push(y);
                }
            }
            p
        })
        .collect();
    Ok(paths)
}
