use super::{path_rng, recorded, SimConfig};
use crate::error::{Error, Result};
use crate::model_spaces::ProfileFunction;
use crate::stats;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Radius past which Kaimanovich paths are advanced in `Z = H(r) − t`.
pub const KAIMANOVICH_R_CAP: f64 = 200.0;

/// Convergence threshold on `|Z(t_max) − Z(t_max − 1)|`.
const TAIL_TOLERANCE: f64 = 0.05;

/// One trajectory of the radial process with its observables.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProcess {
    pub times: Vec<f64>,
    pub r: Vec<f64>,
    /// `H(r_t) − t` with `H(r) = log(1 + r²)`.
    pub h_minus_t: Vec<f64>,
    /// Angular clock `∫ p(r_s)^{−2} ds`.
    pub tau: Vec<f64>,
    /// `θ_t = Y_{τ_t}` for an independent Brownian motion `Y`.
    pub theta: Vec<f64>,
    /// Steps whose Euler update crossed `r = 0` and were reflected.
    pub reflections: usize,
    /// Whether the path passed the radius cap.
    pub capped: bool,
}

/// `H(r) = log(1 + r²)`.
pub fn kaimanovich_h(r: f64) -> f64 {
    (r * r).ln_1p()
}

/// `h = 1/f = 2r/(1+r²)` for `f(r) = (r + 1/r)/2`.
fn kaimanovich_inv_drift(r: f64) -> f64 {
    2.0 * r / (1.0 + r * r)
}

/// `h'(r) = 2(1 − r²)/(1 + r²)²`.
fn kaimanovich_inv_drift_prime(r: f64) -> f64 {
    let s = 1.0 + r * r;
    2.0 * (1.0 - r * r) / (s * s)
}

/// Drift of `H(r_t)`: `dH = h dX + (1 + ½h') dt`.
pub fn kaimanovich_ito_drift(r: f64) -> f64 {
    1.0 + 0.5 * kaimanovich_inv_drift_prime(r)
}

struct State {
    t: f64,
    r: f64,
    /// `H(r) − t`
    z: f64,
    tau: f64,
    theta: f64,
}

struct PathSummary {
    reflections: usize,
    capped: bool,
}

fn integrate_path(
    profile: &ProfileFunction<f64>,
    cfg: &SimConfig,
    r0: f64,
    path: usize,
    steps: usize,
    mut visit: impl FnMut(usize, &State),
) -> Result<PathSummary> {
    let kaimanovich = profile.label() == "kaimanovich";
    let mut radial_rng = path_rng(cfg.seed, path, 0);
    let mut angular_rng = path_rng(cfg.seed, path, 1);
    let (dt, sq) = (cfg.dt, cfg.dt.sqrt());
    let mut s = State { t: 0.0, r: r0, z: kaimanovich_h(r0), tau: 0.0, theta: 0.0 };
    let mut out = PathSummary { reflections: 0, capped: false };
    visit(0, &s);
    for n in 1..=steps {
        let z1: f64 = StandardNormal.sample(&mut radial_rng);
        let z2: f64 = StandardNormal.sample(&mut radial_rng);
        let dx = sq * z1;
        let dy: f64 = StandardNormal.sample(&mut angular_rng);
        let dtau = dt * (-2.0 * profile.ln_p(s.r)).exp();
        s.theta += dtau.sqrt() * dy;
        s.tau += dtau;
        if out.capped {
            // dZ = h dX + ½h' dt
            s.z += kaimanovich_inv_drift(s.r) * dx + 0.5 * kaimanovich_inv_drift_prime(s.r) * dt;
            s.t = n as f64 * dt;
            s.r = (s.z + s.t).exp_m1().sqrt();
        } else {
            // exact planar step for the pole part 1/(2r) of the drift, then
            // Euler for the regular remainder g = f − 1/(2r)
            let r_half = ((s.r + dx).powi(2) + dt * z2 * z2).sqrt();
            let g = profile.drift(r_half) - 0.5 / r_half;
            let mut r = r_half + g * dt;
            if r <= 0.0 {
                r = r.abs().max(f64::MIN_POSITIVE);
                out.reflections += 1;
            }
            s.r = r;
            s.t = n as f64 * dt;
            s.z = kaimanovich_h(r) - s.t;
            if kaimanovich && r > KAIMANOVICH_R_CAP {
                out.capped = true;
            }
        }
        if !(s.r.is_finite() && s.z.is_finite() && s.tau.is_finite()) {
            return Err(Error::NonFinite(format!("radial path {path} at t = {}", s.t)));
        }
        visit(n, &s);
    }
    Ok(out)
}

/// Simulates `dr = dX + f(r) dt`, `f = ½p'/p`, with the angular clock `τ`
/// and `θ_t = Y_{τ_t}`.
///
/// Each step splits `f = 1/(2r) + g`: the pole part is advanced exactly as
/// the modulus of a planar Gaussian step, and the bounded remainder `g` by
/// Euler–Maruyama. Steps that still cross 0 are reflected and counted.
pub fn simulate_radial(profile: &ProfileFunction<f64>, cfg: &SimConfig, r0: f64) -> Result<Vec<RadialProcess>> {
    let steps = cfg.steps()?;
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidArgument(format!("r0 = {r0} must be positive")));
    }
    (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut p = RadialProcess {
                times: vec![],
                r: vec![],
                h_minus_t: vec![],
                tau: vec![],
                theta: vec![],
                reflections: 0,
                capped: false,
            };
            let summary = integrate_path(profile, cfg, r0, i, steps, |n, s| {
                if recorded(n, steps, cfg.record_stride) {
                    p.times.push(s.t);
                    p.r.push(s.r);
                    p.h_minus_t.push(s.z);
                    p.tau.push(s.tau);
                    p.theta.push(s.theta);
                }
            })?;
            p.reflections = summary.reflections;
            p.capped = summary.capped;
            Ok(p)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathTail {
    /// `L̂ = H(r_{t_max}) − t_max`.
    pub l_hat: f64,
    /// `|Z(t_max) − Z(t_max − 1)|`.
    pub diagnostic: f64,
    pub converged: bool,
    pub capped: bool,
    /// `τ_{t_max} − τ_{t_max/2}`.
    pub tau_tail: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailLimit {
    pub paths: Vec<PathTail>,
    /// Mean and standard deviation of `L̂` over converged paths.
    pub mean: f64,
    pub std: f64,
    pub n_converged: usize,
    pub n_excluded: usize,
    pub n_capped: usize,
}

/// Tail limit `L = lim H(r_t) − t` of the Kaimanovich surface, from `r₀ = 1`.
pub fn kaimanovich_tail_limit(cfg: &SimConfig) -> Result<TailLimit> {
    let steps = cfg.steps()?;
    if cfg.t_max < 10.0 || cfg.dt > 1e-3 {
        return Err(Error::InvalidArgument(format!(
            "tail limit needs t_max >= 10 and dt <= 1e-3 (got t_max = {}, dt = {})",
            cfg.t_max, cfg.dt
        )));
    }
    let profile = ProfileFunction::kaimanovich();
    let mark = steps - (1.0 / cfg.dt).round() as usize;
    let half = steps / 2;
    let paths: Vec<PathTail> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let (mut z_mark, mut z_end, mut tau_half, mut tau_end) = (0.0, 0.0, 0.0, 0.0);
            let summary = integrate_path(&profile, cfg, 1.0, i, steps, |n, s| {
                if n == mark {
                    z_mark = s.z;
                }
                if n == half {
                    tau_half = s.tau;
                }
                if n == steps {
                    z_end = s.z;
                    tau_end = s.tau;
                }
            })?;
            let diagnostic = (z_end - z_mark).abs();
            Ok(PathTail {
                l_hat: z_end,
                diagnostic,
                converged: diagnostic < TAIL_TOLERANCE,
                capped: summary.capped,
                tau_tail: tau_end - tau_half,
            })
        })
        .collect::<Result<_>>()?;
    let kept: Vec<f64> = paths.iter().filter(|p| p.converged).map(|p| p.l_hat).collect();
    let (mean, std) = stats::mean_std(&kept);
    Ok(TailLimit {
        n_converged: kept.len(),
        n_excluded: paths.len() - kept.len(),
        n_capped: paths.iter().filter(|p| p.capped).count(),
        mean,
        std,
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_at_start_and_drift_at_one() {
        assert!((kaimanovich_h(1.0) - 2f64.ln()).abs() < 1e-15);
        let p = ProfileFunction::<f64>::kaimanovich();
        assert!((p.drift(1.0) - 1.0).abs() < 1e-15);
        assert!((kaimanovich_ito_drift(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ito_drift_matches_symbolic_second_derivative() {
        // 1 + ½h' = f·H' + ½H'', derivatives by central differences
        let p = ProfileFunction::<f64>::kaimanovich();
        for &r in &[0.3, 1.0, 2.5, 7.0] {
            let e = 1e-4;
            let d1 = (kaimanovich_h(r + e) - kaimanovich_h(r - e)) / (2.0 * e);
            let d2 = (kaimanovich_h(r + e) - 2.0 * kaimanovich_h(r) + kaimanovich_h(r - e)) / (e * e);
            let want = p.drift(r) * d1 + 0.5 * d2;
            assert!((kaimanovich_ito_drift(r) - want).abs() < 1e-6, "r={r}");
        }
    }

    #[test]
    fn tail_limit_rejects_coarse_config() {
        let cfg = SimConfig { dt: 1e-2, t_max: 10.0, n_paths: 2, ..Default::default() };
        assert!(kaimanovich_tail_limit(&cfg).is_err());
    }
}
