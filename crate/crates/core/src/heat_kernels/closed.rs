//! Closed-form transition densities for the generator Δ/2.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, Tolerance};
use crate::scalar::Real;

/// `ln q` on ℝᵈ: `−(d/2) ln(2πt) − r²/(2t)`.
pub fn ln_q_euclidean<T: Real>(t: T, dim: usize, dist: T) -> T {
    let d = T::from_usize_lossy(dim);
    -(d / T::lit(2.0)) * (T::TAU() * t).ln() - dist * dist / (t + t)
}

/// `(2πt)^{−d/2} e^{−r²/(2t)}`.
pub fn q_euclidean<T: Real>(t: T, dim: usize, dist: T) -> T {
    ln_q_euclidean(t, dim, dist).exp()
}

/// `ln q` on H³ with curvature −1:
/// `q = (2πt)^{−3/2} e^{−t/2 − r²/2t} · r/sinh r`.
pub fn ln_q_h3<T: Real>(t: T, dist: T) -> T {
    let two = T::lit(2.0);
    -T::lit(1.5) * (T::TAU() * t).ln() - t / two - dist * dist / (two * t) + dist.ln_x_over_sinh()
}

/// `ln q` on H² with curvature −1, from
/// `q = √2 e^{−t/8} (2πt)^{−3/2} ∫_ρ^∞ s e^{−s²/2t} (cosh s − cosh ρ)^{−1/2} ds`.
///
/// With `s = ρ + u²` and `cosh s − cosh ρ = 2 sinh(ρ + u²/2) sinh(u²/2)`,
/// the factors `e^{−ρ²/2t}` and `e^{−ρ/2}` leave the integral, and the
/// remaining integrand is smooth and bounded on `[0, ∞)`.
pub fn ln_q_h2<T: Real>(t: T, rho: T) -> Result<T> {
    let (one, two, half) = (T::one(), T::lit(2.0), T::lit(0.5));
    let integrand = move |u: T| {
        let u2 = u * u;
        if u2 == T::zero() {
            return if rho == T::zero() {
                T::zero()
            } else {
                two * rho / (half * (-(-(two * rho)).exp_m1())).sqrt()
            };
        }
        let num = two * (rho + u2) * (-(two * rho * u2 + u2 * u2) / (two * t) - u2 / T::lit(4.0)).exp();
        // (1 − e^{−2ρ−u²}) · sinh(u²/2)/u²
        let den = -(-(two * rho + u2)).exp_m1() * half * (half * u2).sinhc();
        num / den.sqrt()
    };
    // exponent ~ u⁴/2t + u²/2: cut where it exceeds 60
    let u2_max = -t / two + (t * t / T::lit(4.0) + T::lit(120.0) * t).sqrt();
    let u_max = (u2_max * T::lit(1.2)).sqrt() + one;
    let n = 12;
    let knots: Vec<T> = (0..=n)
        .map(|i| u_max * T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect();
    let inner = integrate_panels(integrand, &knots, Tolerance::new(0.0, 1e-13))?;
    if !(inner.value > T::zero()) {
        return Err(Error::NonFinite(format!("H² kernel integral at t={t}, r={rho}")));
    }
    Ok(half * T::LN_2() - t / T::lit(8.0) - T::lit(1.5) * (T::TAU() * t).ln()
        - rho * rho / (two * t)
        - rho / two
        + inner.value.ln())
}

/// `ln q` on Hⁿ (n ∈ {1,2,3}) with curvature −k², via
/// `q_k(t, r) = kⁿ q_1(k²t, kr)`.
pub fn ln_q_hyperbolic<T: Real>(t: T, dim: usize, k: T, dist: T) -> Result<T> {
    let (ts, rs) = (k * k * t, k * dist);
    let base = match dim {
        1 => return Ok(ln_q_euclidean(t, 1, dist)),
        2 => ln_q_h2(ts, rs)?,
        3 => ln_q_h3(ts, rs),
        _ => return Err(Error::NoKernel(format!("hyperbolic space of dimension {dim}"))),
    };
    Ok(T::from_usize_lossy(dim) * k.ln() + base)
}

pub fn q_hyperbolic<T: Real>(t: T, dim: usize, k: T, dist: T) -> Result<T> {
    ln_q_hyperbolic(t, dim, k, dist).map(T::exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h2_integrand_endpoint_limits() {
        // q(t, ρ) is continuous in ρ at 0
        let a = ln_q_h2(1.0_f64, 0.0).unwrap();
        let b = ln_q_h2(1.0_f64, 1e-7).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn h2_short_time_is_locally_euclidean() {
        let t = 1e-3_f64;
        let ratio = (ln_q_h2(t, 0.0).unwrap() - ln_q_euclidean(t, 2, 0.0)).exp();
        // q_H²(t,0)/q_ℝ²(t,0) = 1 + t·K/6 + …, K = −1 in the Δ/2 clock
        assert!((ratio - 1.0).abs() < 1e-3);
    }

    #[test]
    fn scaling_rejects_high_dimensions() {
        assert!(matches!(ln_q_hyperbolic(1.0_f64, 4, 1.0, 0.5), Err(Error::NoKernel(_))));
    }
}
