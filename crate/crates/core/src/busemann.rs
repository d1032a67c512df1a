//! Busemann functions and Poisson kernels on the hyperbolic half-plane.
//!
//! Hyperbolic gradient of `f` at `(x, y)`: `y²(f_x, f_y)`; its norm is
//! `y·|(f_x, f_y)|`. Laplacian: `y²(f_xx + f_yy)`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sde::{simulate_halfplane, SimConfig};
use crate::stats::Estimate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint<T> {
    Infinity,
    Real(T),
}

/// Busemann function normalized by `ξ(0, 1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BusemannField<T> {
    pub boundary: BoundaryPoint<T>,
}

fn check<T: Real>(x: T, y: T) -> Result<()> {
    if !(y > T::zero()) || !x.is_finite() {
        return Err(Error::InvalidPoint(format!("half-plane point needs y > 0, got ({x}, {y})")));
    }
    Ok(())
}

/// Squared hyperbolic norm of a coordinate vector at height `y`.
pub fn hyperbolic_norm_sq<T: Real>(v: (T, T), y: T) -> T {
    (v.0 * v.0 + v.1 * v.1) / (y * y)
}

/// Hyperbolic inner product of two coordinate vectors at height `y`.
pub fn hyperbolic_inner<T: Real>(a: (T, T), b: (T, T), y: T) -> T {
    (a.0 * b.0 + a.1 * b.1) / (y * y)
}

impl<T: Real> BusemannField<T> {
    pub fn infinity() -> Self {
        Self { boundary: BoundaryPoint::Infinity }
    }

    pub fn real(x0: T) -> Self {
        Self { boundary: BoundaryPoint::Real(x0) }
    }

    /// `ξ(x, y)`: `−log y` for `∞`, and
    /// `log(((x−x₀)² + y²)/(y(1 + x₀²)))` for a real boundary point.
    pub fn eval(&self, x: T, y: T) -> Result<T> {
        check(x, y)?;
        Ok(match self.boundary {
            BoundaryPoint::Infinity => -y.ln(),
            BoundaryPoint::Real(x0) => {
                let dx = x - x0;
                ((dx * dx + y * y) / (y * (T::one() + x0 * x0))).ln()
            }
        })
    }

    /// Hyperbolic gradient in coordinates.
    pub fn gradient(&self, x: T, y: T) -> Result<(T, T)> {
        check(x, y)?;
        let y2 = y * y;
        let (fx, fy) = match self.boundary {
            BoundaryPoint::Infinity => (T::zero(), -y.recip()),
            BoundaryPoint::Real(x0) => {
                let dx = x - x0;
                let s = dx * dx + y2;
                let two = T::lit(2.0);
                (two * dx / s, two * y / s - y.recip())
            }
        };
        Ok((y2 * fx, y2 * fy))
    }

    /// `Δξ = 1` on the whole half-plane: `log((x−x₀)² + y²)` is
    /// Euclidean-harmonic and `y²∂_yy(−log y) = 1`.
    pub fn laplacian(&self, x: T, y: T) -> Result<T> {
        check(x, y)?;
        Ok(T::one())
    }

    /// Five-point stencil for `y²(ξ_xx + ξ_yy)`.
    pub fn laplacian_fd(&self, x: T, y: T, h: T) -> Result<T> {
        if !(h > T::zero() && h < y) {
            return Err(Error::InvalidArgument(format!("stencil step {h} must lie in (0, y)")));
        }
        let c = self.eval(x, y)?;
        let s = self.eval(x + h, y)? + self.eval(x - h, y)? + self.eval(x, y + h)? + self.eval(x, y - h)?;
        Ok(y * y * (s - T::lit(4.0) * c) / (h * h))
    }
}

/// Poisson kernel `k_ξ = e^{−ξ}` attached to a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonKernelField<T> {
    pub busemann: BusemannField<T>,
}

impl<T: Real> PoissonKernelField<T> {
    pub fn new(boundary: BoundaryPoint<T>) -> Self {
        Self { busemann: BusemannField { boundary } }
    }

    /// `y` for `∞`; `y(1 + x₀²)/((x−x₀)² + y²)` for a real point.
    pub fn eval(&self, x: T, y: T) -> Result<T> {
        Ok((-self.busemann.eval(x, y)?).exp())
    }

    /// Hyperbolic gradient of `log k_ξ`, equal to `−∇ξ`.
    pub fn grad_log_k(&self, x: T, y: T) -> Result<(T, T)> {
        let (a, b) = self.busemann.gradient(x, y)?;
        Ok((-a, -b))
    }

    pub fn laplacian_fd(&self, x: T, y: T, h: T) -> Result<T> {
        let c = self.eval(x, y)?;
        let s = self.eval(x + h, y)? + self.eval(x - h, y)? + self.eval(x, y + h)? + self.eval(x, y - h)?;
        Ok(y * y * (s - T::lit(4.0) * c) / (h * h))
    }
}

/// Drift `ℓ = ½Δξ(o)` on the half-plane.
pub fn drift_from_laplacian<T: Real>() -> T {
    let o = BusemannField::<T>::infinity();
    T::lit(0.5) * o.laplacian(T::zero(), T::one()).expect("basepoint is valid")
}

/// Drift `ℓ = −½⟨∇log k_ξ, ∇ξ⟩(o)` on the half-plane.
pub fn drift_from_poisson<T: Real>() -> T {
    let field = PoissonKernelField::<T>::new(BoundaryPoint::Infinity);
    let (o_x, o_y) = (T::zero(), T::one());
    let g = field.grad_log_k(o_x, o_y).expect("basepoint is valid");
    let xi = field.busemann.gradient(o_x, o_y).expect("basepoint is valid");
    -T::lit(0.5) * hyperbolic_inner(g, xi, o_y)
}

/// k-functional `½|∇log k_ξ(o)|²` and the equality gap
/// `sup |∇log k_ξ + 2ℓ∇ξ|` over `samples` points, with `ℓ = ½Δξ(o)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KFunctional<T> {
    pub k_value: T,
    pub equality_gap: T,
}

pub fn k_functional_and_equality<T: Real>(samples: usize) -> KFunctional<T> {
    let field = PoissonKernelField::<T>::new(BoundaryPoint::Infinity);
    let g0 = field.grad_log_k(T::zero(), T::one()).expect("basepoint is valid");
    let k_value = T::lit(0.5) * hyperbolic_norm_sq(g0, T::one());
    let two_ell = T::lit(2.0) * drift_from_laplacian::<T>();
    let mut gap = T::zero();
    let n = samples.max(1);
    for i in 0..n {
        // deterministic spread over x ∈ [−5, 5], y ∈ [e^{−3}, e^{3}]
        let u = T::from_usize_lossy(i) / T::from_usize_lossy(n);
        let x = T::lit(10.0) * u - T::lit(5.0);
        let y = (T::lit(6.0) * ((u * T::lit(7.0)).fract()) - T::lit(3.0)).exp();
        let g = field.grad_log_k(x, y).expect("sample point is valid");
        let xi = field.busemann.gradient(x, y).expect("sample point is valid");
        let v = (g.0 + two_ell * xi.0, g.1 + two_ell * xi.1);
        gap = gap.max(hyperbolic_norm_sq(v, y).sqrt());
    }
    KFunctional { k_value, equality_gap: gap }
}

/// k-functional on Hⁿ with curvature −k²: `k_ξ = e^{−(n−1)kξ}`, so
/// `½|∇log k_ξ|² = ½((n−1)k)²`.
pub fn hyperbolic_k_functional(dim: usize, k: f64) -> f64 {
    let a = (dim as f64 - 1.0) * k;
    0.5 * a * a
}

/// Monte Carlo mean of `ξ(ω_t) = −log y_t` from `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FurstenbergCheck {
    pub t: f64,
    pub estimate: Estimate,
    /// `t·ℓ` with `ℓ = ½`.
    pub expected: f64,
    pub z_score: f64,
}

/// Compares `E ξ(ω_t)` with `t/2`, simulating to horizon `t` with the step,
/// seed and path count of `cfg`.
pub fn furstenberg_check(cfg: &SimConfig, t: f64) -> Result<FurstenbergCheck> {
    let expected = t * drift_from_laplacian::<f64>();
    if t == 0.0 {
        return Ok(FurstenbergCheck { t, estimate: Estimate { mean: 0.0, se: 0.0 }, expected, z_score: 0.0 });
    }
    let steps = (t / cfg.dt).round() as usize;
    let run = SimConfig { t_max: t, record_stride: steps.max(1), ..cfg.clone() };
    let paths = simulate_halfplane(&run, (0.0, 1.0))?;
    let xi: Vec<f64> = paths.iter().map(|p| -p.y.last().expect("non-empty path").ln()).collect();
    let estimate = Estimate::of(&xi);
    Ok(FurstenbergCheck { t, estimate, expected, z_score: estimate.z_score(expected) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_drift_formulas_give_one_half() {
        assert_eq!(drift_from_laplacian::<f64>(), 0.5);
        assert!((drift_from_poisson::<f64>() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn real_boundary_normalized_at_basepoint() {
        for x0 in [-2.0f64, 0.0, 0.7] {
            assert!(BusemannField::real(x0).eval(0.0, 1.0).unwrap().abs() < 1e-15);
            assert!((PoissonKernelField::new(BoundaryPoint::Real(x0)).eval(0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_point() {
        assert!(BusemannField::<f64>::infinity().eval(0.0, -1.0).is_err());
    }
}
