//! Transition densities `q(t, x, y) = p(t/2, x, y)` of Brownian motion
//! (generator Δ/2) on the model spaces, and numeric checks of kernel bounds.
//!
//! Every downstream constant depends on the Δ/2 convention: with it the
//! half-plane has drift ½ and entropy ½.

mod closed;
mod pde;

pub use closed::{
    ln_q_euclidean, ln_q_h2, ln_q_h3, ln_q_hyperbolic, q_euclidean, q_hyperbolic,
};
pub use pde::{radial_fokker_planck, RadialDensityGrid};

use crate::error::{Error, Result};
use crate::model_spaces::ModelManifold;
use crate::quadrature::{integrate_panels, panels, Quad, Tolerance};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    ClosedForm,
    /// Curvature −k² obtained by rescaling the k = 1 kernel.
    ScaledHyperbolic,
    /// Finite-volume solution of the radial forward equation.
    RadialPDE,
}

/// Tail mass budget for truncating radial integrals.
pub const TAIL_BUDGET: f64 = 1e-10;

/// Exponent `D` of the Gaussian bound used for truncation radii.
pub const TRUNCATION_D: f64 = 3.0;

/// Kernel evaluator for a model space.
#[derive(Debug, Clone)]
pub struct KernelEval<T: Real> {
    pub space: ModelManifold<T>,
    pub form: KernelForm,
    /// Lower end of the time range on which bound checks are meaningful.
    pub t_min: T,
}

impl<T: Real> KernelEval<T> {
    /// Picks the kernel form for `space`. Closed forms exist in dimensions
    /// 1 to 3; rotationally symmetric surfaces only have the PDE route.
    pub fn new(space: &ModelManifold<T>) -> Result<Self> {
        let form = match space {
            ModelManifold::Euclidean { dim } if *dim <= 3 => KernelForm::ClosedForm,
            ModelManifold::Hyperbolic { dim, k } if *dim <= 3 => {
                if *k == T::one() || *dim == 1 {
                    KernelForm::ClosedForm
                } else {
                    KernelForm::ScaledHyperbolic
                }
            }
            ModelManifold::HalfPlane => KernelForm::ClosedForm,
            ModelManifold::RotSym(_) => KernelForm::RadialPDE,
            other => return Err(Error::NoKernel(other.label())),
        };
        Ok(Self { space: space.clone(), form, t_min: T::one() })
    }

    /// `ln q(t, o, x)` as a function of `d(o, x)`.
    pub fn ln_q(&self, t: T, dist: T) -> Result<T> {
        if !(t > T::zero()) {
            return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
        }
        if !(dist >= T::zero()) {
            return Err(Error::InvalidArgument(format!("distance must be nonnegative, got {dist}")));
        }
        match &self.space {
            ModelManifold::Euclidean { dim } => Ok(ln_q_euclidean(t, *dim, dist)),
            ModelManifold::Hyperbolic { dim, k } => ln_q_hyperbolic(t, *dim, *k, dist),
            ModelManifold::HalfPlane => ln_q_h2(t, dist),
            ModelManifold::RotSym(p) => Err(Error::NoKernel(format!(
                "pointwise kernel on rotsym({}); use radial_fokker_planck",
                p.label()
            ))),
        }
    }

    pub fn q(&self, t: T, dist: T) -> Result<T> {
        self.ln_q(t, dist).map(T::exp)
    }

    /// Radius beyond which the Gaussian bound `q(t,0)·e^{−r²/3t}` leaves
    /// less than [`TAIL_BUDGET`] of mass.
    pub fn truncation_radius(&self, t: T) -> Result<T> {
        let ln_c = self.ln_q(t, T::zero())?;
        let d = T::lit(TRUNCATION_D);
        let ln_budget = T::lit(TAIL_BUDGET).ln();
        let step = T::lit(0.25) * t.sqrt();
        let h = step * T::lit(1e-3);
        let mut r = t.sqrt();
        for _ in 0..100_000 {
            let ln_a = self.space.ln_sphere_area(r);
            let slope_area = (self.space.ln_sphere_area(r + h) - self.space.ln_sphere_area(r - h)) / (h + h);
            // tail ∫_r^∞ e^{−s²/Dt + ln A(s)} ds ≤ e^{…}(r)/decay rate
            let decay = T::lit(2.0) * r / (d * t) - slope_area;
            if decay > T::zero() && ln_c + ln_a - r * r / (d * t) - decay.ln() < ln_budget {
                return Ok(r);
            }
            r = r + step;
        }
        Err(Error::NotConverged(format!("truncation radius at t = {t}")))
    }

    /// `∫₀^R g(r, ln(q·|S_r|), ln q) dr` with `R` the truncation radius.
    pub fn radial_integral<G>(&self, t: T, g: G, tol: Tolerance<T>) -> Result<Quad<T>>
    where
        G: Fn(T, T, T) -> T,
    {
        let r_max = self.truncation_radius(t)?;
        let width = T::lit(0.5) * t.sqrt();
        let knots = panels(T::zero(), r_max, width);
        let failure = std::cell::Cell::new(None);
        let q = integrate_panels(
            |r: T| {
                if r == T::zero() && self.space.dim() > 1 {
                    return T::zero();
                }
                match self.ln_q(t, r) {
                    Ok(lq) => g(r, lq + self.space.ln_sphere_area(r), lq),
                    Err(e) => {
                        failure.set(Some(e));
                        T::zero()
                    }
                }
            },
            &knots,
            tol,
        )?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(q)
    }

    /// `∫ q(t,o,x) dx`.
    pub fn mass(&self, t: T) -> Result<T> {
        Ok(self.radial_integral(t, |_, lqa, _| lqa.exp(), Tolerance::tight())?.value)
    }

    /// Checks `∫ q(t,o,·) ≥ 0.999`.
    pub fn ensure_normalized(&self, t: T) -> Result<T> {
        let m = self.mass(t)?;
        if !(m >= T::lit(0.999)) || m > T::lit(1.001) {
            return Err(Error::NotNormalized { mass: m.as_f64() });
        }
        Ok(m)
    }
}

/// Empirical constant `C` with `q(t,o,x) ≤ C e^{−d²/(Dt)}`: the supremum of
/// `q(t,r)·e^{r²/(Dt)}` over an `(t, r)` grid. Not a certified bound.
pub fn gaussian_bound_constant<T: Real>(
    space: &ModelManifold<T>,
    d: T,
    t_range: (T, T),
    r_max: T,
) -> Result<T> {
    let kernel = KernelEval::new(space)?;
    if !(d > T::lit(2.0)) {
        return Err(Error::InvalidArgument(format!("Gaussian exponent D = {d} must exceed 2")));
    }
    let (t0, t1) = t_range;
    if !(t0 >= kernel.t_min && t1 >= t0) {
        return Err(Error::InvalidArgument(format!(
            "time range [{t0}, {t1}] must lie in [{}, ∞)",
            kernel.t_min
        )));
    }
    let (nt, nr) = (60, 600);
    let mut best = T::neg_infinity();
    for i in 0..=nt {
        // geometric spacing in t
        let t = t0 * (t1 / t0).powf(T::from_usize_lossy(i) / T::from_usize_lossy(nt));
        for j in 0..=nr {
            let r = r_max * T::from_usize_lossy(j) / T::from_usize_lossy(nr);
            let v = kernel.ln_q(t, r)? + r * r / (d * t);
            best = best.max(v);
        }
    }
    if !(best < T::lit(700.0)) {
        return Err(Error::NonFinite(format!(
            "Gaussian bound unbounded at grid resolution (log sup = {best})"
        )));
    }
    Ok(best.exp())
}

/// `∫ |q(t+τ,o,y) − q(t,o,y)| dy ∈ [0, 2]`.
///
/// The integrand is split at the sign changes of the difference.
pub fn zero_two_defect<T: Real>(space: &ModelManifold<T>, tau: T, t: T) -> Result<T> {
    if !space.is_homogeneous() {
        return Err(Error::NoKernel(format!("zero-two defect on {}", space.label())));
    }
    if !(tau > T::zero() && t > T::zero()) {
        return Err(Error::InvalidArgument("tau and t must be positive".into()));
    }
    let kernel = KernelEval::new(space)?;
    let t2 = t + tau;
    let r_max = kernel.truncation_radius(t2)?;
    let diff = |r: T| -> Result<T> { Ok(kernel.ln_q(t2, r)? - kernel.ln_q(t, r)?) };

    let n = 400;
    let mut knots = panels(T::zero(), r_max, T::lit(0.5) * t.sqrt());
    let mut prev_r = T::zero();
    let mut prev = diff(prev_r)?;
    for i in 1..=n {
        let r = r_max * T::from_usize_lossy(i) / T::from_usize_lossy(n);
        let cur = diff(r)?;
        if (cur > T::zero()) != (prev > T::zero()) {
            let (mut lo, mut hi) = (prev_r, r);
            for _ in 0..200 {
                let mid = T::lit(0.5) * (lo + hi);
                if !(mid > lo && mid < hi) {
                    break;
                }
                if (diff(mid)? > T::zero()) == (prev > T::zero()) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            knots.push(T::lit(0.5) * (lo + hi));
        }
        prev_r = r;
        prev = cur;
    }
    knots.sort_by(|a, b| a.partial_cmp(b).expect("finite knots"));
    knots.dedup();

    let failure = std::cell::Cell::new(None);
    let q = integrate_panels(
        |r: T| {
            if r == T::zero() && space.dim() > 1 {
                return T::zero();
            }
            let la = space.ln_sphere_area(r);
            match (kernel.ln_q(t2, r), kernel.ln_q(t, r)) {
                (Ok(a), Ok(b)) => ((a + la).exp() - (b + la).exp()).abs(),
                (Err(e), _) | (_, Err(e)) => {
                    failure.set(Some(e));
                    T::zero()
                }
            }
        },
        &knots,
        Tolerance::new(1e-12, 1e-10),
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(q.value.min(T::lit(2.0)))
}
