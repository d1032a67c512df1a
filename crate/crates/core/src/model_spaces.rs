//! Model manifolds with exact geometric primitives.
//!
//! Charts:
//! - `Euclidean(d)`: Cartesian coordinates in ℝᵈ.
//! - `Hyperbolic(d, k)`: exponential-map coordinates at the basepoint, so
//!   `|v|` is the distance to the origin and `v/|v|` the initial direction.
//! - `HalfPlane`: `(x, y)` with `y > 0`, basepoint `(0, 1)`.
//! - `RotSym(p)`: polar `(r, θ)` for `ds² = dr² + p(r)² dθ²`.

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::quadrature::{integrate_panels, panels, Tolerance};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

type RealFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Warping function of a rotationally symmetric surface.
#[derive(Clone)]
pub struct ProfileFunction<T> {
    label: String,
    k: Option<T>,
    p: RealFn<T>,
    p_prime: RealFn<T>,
    p_double_prime: RealFn<T>,
    ln_p: RealFn<T>,
    log_derivative: RealFn<T>,
}

impl<T: Real> fmt::Debug for ProfileFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileFunction").field("label", &self.label).field("k", &self.k).finish()
    }
}

impl<T: Real> PartialEq for ProfileFunction<T> {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.k == other.k
    }
}

impl<T: Real> ProfileFunction<T> {
    /// Builds a profile from `(p, p', p'')`; rejects profiles that are not
    /// smooth at the pole (`p(0) = 0`, `p'(0) = 1`).
    pub fn new(
        label: impl Into<String>,
        p: impl Fn(T) -> T + Send + Sync + 'static,
        p_prime: impl Fn(T) -> T + Send + Sync + 'static,
        p_double_prime: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        let p: RealFn<T> = Arc::new(p);
        let dp: RealFn<T> = Arc::new(p_prime);
        let (p1, p2, dp1) = (p.clone(), p.clone(), dp.clone());
        let prof = Self {
            label: label.into(),
            k: None,
            ln_p: Arc::new(move |r| p1(r).ln()),
            log_derivative: Arc::new(move |r| dp1(r) / p2(r)),
            p,
            p_prime: dp,
            p_double_prime: Arc::new(p_double_prime),
        };
        prof.check_pole()?;
        Ok(prof)
    }

    fn check_pole(&self) -> Result<()> {
        let z = T::zero();
        if (self.p)(z).abs() > T::lit(1e-12) || ((self.p_prime)(z) - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::InvalidArgument(format!(
                "profile '{}' must satisfy p(0)=0, p'(0)=1",
                self.label
            )));
        }
        Ok(())
    }

    /// `p(r) = r`.
    pub fn euclid() -> Self {
        Self {
            label: "euclid".into(),
            k: None,
            p: Arc::new(|r| r),
            p_prime: Arc::new(|_| T::one()),
            p_double_prime: Arc::new(|_| T::zero()),
            ln_p: Arc::new(|r: T| r.ln()),
            log_derivative: Arc::new(|r: T| r.recip()),
        }
    }

    /// `p(r) = sinh(kr)/k`, curvature `−k²`.
    pub fn hyperbolic(k: T) -> Self {
        Self {
            label: "hyperbolic".into(),
            k: Some(k),
            p: Arc::new(move |r: T| r * (k * r).sinhc()),
            p_prime: Arc::new(move |r: T| (k * r).cosh()),
            p_double_prime: Arc::new(move |r: T| k * (k * r).sinh()),
            ln_p: Arc::new(move |r: T| {
                if k * r < T::lit(1e-4) {
                    r.ln() + (k * r).sinhc().ln()
                } else {
                    (k * r).ln_sinh() - k.ln()
                }
            }),
            log_derivative: Arc::new(move |r: T| {
                let x = k * r;
                // k coth(kr)
                k / x.tanh()
            }),
        }
    }

    /// `p(r) = r e^{r²/2}`, curvature `−(3 + r²)`.
    pub fn kaimanovich() -> Self {
        let half = T::lit(0.5);
        Self {
            label: "kaimanovich".into(),
            k: None,
            p: Arc::new(move |r: T| r * (half * r * r).exp()),
            p_prime: Arc::new(move |r: T| (T::one() + r * r) * (half * r * r).exp()),
            p_double_prime: Arc::new(move |r: T| (T::lit(3.0) * r + r * r * r) * (half * r * r).exp()),
            ln_p: Arc::new(move |r: T| r.ln() + half * r * r),
            log_derivative: Arc::new(|r: T| r + r.recip()),
        }
    }

    /// Looks up a built-in by label (`euclid`, `hyperbolic`, `kaimanovich`).
    pub fn builtin(label: &str, k: Option<T>) -> Result<Self> {
        match label {
            "euclid" => Ok(Self::euclid()),
            "hyperbolic" => {
                let k = k.unwrap_or_else(T::one);
                if !(k > T::zero()) {
                    return Err(Error::InvalidArgument(format!("curvature scale k = {k} must be positive")));
                }
                Ok(Self::hyperbolic(k))
            }
            "kaimanovich" => Ok(Self::kaimanovich()),
            other => Err(Error::UnknownProfile(other.to_string())),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Curvature scale of the `hyperbolic` built-in.
    pub fn k(&self) -> Option<T> {
        self.k
    }

    pub fn p(&self, r: T) -> T {
        (self.p)(r)
    }

    pub fn p_prime(&self, r: T) -> T {
        (self.p_prime)(r)
    }

    pub fn p_double_prime(&self, r: T) -> T {
        (self.p_double_prime)(r)
    }

    pub fn ln_p(&self, r: T) -> T {
        (self.ln_p)(r)
    }

    /// `p'(r)/p(r)`.
    pub fn log_derivative(&self, r: T) -> T {
        (self.log_derivative)(r)
    }

    /// Radial drift `f = ½ p'/p` of Brownian motion (generator Δ/2).
    pub fn drift(&self, r: T) -> T {
        T::lit(0.5) * self.log_derivative(r)
    }

    /// Gauss curvature `−p''/p` at radius `r > 0`.
    pub fn gauss_curvature(&self, r: T) -> T {
        -self.p_double_prime(r) / self.p(r)
    }
}

/// Distance value; `exact == false` marks an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance<T> {
    pub value: T,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelManifold<T: Real> {
    Euclidean { dim: usize },
    /// Constant curvature `−k²`.
    Hyperbolic { dim: usize, k: T },
    /// Upper half-plane, curvature −1.
    HalfPlane,
    RotSym(ProfileFunction<T>),
}

/// Slope fit of `log vol(B_r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeGrowth<T> {
    pub slope: T,
    /// RMS residual of the fit.
    pub residual: T,
    /// Plain secant slope of `log vol` across the top half of the grid.
    pub secant: T,
}

fn unit_sphere_area<T: Real>(dim: usize) -> T {
    // |S^{n}|: |S^0| = 2, |S^1| = 2π, |S^n| = 2π/(n-1) |S^{n-2}|
    let n = dim - 1;
    let mut a = if n % 2 == 0 { T::lit(2.0) } else { T::TAU() };
    let mut m = if n % 2 == 0 { 0 } else { 1 };
    while m < n {
        m += 2;
        a = a * T::TAU() / T::from_usize_lossy(m - 1);
    }
    a
}

impl<T: Real> ModelManifold<T> {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(Self::Euclidean { dim })
    }

    pub fn hyperbolic(dim: usize, k: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(k > T::zero() && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("curvature scale k = {k} must be positive")));
        }
        Ok(Self::Hyperbolic { dim, k })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Euclidean { dim } | Self::Hyperbolic { dim, .. } => *dim,
            Self::HalfPlane | Self::RotSym(_) => 2,
        }
    }

    pub fn basepoint(&self) -> Vec<T> {
        match self {
            Self::Euclidean { dim } | Self::Hyperbolic { dim, .. } => vec![T::zero(); *dim],
            Self::HalfPlane => vec![T::zero(), T::one()],
            Self::RotSym(_) => vec![T::zero(), T::zero()],
        }
    }

    /// Transitive isometry group (kernel depends on distance only).
    pub fn is_homogeneous(&self) -> bool {
        !matches!(self, Self::RotSym(_))
    }

    /// Curvature scale `k` (curvature `−k²`); zero for flat space.
    pub fn curvature_scale(&self) -> T {
        match self {
            Self::Euclidean { .. } => T::zero(),
            Self::Hyperbolic { k, .. } => *k,
            Self::HalfPlane => T::one(),
            Self::RotSym(p) => p.k().unwrap_or_else(T::zero),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Euclidean { dim } => format!("euclidean(dim={dim})"),
            Self::Hyperbolic { dim, k } => format!("hyperbolic(dim={dim},k={k})"),
            Self::HalfPlane => "halfplane".into(),
            Self::RotSym(p) => match p.k() {
                Some(k) => format!("rotsym({},k={k})", p.label()),
                None => format!("rotsym({})", p.label()),
            },
        }
    }

    /// Rejects points outside the chart.
    pub fn validate_point(&self, a: &[T]) -> Result<()> {
        if a.len() != self.dim() {
            return Err(Error::InvalidPoint(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                a.len()
            )));
        }
        if a.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        match self {
            Self::HalfPlane if !(a[1] > T::zero()) => {
                Err(Error::InvalidPoint(format!("half-plane point needs y > 0, got y = {}", a[1])))
            }
            Self::RotSym(_) if a[0] < T::zero() => {
                Err(Error::InvalidPoint(format!("polar radius must be nonnegative, got r = {}", a[0])))
            }
            _ => Ok(()),
        }
    }

    /// Riemannian distance. Exact except for off-ray pairs on `RotSym`,
    /// where the shorter of the through-pole and arc-then-radial paths is
    /// returned with `exact = false`.
    pub fn distance(&self, a: &[T], b: &[T]) -> Result<Distance<T>> {
        self.validate_point(a)?;
        self.validate_point(b)?;
        let exact = |value| Ok(Distance { value, exact: true });
        match self {
            Self::Euclidean { .. } => {
                exact(a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + (*x - *y).powi(2)).sqrt())
            }
            Self::Hyperbolic { k, .. } => {
                let k = *k;
                let r1 = norm(a);
                let r2 = norm(b);
                if r1 == T::zero() || r2 == T::zero() {
                    return exact((r1 - r2).abs());
                }
                // |u - v| / 2 for unit u, v is sin(α/2)
                let half_chord = a
                    .iter()
                    .zip(b)
                    .fold(T::zero(), |s, (x, y)| s + (*x / r1 - *y / r2).powi(2))
                    .sqrt()
                    * T::lit(0.5);
                let two = T::lit(2.0);
                let s = (k * (r1 - r2) / two).sinh().powi(2)
                    + (k * r1).sinh() * (k * r2).sinh() * half_chord * half_chord;
                exact(two * s.sqrt().asinh() / k)
            }
            Self::HalfPlane => {
                let two = T::lit(2.0);
                let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                exact(two * (chord / (two * (a[1] * b[1]).sqrt())).asinh())
            }
            Self::RotSym(p) => {
                let (r1, r2) = (a[0], b[0]);
                let mut dth = (a[1] - b[1]).abs() % T::TAU();
                if dth > T::PI() {
                    dth = T::TAU() - dth;
                }
                if r1 == T::zero() || r2 == T::zero() || dth == T::zero() {
                    return exact((r1 - r2).abs());
                }
                let through_pole = r1 + r2;
                let arc = (r1 - r2).abs() + p.p(r1.min(r2)) * dth;
                Ok(Distance { value: through_pole.min(arc), exact: false })
            }
        }
    }

    /// Area of the geodesic sphere of radius `r` about the basepoint.
    pub fn sphere_area(&self, r: T) -> T {
        match self {
            Self::Euclidean { dim } => unit_sphere_area::<T>(*dim) * r.powi(*dim as i32 - 1),
            Self::Hyperbolic { dim, k } => {
                unit_sphere_area::<T>(*dim) * (r * (*k * r).sinhc()).powi(*dim as i32 - 1)
            }
            Self::HalfPlane => T::TAU() * r.sinh(),
            Self::RotSym(p) => T::TAU() * p.p(r),
        }
    }

    /// `ln sphere_area(r)` for `r > 0`, finite beyond the overflow range of
    /// `sphere_area`.
    pub fn ln_sphere_area(&self, r: T) -> T {
        let ln_p = |k: T| {
            if k * r < T::lit(1e-4) {
                r.ln() + (k * r).sinhc().ln()
            } else {
                (k * r).ln_sinh() - k.ln()
            }
        };
        match self {
            Self::Euclidean { dim: 1 } | Self::Hyperbolic { dim: 1, .. } => T::LN_2(),
            Self::Euclidean { dim } => {
                unit_sphere_area::<T>(*dim).ln() + T::from_usize_lossy(dim - 1) * r.ln()
            }
            Self::Hyperbolic { dim, k } => {
                unit_sphere_area::<T>(*dim).ln() + T::from_usize_lossy(dim - 1) * ln_p(*k)
            }
            Self::HalfPlane => T::TAU().ln() + ln_p(T::one()),
            Self::RotSym(p) => T::TAU().ln() + p.ln_p(r),
        }
    }

    /// Volume of the geodesic ball of radius `r` about the basepoint.
    pub fn ball_volume(&self, r: T) -> Result<T> {
        if r < T::zero() {
            return Err(Error::InvalidArgument(format!("radius must be nonnegative, got {r}")));
        }
        if r == T::zero() {
            return Ok(T::zero());
        }
        let two = T::lit(2.0);
        let v = match self {
            Self::Euclidean { dim } => {
                unit_sphere_area::<T>(*dim) * r.powi(*dim as i32) / T::from_usize_lossy(*dim)
            }
            Self::Hyperbolic { dim: 1, .. } => two * r,
            Self::Hyperbolic { dim: 2, k } => hyperbolic_ball_2d(*k, r),
            Self::HalfPlane => hyperbolic_ball_2d(T::one(), r),
            Self::Hyperbolic { dim: 3, k } => {
                let x = *k * r;
                // ∫₀ˣ sinh² = (sinh 2x − 2x)/4
                let g = if x < T::lit(1e-2) {
                    let x2 = x * x;
                    x2 * x / T::lit(3.0) * (T::one() + x2 / T::lit(5.0) + T::lit(2.0) * x2 * x2 / T::lit(105.0))
                } else {
                    ((two * x).sinh() - two * x) / T::lit(4.0)
                };
                T::lit(4.0) * T::PI() * g / k.powi(3)
            }
            _ => {
                let width = T::lit(0.5).min(r);
                integrate_panels(|s| self.sphere_area(s), &panels(T::zero(), r, width), Tolerance::volume())?.value
            }
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("ball volume of {} at r = {r}", self.label())));
        }
        Ok(v)
    }

    /// `ln vol(B_r)`, computed without overflow for the hyperbolic models.
    pub fn ln_ball_volume(&self, r: T) -> Result<T> {
        let two = T::lit(2.0);
        let large = |x: T| x > T::lit(20.0);
        match self {
            Self::Hyperbolic { dim: 2, k } if large(*k * r) => {
                Ok(T::TAU().ln() + (*k * r).ln_cosh_m1() - two * k.ln())
            }
            Self::HalfPlane if large(r) => Ok(T::TAU().ln() + r.ln_cosh_m1()),
            Self::Hyperbolic { dim: 3, k } if large(*k * r) => {
                let x = two * *k * r;
                // ln(sinh x − x) = ln sinh x + ln(1 − x/sinh x)
                Ok(T::PI().ln() + x.ln_sinh() + (-x.x_over_sinh()).ln_1p() - T::lit(3.0) * k.ln())
            }
            _ => Ok(self.ball_volume(r)?.ln()),
        }
    }

    /// Volume growth `v`: least-squares fit of
    /// `log vol(B_r) ≈ v·r + a·log r + c` over the top half of an
    /// equispaced radius grid on `(0, r_max]`.
    ///
    /// The `log r` column absorbs polynomial growth, so flat space yields 0.
    pub fn volume_growth(&self, r_max: T, samples: usize) -> Result<VolumeGrowth<T>> {
        if samples < 8 || !(r_max > T::zero()) {
            return Err(Error::InvalidArgument("volume_growth needs r_max > 0 and >= 8 samples".into()));
        }
        let r_max = r_max.as_f64();
        let rs: Vec<f64> = (samples / 2..=samples).map(|i| r_max * i as f64 / samples as f64).collect();
        let mut lv = Vec::with_capacity(rs.len());
        for &r in &rs {
            let v = self.ln_ball_volume(T::lit(r))?.as_f64();
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("log volume of {} at r = {r}", self.label())));
            }
            lv.push(v);
        }
        let fit = least_squares(&rs, &lv, &[|r| r, |r| r.ln(), |_| 1.0])?;
        let n = rs.len() - 1;
        let secant = (lv[n] - lv[0]) / (rs[n] - rs[0]);
        Ok(VolumeGrowth { slope: T::lit(fit.coeffs[0]), residual: T::lit(fit.rms), secant: T::lit(secant) })
    }
}

fn hyperbolic_ball_2d<T: Real>(k: T, r: T) -> T {
    // 2π(cosh kr − 1)/k² = 4π sinh²(kr/2)/k²
    let s = (k * r / T::lit(2.0)).sinh() / k;
    T::lit(4.0) * T::PI() * s * s
}

fn norm<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt()
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ManifoldRepr {
    Euclidean {
        dim: usize,
    },
    Hyperbolic {
        dim: usize,
        k: f64,
    },
    HalfPlane,
    RotSym {
        profile: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
    },
}

impl<T: Real> Serialize for ModelManifold<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Self::Euclidean { dim } => ManifoldRepr::Euclidean { dim: *dim },
            Self::Hyperbolic { dim, k } => ManifoldRepr::Hyperbolic { dim: *dim, k: k.as_f64() },
            Self::HalfPlane => ManifoldRepr::HalfPlane,
            Self::RotSym(p) => ManifoldRepr::RotSym {
                profile: p.label().to_string(),
                k: p.k().map(|k| k.as_f64()),
            },
        };
        repr.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for ModelManifold<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ManifoldRepr::deserialize(d)?;
        match repr {
            ManifoldRepr::Euclidean { dim } => Self::euclidean(dim),
            ManifoldRepr::Hyperbolic { dim, k } => Self::hyperbolic(dim, T::lit(k)),
            ManifoldRepr::HalfPlane => Ok(Self::HalfPlane),
            ManifoldRepr::RotSym { profile, k } => {
                ProfileFunction::builtin(&profile, k.map(T::lit)).map(Self::RotSym)
            }
        }
        .map_err(D::Error::custom)
    }
}
