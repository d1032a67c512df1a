//! Floating point abstraction shared by the geometric layer.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }

    /// `ln(sinh x)` for `x > 0`, stable for large arguments.
    fn ln_sinh(self) -> Self {
        let x = self;
        if x > Self::lit(20.0) {
            x - Self::LN_2() + (-(-(x + x)).exp()).ln_1p()
        } else {
            x.sinh().ln()
        }
    }

    /// `ln(cosh x - 1)` for `x > 0`, via `cosh x - 1 = 2 sinh^2(x/2)`.
    fn ln_cosh_m1(self) -> Self {
        Self::LN_2() + Self::lit(2.0) * (self * Self::lit(0.5)).ln_sinh()
    }

    /// `sinh(x)/x` with a series fallback near zero.
    fn sinhc(self) -> Self {
        let x = self;
        if x.abs() < Self::lit(1e-4) {
            let x2 = x * x;
            Self::one() + x2 / Self::lit(6.0) + x2 * x2 / Self::lit(120.0)
        } else {
            x.sinh() / x
        }
    }

    /// `x / sinh(x)` with a series fallback for `|x| < 1e-6`.
    fn x_over_sinh(self) -> Self {
        let x = self.abs();
        if x < Self::lit(1e-6) {
            Self::one() - x * x / Self::lit(6.0)
        } else if x > Self::lit(20.0) {
            // 2x e^{-x} / (1 - e^{-2x})
            let e = (-x).exp();
            Self::lit(2.0) * x * e / (-(e * e)).ln_1p().exp()
        } else {
            // sinh x = (e^x - e^{-x})/2 = e^{-x} expm1(2x) / 2
            Self::lit(2.0) * x * x.exp() / (x + x).exp_m1()
        }
    }

    /// `ln(x / sinh x)`, finite for every finite `x`.
    fn ln_x_over_sinh(self) -> Self {
        let x = self.abs();
        if x > Self::lit(20.0) {
            x.ln() - x.ln_sinh()
        } else {
            x.x_over_sinh().ln()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
