//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error satisfies `err <= max(abs, rel * |value|)`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_599_0,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

/// Absolute/relative tolerance pair.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_intervals: usize,
}

impl<T: Real> Tolerance<T> {
    /// The relative tolerance is clamped to `64·ε` of the scalar type.
    pub fn new(abs: f64, rel: f64) -> Self {
        let rel = T::lit(rel).max(T::epsilon() * T::lit(64.0));
        Self { abs: T::lit(abs), rel, max_intervals: 4000 }
    }

    /// Tolerance used for ball volumes.
    pub fn volume() -> Self {
        Self::new(1e-10, 1e-8)
    }

    /// Tight tolerance for kernel functionals (entropy increments need ~1e-10).
    pub fn tight() -> Self {
        Self::new(1e-13, 1e-12)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quad<T> {
    pub value: T,
    pub error: T,
    pub evals: usize,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = radius * T::lit(x);
        let s = f(center - dx) + f(center + dx);
        kronrod = kronrod + s * T::lit(w);
        if j % 2 == 1 {
            gauss = gauss + s * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * radius;
    let err = ((kronrod - gauss) * radius).abs();
    (value, err)
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: Tolerance<T>) -> Result<Quad<T>> {
    integrate_panels(f, &[a, b], tol)
}

/// Integrates `f` over consecutive panels `[p0,p1], [p1,p2], ...`.
///
/// Supplying breakpoints near features (peaks, kinks) keeps the initial
/// sampling from stepping over them.
pub fn integrate_panels<T: Real, F: Fn(T) -> T>(
    f: F,
    breakpoints: &[T],
    tol: Tolerance<T>,
) -> Result<Quad<T>> {
    if breakpoints.len() < 2 {
        return Ok(Quad { value: T::zero(), error: T::zero(), evals: 0 });
    }
    let mut heap = BinaryHeap::new();
    let mut value = T::zero();
    let mut error = T::zero();
    let mut evals = 0;
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (v, e) = gk15(&f, a, b);
        evals += 15;
        value = value + v;
        error = error + e;
        heap.push(Segment { a, b, value: v, error: e });
    }
    let half = T::lit(0.5);
    while error > tol.abs.max(tol.rel * value.abs()) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                a: breakpoints[0].as_f64(),
                b: breakpoints[breakpoints.len() - 1].as_f64(),
                value: value.as_f64(),
                error: error.as_f64(),
            });
        }
        let Some(seg) = heap.pop() else { break };
        let mid = half * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // interval exhausted at machine precision
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&f, seg.a, mid);
        let (v2, e2) = gk15(&f, mid, seg.b);
        evals += 30;
        value = value - seg.value + v1 + v2;
        error = error - seg.error + e1 + e2;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    if !value.is_finite() {
        return Err(Error::NonFinite("quadrature value".into()));
    }
    // recompute the error sum to avoid drift from repeated subtraction
    let error = heap.iter().fold(T::zero(), |acc, s| acc + s.error);
    Ok(Quad { value, error, evals })
}

/// Evenly spaced breakpoints on `[a, b]` with panels no wider than `width`.
pub fn panels<T: Real>(a: T, b: T, width: T) -> Vec<T> {
    let n = ((b - a) / width).ceil().to_usize().unwrap_or(1).clamp(1, 100_000);
    let h = (b - a) / T::from_usize_lossy(n);
    (0..=n)
        .map(|i| if i == n { b } else { a + h * T::from_usize_lossy(i) })
        .collect()
}
