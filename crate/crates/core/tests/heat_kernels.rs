use approx::assert_relative_eq;
use rdl_core::heat_kernels::{
    gaussian_bound_constant, q_euclidean, q_hyperbolic, radial_fokker_planck, zero_two_defect,
    KernelEval, KernelForm,
};
use rdl_core::quadrature::{integrate_panels, panels, Tolerance};
use rdl_core::{Error, Manifold, Profile};
use std::f64::consts::PI;

#[test]
fn euclidean_point_values() {
    assert_relative_eq!(q_euclidean(1.0, 1, 0.0), 0.398_942_280_401_432_7, max_relative = 1e-15);
    assert_relative_eq!(q_euclidean(2.0, 1, 0.0), 1.0 / (4.0 * PI).sqrt(), max_relative = 1e-15);
    assert_relative_eq!(q_euclidean(2.0, 3, 1.5), (4.0 * PI).powf(-1.5) * (-0.5625f64).exp(), max_relative = 1e-14);
}

#[test]
fn euclidean_line_normalization() {
    let f = |x: f64| q_euclidean(1.0, 1, (x - 1.0).abs());
    let q = integrate_panels(f, &panels(-40.0, 40.0, 1.0), Tolerance::tight()).unwrap();
    assert!((q.value - 1.0).abs() < 1e-12);
}

#[test]
fn h3_point_values() {
    let c = (2.0 * PI).powf(-1.5);
    assert_relative_eq!(q_hyperbolic(1.0, 3, 1.0, 0.0).unwrap(), c * (-0.5f64).exp(), max_relative = 1e-14);
    assert_relative_eq!(q_hyperbolic(1.0, 3, 1.0, 1e-9).unwrap(), 0.038_510, max_relative = 5e-5);
    let v = q_hyperbolic(1.0, 3, 1.0, 1.0).unwrap();
    assert_relative_eq!(v, c * (-1.0f64).exp() / 1.0f64.sinh(), max_relative = 1e-14);
    assert_relative_eq!(v, 0.019_878, max_relative = 2e-4);
}

#[test]
fn h2_matches_high_precision_values() {
    // independent extended-precision evaluation of the unsubstituted integral
    let frozen = [
        (1.0, 0.0, 0.135_056_000_240_419_82),
        (1.0, 1.0, 0.075_726_752_643_569_165),
        (4.0, 2.0, 0.009_684_541_288_703_055_5),
        (0.5, 0.3, 0.265_863_194_753_603_1),
        (10.0, 5.0, 0.000_286_061_136_183_179_5),
    ];
    for (t, r, want) in frozen {
        let got = q_hyperbolic(t, 2, 1.0, r).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-11);
    }
}

#[test]
fn stochastic_completeness() {
    for k in [1.0, 2.0] {
        for dim in [2, 3] {
            let kernel = KernelEval::new(&Manifold::hyperbolic(dim, k).unwrap()).unwrap();
            for t in [0.5, 1.0, 4.0] {
                let m = kernel.mass(t).unwrap();
                assert!((m - 1.0).abs() < 1e-9, "dim {dim} k {k} t {t}: {m}");
            }
        }
    }
    for dim in 1..=3 {
        let kernel = KernelEval::new(&Manifold::euclidean(dim).unwrap()).unwrap();
        assert!((kernel.mass(3.0).unwrap() - 1.0).abs() < 1e-10);
    }
    let hp = KernelEval::new(&Manifold::HalfPlane).unwrap();
    assert!((hp.ensure_normalized(40.0).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn kernel_forms_and_rejections() {
    assert_eq!(KernelEval::new(&Manifold::hyperbolic(2, 1.0).unwrap()).unwrap().form, KernelForm::ClosedForm);
    assert_eq!(KernelEval::new(&Manifold::hyperbolic(3, 0.5).unwrap()).unwrap().form, KernelForm::ScaledHyperbolic);
    assert_eq!(KernelEval::new(&Manifold::RotSym(Profile::kaimanovich())).unwrap().form, KernelForm::RadialPDE);
    assert!(matches!(KernelEval::new(&Manifold::hyperbolic(4, 1.0).unwrap()), Err(Error::NoKernel(_))));
    assert!(matches!(KernelEval::new(&Manifold::euclidean(5).unwrap()), Err(Error::NoKernel(_))));
}

#[test]
fn chapman_kolmogorov_h3() {
    // at y = o: ∫ q(s,o,x) q(t,x,o) dx = q(s+t,o,o)
    let m = Manifold::hyperbolic(3, 1.0).unwrap();
    let kernel = KernelEval::new(&m).unwrap();
    for (s, t) in [(0.5, 0.5), (0.5, 1.0), (1.0, 1.0)] {
        let lhs = kernel
            .radial_integral(s, |r, lqa, _| (lqa + kernel.ln_q(t, r).unwrap()).exp(), Tolerance::tight())
            .unwrap()
            .value;
        let rhs = kernel.q(s + t, 0.0).unwrap();
        assert!((lhs / rhs - 1.0).abs() < 1e-4, "({s},{t}): {lhs} vs {rhs}");
    }
}

#[test]
fn chapman_kolmogorov_h2() {
    let kernel = KernelEval::new(&Manifold::HalfPlane).unwrap();
    for (s, t) in [(0.5, 0.5), (0.5, 1.0), (1.0, 1.0)] {
        let lhs = kernel
            .radial_integral(s, |r, lqa, _| (lqa + kernel.ln_q(t, r).unwrap()).exp(), Tolerance::new(1e-12, 1e-10))
            .unwrap()
            .value;
        let rhs = kernel.q(s + t, 0.0).unwrap();
        assert!((lhs / rhs - 1.0).abs() < 1e-4, "({s},{t}): {lhs} vs {rhs}");
    }
}

#[test]
fn gaussian_bound_constant_euclidean_line() {
    let c = gaussian_bound_constant(&Manifold::euclidean(1).unwrap(), 3.0, (1.0, 10.0), 20.0).unwrap();
    assert_relative_eq!(c, (2.0 * PI).powf(-0.5), max_relative = 1e-12);
}

#[test]
fn gaussian_bound_constant_h2_anchor_and_monotone_in_d() {
    let h2 = Manifold::hyperbolic(2, 1.0).unwrap();
    let c = gaussian_bound_constant(&h2, 3.0, (1.0, 10.0), 30.0).unwrap();
    // sup sits at r = 0, t = 1
    assert_relative_eq!(c, 0.135_056_000_240_419_82, max_relative = 1e-10);
    let lo = gaussian_bound_constant(&h2, 2.01, (1.0, 10.0), 30.0).unwrap();
    let hi = gaussian_bound_constant(&h2, 4.0, (1.0, 10.0), 30.0).unwrap();
    assert!(lo >= hi);
    assert!(gaussian_bound_constant(&h2, 2.0, (1.0, 10.0), 30.0).is_err());
    assert!(gaussian_bound_constant(&h2, 3.0, (0.5, 10.0), 30.0).is_err());
}

/// 2∫|φ_{2t} − φ_t| on ℝ by a trapezoid rule on a fine uniform grid.
fn gaussian_tv_oracle(t: f64) -> f64 {
    let n = 400_000;
    let a = 40.0 * t.sqrt();
    let h = 2.0 * a / n as f64;
    let g = |x: f64| {
        let p1 = (-x * x / (2.0 * t)).exp() / (2.0 * PI * t).sqrt();
        let p2 = (-x * x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
        (p1 - p2).abs()
    };
    let mut s = 0.5 * (g(-a) + g(a));
    for i in 1..n {
        s += g(-a + i as f64 * h);
    }
    s * h
}

#[test]
fn zero_two_defect_euclidean_matches_tv_oracle() {
    let line = Manifold::euclidean(1).unwrap();
    let oracle = gaussian_tv_oracle(1.0);
    for t in [0.5, 1.0, 4.0] {
        let v = zero_two_defect(&line, t, t).unwrap();
        assert!((v - oracle).abs() < 1e-6, "t={t}: {v} vs {oracle}");
    }
}

#[test]
fn zero_two_defect_h2_below_two() {
    let v = zero_two_defect(&Manifold::hyperbolic(2, 1.0).unwrap(), 1.0, 1.0).unwrap();
    assert!(v < 1.5, "{v}");
    assert!(v > 0.1);
}

#[test]
fn zero_two_defect_non_increasing_in_t() {
    let h2 = Manifold::HalfPlane;
    let mut prev = 2.0;
    for t in [0.5, 1.0, 2.0, 4.0] {
        let v = zero_two_defect(&h2, 1.0, t).unwrap();
        assert!(v <= prev + 1e-9, "t={t}: {v} > {prev}");
        prev = v;
    }
}

#[test]
fn fokker_planck_euclid_matches_planar_gaussian() {
    let g = radial_fokker_planck(&Profile::euclid(), 1e-3, 4e-5, 0.01, 1.0, 10.0).unwrap();
    let j = g.snapshot(1.0);
    let l1 = g.l1_distance(j, |r| r * (-r * r / 2.0).exp());
    assert!(l1 < 2e-2, "L1 = {l1}");
    for m in &g.mass {
        assert!(*m <= 1.0 + 1e-12 && *m >= 1.0 - 1e-4);
    }
}

#[test]
fn fokker_planck_hyperbolic_matches_closed_form() {
    for k in [1.0, 2.0] {
        let g = radial_fokker_planck(&Profile::hyperbolic(k), 1e-3, 4e-5, 0.01, 1.0, 12.0).unwrap();
        let m = Manifold::hyperbolic(2, k).unwrap();
        let kernel = KernelEval::new(&m).unwrap();
        let j = g.snapshot(1.0);
        let l1 = g.l1_distance(j, |r| kernel.q(1.0, r).unwrap() * m.sphere_area(r));
        assert!(l1 < 2e-2, "k={k}: L1 = {l1}");
    }
}
