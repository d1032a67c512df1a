use approx::assert_relative_eq;
use proptest::prelude::*;
use rdl_core::estimators::*;
use rdl_core::{Error, Manifold, Profile};
use std::f64::consts::{E, PI};

fn h(dim: usize, k: f64) -> Manifold {
    Manifold::hyperbolic(dim, k).unwrap()
}

fn euclid(dim: usize) -> Manifold {
    Manifold::euclidean(dim).unwrap()
}

#[test]
fn euclidean_entropy_matches_gaussian() {
    for dim in 1..=3 {
        for t in [0.5, 1.0, 7.0, 40.0] {
            let want = 0.5 * dim as f64 * (2.0 * PI * E * t).ln();
            let got = entropy_quadrature(&euclid(dim), t).unwrap();
            assert!((got - want).abs() < 1e-6, "d={dim} t={t}: {got} vs {want}");
        }
    }
    assert!((entropy_quadrature(&euclid(1), 1.0).unwrap() - 1.4189).abs() < 1e-4);
}

#[test]
fn euclidean_mutual_information() {
    for dim in 1..=3 {
        for (t, big_t) in [(1.0f64, 2.0f64), (0.5, 3.0), (2.0, 50.0)] {
            let want = 0.5 * dim as f64 * (big_t / (big_t - t)).ln();
            let got = mutual_information(&euclid(dim), t, big_t).unwrap();
            assert!((got - want).abs() < 1e-6, "d={dim}: {got} vs {want}");
        }
    }
    assert!((mutual_information(&euclid(1), 1.0, 2.0).unwrap() - 0.3466).abs() < 1e-4);
    assert!(mutual_information(&euclid(1), 1.0, 100.0).unwrap() <= 0.006);
    assert!(matches!(mutual_information(&euclid(1), 2.0, 1.0), Err(Error::InvalidArgument(_))));
}

#[test]
fn euclidean_expected_distance() {
    // E|N(0, tI_d)|
    let oracle = |d: usize, t: f64| match d {
        1 => (2.0 * t / PI).sqrt(),
        2 => (PI * t / 2.0).sqrt(),
        _ => 2.0 * (2.0 * t / PI).sqrt(),
    };
    for d in 1..=3 {
        for t in [1.0, 25.0, 100.0] {
            assert_relative_eq!(expected_distance(&euclid(d), t).unwrap(), oracle(d, t), max_relative = 1e-9);
        }
    }
    let (a, b) = (drift_quadrature(&euclid(2), 100.0).unwrap(), drift_quadrature(&euclid(2), 200.0).unwrap());
    assert!((a - 0.1253).abs() < 1e-4);
    assert_relative_eq!(a / b, 2f64.sqrt(), max_relative = 1e-9);
}

#[test]
fn h3_expected_distance_matches_folded_gaussian() {
    // r_t has density (r/t)(φ(r−t) − φ(r+t)) with φ the N(0,t) density, so
    // ℓ_t = E[sign(X)X²]/t for X ~ N(t,t); values from extended precision
    let frozen = [(1.0, 1.849_320_433_312_458_5), (7.0, 7.998_539_028_154_941), (40.0, 40.999_999_999_988_65)];
    for (t, want) in frozen {
        assert_relative_eq!(expected_distance(&h(3, 1.0), t).unwrap(), want, max_relative = 1e-10);
    }
    assert_relative_eq!(entropy_quadrature(&h(3, 1.0), 1.0).unwrap(), 5.825_962_545_056_639, max_relative = 1e-10);
    assert_relative_eq!(entropy_quadrature(&h(3, 1.0), 7.0).unwrap(), 19.455_690_107_951_97, max_relative = 1e-10);
}

#[test]
fn curvature_scaling_of_the_drift() {
    // ℓ_t on H_k equals ℓ_{k²t}/k on H_1
    for dim in [2, 3] {
        let a = expected_distance(&h(dim, 2.0), 3.0).unwrap();
        let b = expected_distance(&h(dim, 1.0), 12.0).unwrap();
        assert_relative_eq!(a, b / 2.0, max_relative = 1e-9);
    }
}

#[test]
fn h2_literal_ratio_carries_the_offset() {
    // the constant offset of E r_t − t/2 keeps ℓ_40/40 well above 1/2
    let ratio = drift_quadrature(&Manifold::HalfPlane, 40.0).unwrap();
    assert!((ratio - 0.534_651).abs() < 1e-5, "{ratio}");
    let inc = (expected_distance(&Manifold::HalfPlane, 40.0).unwrap()
        - expected_distance(&Manifold::HalfPlane, 30.0).unwrap())
        / 10.0;
    assert!((inc - 0.5).abs() < 5e-4, "increment {inc}");
}

#[test]
#[ignore = "literal ratio at t = 40 is 0.5347; a ±0.005 band around 1/2 ignores the O(1/t) offset"]
fn h2_literal_ratio_near_half() {
    let ratio = drift_quadrature(&Manifold::HalfPlane, 40.0).unwrap();
    assert!((0.495..=0.505).contains(&ratio), "{ratio}");
}

#[test]
fn subadditivity_audit() {
    let hp = Manifold::HalfPlane;
    assert!(expected_distance(&hp, 2.0).unwrap() <= 2.0 * expected_distance(&hp, 1.0).unwrap() + 1e-6);
    let grid = [1.0, 2.0, 4.0, 8.0, 16.0];
    for space in [hp, euclid(1), h(3, 1.0)] {
        let d = drift_subadditive_limit(&space, &grid).unwrap();
        assert!(d.violations.is_empty(), "{}: {:?}", space.label(), d.violations);
        assert!(d.ratio_monotone, "{}", space.label());
        assert_eq!(d.ell_hat, d.rate.ratio);
    }
    assert!(drift_subadditive_limit(&euclid(1), &[1.0, 2.0, 3.0]).is_err());
    assert!(drift_subadditive_limit(&euclid(1), &[1.0, 3.0, 2.0, 4.0]).is_err());
}

#[test]
fn rates_on_the_default_grid() {
    let d = drift_subadditive_limit(&Manifold::HalfPlane, &default_t_grid(&Manifold::HalfPlane)).unwrap();
    assert!((d.rate.extrapolated - 0.5).abs() < 1e-3 && d.rate.converged);
    let e = entropy_rate(&Manifold::HalfPlane, &default_t_grid(&Manifold::HalfPlane)).unwrap();
    assert!((e.extrapolated - 0.5).abs() < 0.02 && e.converged, "{e:?}");
    // h_t/t is still 0.64 at t = 40; the ratio alone converges like log t / t
    assert!(e.samples[0].1 / 40.0 > 0.6);
    for d in 1..=3 {
        let g = default_t_grid(&euclid(d));
        assert!(drift_subadditive_limit(&euclid(d), &g).unwrap().rate.extrapolated.abs() < 1e-6);
        assert!(entropy_rate(&euclid(d), &g).unwrap().extrapolated.abs() < 1e-6);
    }
}

#[test]
fn h2_small_time_entropy_is_euclidean() {
    let gap = |t: f64| entropy_quadrature(&Manifold::HalfPlane, t).unwrap() - (2.0 * PI * E * t).ln();
    let (a, b) = (gap(0.4), gap(0.1));
    assert!(b.abs() < 0.06 && b.abs() < a.abs() / 3.0, "gaps {a} {b}");
}

#[test]
fn mutual_information_non_increasing_in_horizon() {
    for space in [Manifold::HalfPlane, h(3, 0.5), euclid(2)] {
        let is: Vec<f64> = [1.5, 2.0, 5.0, 20.0, 100.0]
            .iter()
            .map(|&big_t| mutual_information(&space, 1.0, big_t).unwrap())
            .collect();
        assert!(is.iter().all(|&i| i >= 0.0));
        assert!(is.windows(2).all(|w| w[1] <= w[0] + 1e-8), "{}: {is:?}", space.label());
    }
}

#[test]
fn rotationally_symmetric_profiles_have_no_quadrature() {
    let m = Manifold::RotSym(Profile::kaimanovich());
    assert!(matches!(entropy_quadrature(&m, 1.0), Err(Error::NoKernel(_))));
    assert!(inequality_report(&ReportTarget::Space(m), None, None).is_err());
}

#[test]
fn ensemble_examples() {
    let drift_only = |w: f64, d: f64| Component { space: None, weight: w, drift: Some(d) };
    let e = Ensemble::new(vec![drift_only(0.5, 1.0), drift_only(0.5, 2.0)]).unwrap();
    assert_eq!(ensemble_drift(&e, &[1.0, 2.0]).unwrap(), (1.5, 2.0));
    let single = Ensemble::new(vec![drift_only(1.0, 0.7)]).unwrap();
    let (l, lp) = ensemble_drift(&single, &[0.7]).unwrap();
    assert_eq!(l, lp);
    let q = Ensemble::new(vec![drift_only(0.25, 3.0), drift_only(0.75, 5.0)]).unwrap();
    assert_eq!(ensemble_drift(&q, &[3.0, 5.0]).unwrap().0, 0.25 * 3.0 + 0.75 * 5.0);
    assert!(ensemble_drift(&q, &[1.0]).is_err());

    assert!(Ensemble::new(vec![drift_only(0.5, 1.0), drift_only(0.4, 2.0)]).is_err());
    assert!(Ensemble::new(vec![drift_only(1.0, 1.0), drift_only(0.0, 2.0)]).is_err());
    assert!(Ensemble::new(vec![Component { space: None, weight: 1.0, drift: None }]).is_err());
    assert!(Ensemble::new(vec![]).is_err());
    assert!(Ensemble::from_json(r#"{"components":[{"weight":0.5,"drift":1}]}"#).is_err());

    let json = serde_json::to_string(&e).unwrap();
    assert_eq!(Ensemble::from_json(&json).unwrap(), e);
}

#[test]
fn ensemble_report() {
    let e = Ensemble::from_json(
        r#"{"components":[{"weight":0.5,"drift":1.0},{"weight":0.5,"drift":2.0}]}"#,
    )
    .unwrap();
    let r = inequality_report(&ReportTarget::Ensemble(e), None, None).unwrap();
    assert_eq!((r.ell.value, r.ell_plus), (1.5, 2.0));
    assert!(r.passes() && r.all_converged());

    let mixed = Ensemble::new(vec![
        Component { space: Some(Manifold::HalfPlane), weight: 0.5, drift: None },
        Component { space: Some(euclid(2)), weight: 0.5, drift: None },
    ])
    .unwrap();
    let r = inequality_report(&ReportTarget::Ensemble(mixed), None, None).unwrap();
    assert!((r.ell.value - 0.25).abs() < 1e-3 && (r.ell_plus - 0.5).abs() < 1e-3);
    assert!((r.entropy_h.as_ref().unwrap().value - 0.25).abs() < 0.01);
    assert!(r.passes(), "{}", r.to_table());
    assert_eq!(r.components.len(), 2);
}

#[test]
fn finite_dimension_bound() {
    let i = mutual_information(&euclid(1), 1.0, 100.0).unwrap();
    assert!(finite_dim_bound_check(i, 1).unwrap().pass);
    assert!((finite_dim_bound_check(0.0, 3).unwrap().threshold - 1.0986).abs() < 1e-4);
    let i_h2 = mutual_information(&Manifold::HalfPlane, 1.0, 100.0).unwrap();
    assert!((i_h2 - 0.5).abs() < 0.05);
    assert!(!finite_dim_bound_check(i_h2, 1).unwrap().pass);
    assert!(finite_dim_bound_check(0.1, 0).is_err());
}

fn check_named<'a>(r: &'a AsymptoticReport, name: &str) -> &'a InequalityCheck {
    r.inequality_status
        .iter()
        .chain(&r.equality_status)
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn h2_report_equality_case() {
    let r = inequality_report(&ReportTarget::Space(Manifold::HalfPlane), None, None).unwrap();
    assert_eq!(r.schema, "v1");
    assert!(r.passes() && r.converged, "{}", r.to_table());
    assert!((r.ell.value - 0.5).abs() < 1e-3);
    assert!((r.entropy_h.as_ref().unwrap().value - 0.5).abs() < 0.02);
    assert!((r.volume_v.unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(r.k_functional, Some(0.5));
    assert!(r.equality_gap.unwrap() <= 1e-10);
    let c = check_named(&r, "half_ell_sq <= h");
    assert!((c.lhs - 0.125).abs() < 1e-3);
    assert!(check_named(&r, "two_ell_sq = h").slack <= 0.05);
    assert!(check_named(&r, "h = ell * v").slack <= 0.05);
    assert!(r.ell.halfwidth > 0.0 && r.entropy_h.as_ref().unwrap().halfwidth > 0.0);

    let back: AsymptoticReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
    assert!(r.to_table().contains("two_ell_sq = h"));
}

#[test]
fn inequality_chain_on_catalog_grid() {
    let mut spaces = vec![euclid(1), euclid(2), euclid(3)];
    for k in [0.5, 1.0, 2.0] {
        spaces.push(h(2, k));
        spaces.push(h(3, k));
    }
    for space in spaces {
        let r = inequality_report(&ReportTarget::Space(space.clone()), None, None).unwrap();
        assert!(r.passes() && r.converged, "{}", r.to_table());
        for c in &r.inequality_status {
            // every pass flag follows from lhs, rhs and slack
            assert_eq!(c.slack, normalized_slack(c.lhs, c.rhs));
            assert_eq!(c.pass, c.slack >= -SLACK_TOL);
        }
        // h = 0 exactly when ℓ = 0
        let (ell, hh) = (r.ell.value, r.entropy_h.as_ref().unwrap().value);
        assert_eq!(ell < ZERO_RATE_TOL, hh < ZERO_RATE_TOL, "{}", space.label());
        assert_eq!(r.liouville_consistent, Some(true));
        if let Manifold::Hyperbolic { dim: 2, .. } = space {
            // the homogeneous equality case 2ℓ² = h
            assert!((2.0 * ell * ell - hh).abs() <= 0.05 * hh);
        }
        if let Manifold::Euclidean { .. } = space {
            assert_eq!((ell, hh, r.volume_v.unwrap()), (0.0, 0.0, 0.0));
        }
    }
}

proptest! {
    #[test]
    fn slack_sign_matches_order(lhs in -10.0..10.0f64, rhs in -10.0..10.0f64) {
        let s = normalized_slack(lhs, rhs);
        prop_assert_eq!(s >= 0.0, rhs >= lhs);
        prop_assert!(s.abs() <= 2.0);
    }

    #[test]
    fn ensemble_drift_bounds(w in 0.01..0.99f64, a in 0.0..5.0f64, b in 0.0..5.0f64) {
        let e = Ensemble::new(vec![
            Component { space: None, weight: w, drift: Some(a) },
            Component { space: None, weight: 1.0 - w, drift: Some(b) },
        ]);
        // 1 − w + w may round away from 1 by more than the tolerance only for
        // pathological w; those are rejected, not mis-summed
        if let Ok(e) = e {
            let (l, lp) = ensemble_drift(&e, &[a, b]).unwrap();
            prop_assert!(l <= lp + 1e-12);
            prop_assert!(l >= a.min(b) - 1e-12);
            prop_assert_eq!(lp, a.max(b));
        }
    }
}
