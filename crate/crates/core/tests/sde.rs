use rdl_core::heat_kernels::{radial_fokker_planck, KernelEval};
use rdl_core::quadrature::Tolerance;
use rdl_core::sde::{kaimanovich_tail_limit, simulate_halfplane, simulate_radial, SimConfig};
use rdl_core::stats::{ks_statistic, Estimate};
use rdl_core::{Manifold, Profile};

fn cfg(seed: u64, n_paths: usize, dt: f64, t_max: f64, stride: usize) -> SimConfig {
    SimConfig { seed, n_paths, dt, t_max, record_stride: stride, ..Default::default() }
}

fn last(v: &[f64]) -> f64 {
    *v.last().unwrap()
}

#[test]
fn halfplane_log_y_is_brownian_with_drift() {
    let paths = simulate_halfplane(&cfg(11, 10_000, 0.01, 10.0, 1000), (0.0, 1.0)).unwrap();
    let logs: Vec<f64> = paths.iter().map(|p| last(&p.y).ln()).collect();
    let e = Estimate::of(&logs);
    assert!(e.covers(-5.0, 3.0), "mean {} se {}", e.mean, e.se);
    assert!(paths.iter().all(|p| p.y.iter().all(|&y| y > 0.0)));
}

fn halfplane_distances(c: &SimConfig) -> Vec<Vec<f64>> {
    let hp = Manifold::HalfPlane;
    simulate_halfplane(c, (0.0, 1.0))
        .unwrap()
        .iter()
        .map(|p| {
            p.x.iter()
                .zip(&p.y)
                .map(|(&x, &y)| hp.distance(&[0.0, 1.0], &[x, y]).unwrap().value)
                .collect()
        })
        .collect()
}

#[test]
fn halfplane_distance_matches_kernel_and_drift_increment() {
    let c = cfg(12, 10_000, 0.01, 20.0, 500);
    let d = halfplane_distances(&c);
    // records at t = 0, 5, 10, 15, 20
    let d20: Vec<f64> = d.iter().map(|v| v[4]).collect();
    let inc: Vec<f64> = d.iter().map(|v| (v[4] - v[3]) / 5.0).collect();
    let kernel = KernelEval::new(&Manifold::HalfPlane).unwrap();
    let ell20 = kernel
        .radial_integral(20.0, |r, lqa, _| r * lqa.exp(), Tolerance::new(1e-10, 1e-10))
        .unwrap()
        .value;
    let e = Estimate::of(&d20);
    assert!(e.covers(ell20, 3.0), "E d = {} ± {} vs quadrature {ell20}", e.mean, e.se);
    let ei = Estimate::of(&inc);
    assert!(ei.covers(0.5, 3.0) && (ei.mean - 0.5).abs() < 0.02, "increment {} ± {}", ei.mean, ei.se);
}

#[test]
fn halfplane_step_halving_is_consistent() {
    let mean_d = |dt: f64| {
        let d = halfplane_distances(&cfg(13, 4000, dt, 5.0, (5.0 / dt).round() as usize));
        Estimate::of(&d.iter().map(|v| *v.last().unwrap()).collect::<Vec<_>>())
    };
    let (a, b) = (mean_d(0.02), mean_d(0.01));
    assert!((a.mean - b.mean).abs() < 3.0 * (a.se * a.se + b.se * b.se).sqrt());
}

#[test]
fn determinism_across_thread_counts() {
    let c = cfg(99, 64, 0.01, 1.0, 10);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| (simulate_halfplane(&c, (0.3, 2.0)).unwrap(), simulate_radial(&Profile::kaimanovich(), &c, 1.0).unwrap()))
    };
    assert_eq!(run(1), run(4));
}

fn radial_ks(profile: &Profile, r_max: f64) -> f64 {
    let c = cfg(21, 10_000, 1e-3, 1.0, 1000);
    let paths = simulate_radial(profile, &c, 1e-3).unwrap();
    let reflections: usize = paths.iter().map(|p| p.reflections).sum();
    assert!(reflections < 100, "reflections {reflections}");
    let ends: Vec<f64> = paths.iter().map(|p| last(&p.r)).collect();
    let grid = radial_fokker_planck(profile, 1e-3, 4e-5, 0.01, 1.0, r_max).unwrap();
    let j = grid.snapshot(1.0);
    ks_statistic(&ends, |r| grid.cdf(j, r))
}

#[test]
fn radial_euclid_matches_fokker_planck() {
    let ks = radial_ks(&Profile::euclid(), 10.0);
    assert!(ks <= 0.05, "KS = {ks}");
}

#[test]
fn radial_hyperbolic_matches_fokker_planck() {
    let ks = radial_ks(&Profile::hyperbolic(1.0), 12.0);
    assert!(ks <= 0.05, "KS = {ks}");
}

#[test]
fn radial_hyperbolic_agrees_with_halfplane_chart() {
    let c = cfg(31, 10_000, 0.01, 20.0, 500);
    let r = simulate_radial(&Profile::hyperbolic(1.0), &c, 1e-3).unwrap();
    let r20 = Estimate::of(&r.iter().map(|p| p.r[4]).collect::<Vec<_>>());
    let inc = Estimate::of(&r.iter().map(|p| (p.r[4] - p.r[3]) / 5.0).collect::<Vec<_>>());
    let d = halfplane_distances(&cfg(32, 10_000, 0.01, 20.0, 500));
    let d20 = Estimate::of(&d.iter().map(|v| v[4]).collect::<Vec<_>>());
    let gap = (r20.mean - d20.mean).abs() / (r20.se * r20.se + d20.se * d20.se).sqrt();
    assert!(gap < 3.0, "radial {} vs half-plane {}", r20.mean, d20.mean);
    assert!(inc.covers(0.5, 3.0), "radial increment {} ± {}", inc.mean, inc.se);
}

#[test]
fn kaimanovich_escapes_linearly() {
    let paths = simulate_radial(&Profile::kaimanovich(), &cfg(41, 1000, 1e-3, 10.0, 10_000), 1.0).unwrap();
    let frac = paths.iter().filter(|p| last(&p.r) > 5.0).count() as f64 / paths.len() as f64;
    assert!(frac > 0.99, "fraction {frac}");
    assert!((paths[0].h_minus_t[0] - 2f64.ln()).abs() < 1e-15);
    assert!(paths.iter().all(|p| p.tau.windows(2).all(|w| w[1] >= w[0])));
}

#[test]
fn kaimanovich_tail_limit_is_non_degenerate() {
    let tail = kaimanovich_tail_limit(&cfg(5, 1000, 1e-3, 10.0, 1)).unwrap();
    assert!(tail.n_converged as f64 >= 0.95 * 1000.0, "converged {}", tail.n_converged);
    assert!(tail.std > 0.1, "std {}", tail.std);
    // the mean of the clock tail is infinite (∫ r⁻² against the planar
    // Green function diverges at the pole), so test its bulk
    let mut tau: Vec<f64> = tail.paths.iter().map(|p| p.tau_tail).collect();
    tau.sort_by(|a, b| a.total_cmp(b));
    assert!(tau[tau.len() / 2] <= 1e-3, "median clock tail {}", tau[tau.len() / 2]);
    let small = tau.iter().filter(|&&x| x <= 1e-3).count();
    assert!(small as f64 >= 0.95 * tau.len() as f64, "{small} paths with small clock tail");
}
