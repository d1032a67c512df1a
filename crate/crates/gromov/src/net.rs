//! Finite nets of geodesic balls in the model spaces.
//!
//! Candidates are a seeded volume-uniform sample of `B_radius(o)` with the
//! basepoint prepended. The sample depends on `(space, radius, seed, pool)`
//! only, so nets of different mesh share their points, and the same seed
//! on `H²_k` and `H²_{k'}` gives radially rescaled samples.

use crate::error::{GromovError, Result};
use crate::space::{AdmissibleExtension, FinitePointedSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdl_core::model_spaces::ModelManifold;
use rdl_core::Real;

/// Candidate sample size used by `net_from_manifold`.
pub const DEFAULT_POOL: usize = 4096;

/// Net together with its chart coordinates.
#[derive(Debug, Clone)]
pub struct Net<T> {
    pub space: FinitePointedSpace<T>,
    pub points: Vec<Vec<T>>,
    /// Positions of the net points in the candidate pool.
    pub pool_indices: Vec<usize>,
    /// Largest candidate-to-net distance (at most `mesh`).
    pub covering_radius: T,
}

fn check_space<T: Real>(space: &ModelManifold<T>) -> Result<()> {
    if let ModelManifold::RotSym(_) = space {
        return Err(GromovError::InvalidArgument(
            "nets need exact pairwise distances; rotationally symmetric surfaces are not supported".into(),
        ));
    }
    Ok(())
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    if dim == 1 {
        return vec![if rng.gen::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Radius with `vol(B_r) = u · vol(B_R)`.
fn invert_volume<T: Real>(space: &ModelManifold<T>, u: f64, radius: T, total: T) -> Result<T> {
    let target = T::lit(u) * total;
    let (mut lo, mut hi) = (T::zero(), radius);
    for _ in 0..64 {
        let mid = (lo + hi) * T::lit(0.5);
        if space.ball_volume(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

/// Chart coordinates of the point at geodesic polar `(r, θ)` from the basepoint.
fn chart_point<T: Real>(space: &ModelManifold<T>, r: T, dir: &[f64]) -> Vec<T> {
    match space {
        ModelManifold::HalfPlane => {
            // Poincaré disk radius tanh(r/2), then w ↦ i(1+w)/(1−w)
            let rho = (r * T::lit(0.5)).tanh();
            let (u, v) = (rho * T::lit(dir[0]), rho * T::lit(dir[1]));
            let den = (T::one() - u).powi(2) + v * v;
            let x = -(T::lit(2.0) * v) / den;
            let y = (T::one() - u * u - v * v) / den;
            vec![x, y]
        }
        _ => dir.iter().map(|&c| r * T::lit(c)).collect(),
    }
}

/// Seeded volume-uniform sample of `B_radius(o)`, basepoint first.
pub fn candidate_pool<T: Real>(space: &ModelManifold<T>, radius: T, seed: u64, size: usize) -> Result<Vec<Vec<T>>> {
    check_space(space)?;
    if !(radius > T::zero() && radius.is_finite()) {
        return Err(GromovError::InvalidArgument(format!("radius = {radius} must be positive")));
    }
    let total = space.ball_volume(radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = Vec::with_capacity(size + 1);
    pool.push(space.basepoint());
    for _ in 0..size {
        let u: f64 = rng.gen();
        let dir = unit_direction(&mut rng, space.dim());
        let r = invert_volume(space, u, radius, total)?;
        pool.push(chart_point(space, r, &dir));
    }
    Ok(pool)
}

/// Exact distance matrix of `points` (first point is the basepoint).
pub fn from_points<T: Real>(space: &ModelManifold<T>, points: &[Vec<T>]) -> Result<FinitePointedSpace<T>> {
    check_space(space)?;
    let n = points.len();
    let mut d = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = space.distance(&points[i], &points[j])?.value;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    FinitePointedSpace::new(d)
}

/// Greedy farthest-point net of a candidate sample: basepoint first, every
/// candidate within `mesh`, distinct net points more than `mesh` apart.
pub fn net_from_pool<T: Real>(space: &ModelManifold<T>, pool: &[Vec<T>], mesh: T) -> Result<Net<T>> {
    check_space(space)?;
    if !(mesh > T::zero() && mesh.is_finite()) {
        return Err(GromovError::InvalidArgument(format!("mesh = {mesh} must be positive")));
    }
    if pool.is_empty() {
        return Err(GromovError::InvalidArgument("empty candidate pool".into()));
    }
    let mut chosen = vec![0usize];
    let mut gap: Vec<T> = pool.iter().map(|p| space.distance(&pool[0], p).map(|d| d.value)).collect::<rdl_core::Result<_>>()?;
    loop {
        let (far, &g) = gap
            .iter()
            .enumerate()
            .fold((0, &T::neg_infinity()), |best, cur| if *cur.1 > *best.1 { cur } else { best });
        if g <= mesh {
            let points: Vec<Vec<T>> = chosen.iter().map(|&i| pool[i].clone()).collect();
            let fps = from_points(space, &points)?;
            return Ok(Net { space: fps, points, pool_indices: chosen, covering_radius: g });
        }
        chosen.push(far);
        for (i, p) in pool.iter().enumerate() {
            let d = space.distance(&pool[far], p)?.value;
            if d < gap[i] {
                gap[i] = d;
            }
        }
    }
}

/// Net with chart coordinates, from a pool of `pool` candidates.
pub fn net_points<T: Real>(space: &ModelManifold<T>, radius: T, mesh: T, seed: u64, pool: usize) -> Result<Net<T>> {
    let cands = candidate_pool(space, radius, seed, pool)?;
    net_from_pool(space, &cands, mesh)
}

/// Farthest-point net of `B_radius(o)` with `DEFAULT_POOL` candidates.
pub fn net_from_manifold<T: Real>(
    space: &ModelManifold<T>,
    radius: T,
    mesh: T,
    seed: u64,
) -> Result<FinitePointedSpace<T>> {
    Ok(net_points(space, radius, mesh, seed, DEFAULT_POOL)?.space)
}

/// Cross distances `c = d_M + s` between two point sets of one manifold;
/// admissible for any `s > 0`.
pub fn ambient_cross<T: Real>(
    space: &ModelManifold<T>,
    a: &[Vec<T>],
    b: &[Vec<T>],
    s: T,
) -> Result<AdmissibleExtension<T>> {
    if !(s > T::zero()) {
        return Err(GromovError::InvalidArgument(format!("shift s = {s} must be positive")));
    }
    let cross = a
        .iter()
        .map(|p| b.iter().map(|q| space.distance(p, q).map(|d| d.value + s)).collect::<rdl_core::Result<Vec<T>>>())
        .collect::<rdl_core::Result<_>>()?;
    Ok(AdmissibleExtension { cross })
}
