use crate::error::{GromovError, Result};
use rdl_core::Real;
use serde::{Deserialize, Serialize};

/// Absolute tolerance of the metric validation.
pub const METRIC_TOL: f64 = 1e-12;

/// Finite metric space `{0, …, n−1}` pointed at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePointedSpace<T> {
    dist: Vec<Vec<T>>,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    n: usize,
    basepoint: usize,
    dist: Vec<Vec<f64>>,
}

impl<T: Real> FinitePointedSpace<T> {
    /// Validates symmetry, the zero diagonal, positivity off the diagonal
    /// and the triangle inequality; reports the first violated triangle.
    pub fn new(dist: Vec<Vec<T>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(GromovError::InvalidMetric("empty space".into()));
        }
        let tol = T::lit(METRIC_TOL);
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(GromovError::InvalidMetric(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < T::zero() {
                    return Err(GromovError::InvalidMetric(format!("d({i},{j}) = {d}")));
                }
                if i == j && d != T::zero() {
                    return Err(GromovError::InvalidMetric(format!("d({i},{i}) = {d} is not 0")));
                }
                if i != j && d == T::zero() {
                    return Err(GromovError::InvalidMetric(format!("d({i},{j}) = 0 for distinct points")));
                }
                if (d - dist[j][i]).abs() > tol {
                    return Err(GromovError::InvalidMetric(format!("d({i},{j}) = {d} but d({j},{i}) = {}", dist[j][i])));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let rhs = dist[i][j] + dist[j][k];
                    if dist[i][k] > rhs + tol {
                        return Err(GromovError::Triangle { i, j, k, lhs: dist[i][k].as_f64(), rhs: rhs.as_f64() });
                    }
                }
            }
        }
        Ok(Self { dist })
    }

    /// The one-point space.
    pub fn point() -> Self {
        Self { dist: vec![vec![T::zero()]] }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> T {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.dist
    }

    /// Indices within `radius` of the basepoint (closed ball).
    pub fn ball(&self, radius: T) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.dist[0][i] <= radius).collect()
    }

    /// Restriction to `indices`; the first index becomes the basepoint.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let dist = indices.iter().map(|&i| indices.iter().map(|&j| self.dist[i][j]).collect()).collect();
        Self::new(dist)
    }

    pub fn to_json(&self) -> String {
        let repr = SpaceRepr {
            n: self.len(),
            basepoint: 0,
            dist: self.dist.iter().map(|r| r.iter().map(|d| d.as_f64()).collect()).collect(),
        };
        serde_json::to_string(&repr).expect("space serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: SpaceRepr =
            serde_json::from_str(s).map_err(|e| GromovError::InvalidMetric(format!("malformed space: {e}")))?;
        if repr.basepoint != 0 {
            return Err(GromovError::InvalidMetric(format!("basepoint must be 0, got {}", repr.basepoint)));
        }
        if repr.n != repr.dist.len() {
            return Err(GromovError::InvalidMetric(format!("n = {} but matrix has {} rows", repr.n, repr.dist.len())));
        }
        Self::new(repr.dist.into_iter().map(|r| r.into_iter().map(T::lit).collect()).collect())
    }
}

/// Cross distances `c(x, y)` between two spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleExtension<T> {
    pub cross: Vec<Vec<T>>,
}

impl<T: Real> AdmissibleExtension<T> {
    /// `c(x,y) = d(x,y) + s` between two copies of the same space.
    pub fn identity_lift(x: &FinitePointedSpace<T>, s: T) -> Self {
        Self { cross: x.dist.iter().map(|r| r.iter().map(|&d| d + s).collect()).collect() }
    }

    /// Checks that `c` together with `d₁`, `d₂` is a metric on `X₁ ⊔ X₂`,
    /// up to `tol` relative to the largest distance involved.
    pub fn validate(&self, a: &FinitePointedSpace<T>, b: &FinitePointedSpace<T>) -> Result<()> {
        let c = &self.cross;
        let (n1, n2) = (a.len(), b.len());
        if c.len() != n1 || c.iter().any(|r| r.len() != n2) {
            return Err(GromovError::Inadmissible(format!("cross matrix must be {n1}×{n2}")));
        }
        let scale = c.iter().flatten().chain(a.dist.iter().flatten()).chain(b.dist.iter().flatten()).fold(T::one(), |m, &v| m.max(v));
        let tol = T::lit(METRIC_TOL) * scale;
        for x in 0..n1 {
            for y in 0..n2 {
                if !(c[x][y] > T::zero()) || !c[x][y].is_finite() {
                    return Err(GromovError::Inadmissible(format!("c({x},{y}) = {}", c[x][y])));
                }
                for x2 in 0..n1 {
                    if (c[x][y] - c[x2][y]).abs() > a.d(x, x2) + tol {
                        return Err(GromovError::Inadmissible(format!("|c({x},{y}) − c({x2},{y})| > d₁({x},{x2})")));
                    }
                    if c[x][y] + c[x2][y] + tol < a.d(x, x2) {
                        return Err(GromovError::Inadmissible(format!("c({x},{y}) + c({x2},{y}) < d₁({x},{x2})")));
                    }
                }
                for y2 in 0..n2 {
                    if (c[x][y] - c[x][y2]).abs() > b.d(y, y2) + tol {
                        return Err(GromovError::Inadmissible(format!("|c({x},{y}) − c({x},{y2})| > d₂({y},{y2})")));
                    }
                    if c[x][y] + c[x][y2] + tol < b.d(y, y2) {
                        return Err(GromovError::Inadmissible(format!("c({x},{y}) + c({x},{y2}) < d₂({y},{y2})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks the covering conditions of `d_GS < eps` with the strictness
    /// margin: `c(o₁,o₂) ≤ eps − δ` and every point of either `1/eps`-ball
    /// has a partner within `eps − δ`.
    pub fn covers(&self, a: &FinitePointedSpace<T>, b: &FinitePointedSpace<T>, eps: T, delta: T) -> Result<()> {
        let e = eps - delta;
        let tol = T::lit(METRIC_TOL);
        let c = &self.cross;
        if c[0][0] > e + tol {
            return Err(GromovError::Inadmissible(format!("c(o₁,o₂) = {} exceeds {e}", c[0][0])));
        }
        let r = eps.recip();
        for x in a.ball(r) {
            if !c[x].iter().any(|&v| v <= e + tol) {
                return Err(GromovError::Inadmissible(format!("point {x} of the first ball has no partner within {e}")));
            }
        }
        for y in b.ball(r) {
            if !c.iter().any(|row| row[y] <= e + tol) {
                return Err(GromovError::Inadmissible(format!("point {y} of the second ball has no partner within {e}")));
            }
        }
        Ok(())
    }

    /// Upper bound on `d_GS(a, b)` certified by this extension: the smallest
    /// `eps ≤ ½` (to `tol`) at which `covers` holds with no margin.
    pub fn certified_eps(&self, a: &FinitePointedSpace<T>, b: &FinitePointedSpace<T>, tol: T) -> T {
        let half = T::lit(0.5);
        if self.covers(a, b, half, T::zero()).is_err() {
            return half;
        }
        let (mut lo, mut hi) = (T::zero(), half);
        while hi - lo > tol {
            let mid = (lo + hi) * T::lit(0.5);
            if self.covers(a, b, mid, T::zero()).is_ok() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    pub fn to_json(&self) -> String {
        let m: Vec<Vec<f64>> = self.cross.iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect();
        serde_json::to_string(&m).expect("matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Vec<Vec<f64>> =
            serde_json::from_str(s).map_err(|e| GromovError::Inadmissible(format!("malformed cross matrix: {e}")))?;
        Ok(Self { cross: m.into_iter().map(|r| r.into_iter().map(T::lit).collect()).collect() })
    }
}
