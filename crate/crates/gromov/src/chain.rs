//! Gluing a `d_GS`-Cauchy chain `X₁, X₂, …, X_N` along its crosses.
//!
//! The glued metric on `⊔Xₙ` is the shortest-chain metric: the graph has
//! the in-level distances plus the cross edges between consecutive levels.
//! Level `i` (0-based) is `X_{i+1}`, certified at `2^{-(i+1)}`.

use crate::error::{GromovError, Result};
use crate::space::{AdmissibleExtension, FinitePointedSpace};
use rdl_core::Real;

#[derive(Debug, Clone)]
pub struct GluedChain<T> {
    pub levels: Vec<FinitePointedSpace<T>>,
    offsets: Vec<usize>,
    metric: Vec<Vec<T>>,
    /// `sup_{m>n} d(xₙ, x_m)` along the nearest-point tail from each point.
    pub tail_radius: Vec<Vec<T>>,
}

/// Certified scale of level `i`: `2^{-(i+1)}`.
pub fn level_scale<T: Real>(i: usize) -> T {
    T::lit(0.5f64.powi(i as i32 + 1))
}

/// Glues `spaces` along `crosses[i]` between levels `i` and `i+1`.
pub fn chain_glue<T: Real>(
    spaces: Vec<FinitePointedSpace<T>>,
    crosses: &[AdmissibleExtension<T>],
) -> Result<GluedChain<T>> {
    if spaces.is_empty() {
        return Err(GromovError::InvalidArgument("empty chain".into()));
    }
    if crosses.len() + 1 != spaces.len() {
        return Err(GromovError::InvalidArgument(format!(
            "{} levels need {} crosses, got {}",
            spaces.len(),
            spaces.len() - 1,
            crosses.len()
        )));
    }
    for (i, c) in crosses.iter().enumerate() {
        c.validate(&spaces[i], &spaces[i + 1]).map_err(|e| match e {
            GromovError::Inadmissible(m) => GromovError::Inadmissible(format!("cross {i}: {m}")),
            other => other,
        })?;
        c.covers(&spaces[i], &spaces[i + 1], level_scale(i), T::zero())
            .map_err(|e| GromovError::NotCauchy(format!("cross {i} does not certify d_GS ≤ 2^-{}: {e}", i + 1)))?;
    }

    let mut offsets = vec![0];
    for s in &spaces {
        offsets.push(offsets.last().unwrap() + s.len());
    }
    let total = *offsets.last().unwrap();
    let mut metric = vec![vec![T::infinity(); total]; total];
    for (l, s) in spaces.iter().enumerate() {
        let o = offsets[l];
        for x in 0..s.len() {
            for y in 0..s.len() {
                metric[o + x][o + y] = s.d(x, y);
            }
        }
    }
    for (l, c) in crosses.iter().enumerate() {
        let (o1, o2) = (offsets[l], offsets[l + 1]);
        for (x, row) in c.cross.iter().enumerate() {
            for (y, &v) in row.iter().enumerate() {
                metric[o1 + x][o2 + y] = v;
                metric[o2 + y][o1 + x] = v;
            }
        }
    }
    for k in 0..total {
        let via = metric[k].clone();
        for row in metric.iter_mut() {
            let dik = row[k];
            if dik == T::infinity() {
                continue;
            }
            for (dij, &dkj) in row.iter_mut().zip(&via) {
                let alt = dik + dkj;
                if alt < *dij {
                    *dij = alt;
                }
            }
        }
    }

    let mut glued = GluedChain { levels: spaces, offsets, metric, tail_radius: Vec::new() };
    glued.tail_radius = (0..glued.levels.len())
        .map(|l| (0..glued.levels[l].len()).map(|x| glued.tail_from(l, x)).collect())
        .collect();
    Ok(glued)
}

impl<T: Real> GluedChain<T> {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Glued distance between `x ∈ X_{l1}` and `y ∈ X_{l2}`.
    pub fn d(&self, l1: usize, x: usize, l2: usize, y: usize) -> T {
        self.metric[self.offsets[l1] + x][self.offsets[l2] + y]
    }

    /// Glued metric restricted to `X_{l1} × X_{l2}` (`l1 ≠ l2`), which is
    /// admissible by construction.
    pub fn cross(&self, l1: usize, l2: usize) -> Result<AdmissibleExtension<T>> {
        if l1 == l2 || l1.max(l2) >= self.n_levels() {
            return Err(GromovError::InvalidArgument(format!("levels ({l1}, {l2})")));
        }
        let cross = (0..self.levels[l1].len())
            .map(|x| (0..self.levels[l2].len()).map(|y| self.d(l1, x, l2, y)).collect())
            .collect();
        Ok(AdmissibleExtension { cross })
    }

    fn nearest_in(&self, l: usize, x: usize, next: usize) -> usize {
        (0..self.levels[next].len())
            .min_by(|&a, &b| self.d(l, x, next, a).partial_cmp(&self.d(l, x, next, b)).expect("finite"))
            .expect("levels are nonempty")
    }

    fn tail_from(&self, l: usize, x: usize) -> T {
        let (mut cur_l, mut cur) = (l, x);
        let mut sup = T::zero();
        while cur_l + 1 < self.n_levels() {
            cur = self.nearest_in(cur_l, cur, cur_l + 1);
            cur_l += 1;
            sup = sup.max(self.d(l, x, cur_l, cur));
        }
        sup
    }

    /// Does `x ∈ X_{l}` lie on a tail within `2^{-n+2}` (`n = l+1`)?
    pub fn is_tail_point(&self, l: usize, x: usize) -> bool {
        self.tail_radius[l][x] <= T::lit(4.0) * level_scale::<T>(l)
    }

    /// Resolution of the last level, `2^{-N}`.
    pub fn resolution(&self) -> T {
        level_scale(self.n_levels() - 1)
    }

    /// Closed ball of the last level about its basepoint; the finite
    /// approximant of the limit ball at resolution `2^{-N}`.
    pub fn limit_ball(&self, radius: T) -> Result<FinitePointedSpace<T>> {
        let last = self.levels.last().expect("nonempty chain");
        last.restrict(&last.ball(radius))
    }
}
