//! Linear-programming route to feasibility: enumerate partner assignments
//! over the `K` nearest candidates and solve one admissibility LP each.

use crate::error::{GromovError, Result};
use crate::feasibility::{ball_slots, check_eps, STRICT_DELTA};
use crate::space::{AdmissibleExtension, FinitePointedSpace};
use rdl_core::Real;

/// Default number of candidate partners per covered point.
pub const DEFAULT_K: usize = 4;

/// Refuses enumerations larger than this.
pub const MAX_ASSIGNMENTS: u64 = 1 << 22;

/// Some `x ≥ 0` with `A x ≤ b`, by phase-1 simplex with Bland's rule.
pub fn feasible_point<T: Real>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let eps = T::lit(1e-10);
    let negative: Vec<usize> = (0..m).filter(|&i| b[i] < T::zero()).collect();
    let n_art = negative.len();
    let width = n + m + n_art + 1;
    let rhs = width - 1;

    let mut tab = vec![vec![T::zero(); width]; m];
    let mut basis = vec![0usize; m];
    let mut art = 0;
    for i in 0..m {
        let sign = if b[i] < T::zero() { -T::one() } else { T::one() };
        for j in 0..n {
            tab[i][j] = sign * a[i][j];
        }
        tab[i][n + i] = sign;
        tab[i][rhs] = sign * b[i];
        if b[i] < T::zero() {
            tab[i][n + m + art] = T::one();
            basis[i] = n + m + art;
            art += 1;
        } else {
            basis[i] = n + i;
        }
    }
    // reduced costs of Σ artificials
    let mut cost = vec![T::zero(); width];
    for &i in &negative {
        for j in 0..width {
            if j < n + m || j == rhs {
                cost[j] = cost[j] - tab[i][j];
            }
        }
    }

    loop {
        let Some(enter) = (0..n + m + n_art).find(|&j| cost[j] < -eps) else { break };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if tab[i][enter] > eps {
                let ratio = tab[i][rhs] / tab[i][enter];
                leave = match leave {
                    None => Some(i),
                    Some(l) => {
                        let best = tab[l][rhs] / tab[l][enter];
                        if ratio < best || (ratio == best && basis[i] < basis[l]) {
                            Some(i)
                        } else {
                            Some(l)
                        }
                    }
                };
            }
        }
        // phase 1 is bounded below by 0
        let l = leave?;
        let p = tab[l][enter];
        for v in tab[l].iter_mut() {
            *v = *v / p;
        }
        let row = tab[l].clone();
        for (i, r) in tab.iter_mut().enumerate() {
            if i != l && r[enter] != T::zero() {
                let f = r[enter];
                for j in 0..width {
                    r[j] = r[j] - f * row[j];
                }
            }
        }
        let f = cost[enter];
        for j in 0..width {
            cost[j] = cost[j] - f * row[j];
        }
        basis[l] = enter;
    }

    let infeasibility = (0..m).filter(|&i| basis[i] >= n + m).fold(T::zero(), |s, i| s + tab[i][rhs]);
    let scale = b.iter().fold(T::one(), |s, v| s.max(v.abs()));
    if infeasibility > T::lit(1e-9) * scale {
        return None;
    }
    let mut x = vec![T::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = tab[i][rhs].max(T::zero());
        }
    }
    Some(x)
}

/// Admissibility constraints on `c` (row-major `x·n₂ + y`) plus `c ≤ e` on
/// the forced pairs, as `A c ≤ b`.
pub fn admissibility_system<T: Real>(
    a: &FinitePointedSpace<T>,
    b: &FinitePointedSpace<T>,
    forced: &[(usize, usize)],
    e: T,
) -> (Vec<Vec<T>>, Vec<T>) {
    let (n1, n2) = (a.len(), b.len());
    let var = |x: usize, y: usize| x * n2 + y;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut push = |terms: &[(usize, T)], bound: T| {
        let mut r = vec![T::zero(); n1 * n2];
        for &(j, v) in terms {
            r[j] = r[j] + v;
        }
        rows.push(r);
        rhs.push(bound);
    };
    let one = T::one();
    for y in 0..n2 {
        for x in 0..n1 {
            for x2 in x + 1..n1 {
                let d = a.d(x, x2);
                push(&[(var(x, y), one), (var(x2, y), -one)], d);
                push(&[(var(x2, y), one), (var(x, y), -one)], d);
                push(&[(var(x, y), -one), (var(x2, y), -one)], -d);
            }
        }
    }
    for x in 0..n1 {
        for y in 0..n2 {
            for y2 in y + 1..n2 {
                let d = b.d(y, y2);
                push(&[(var(x, y), one), (var(x, y2), -one)], d);
                push(&[(var(x, y2), one), (var(x, y), -one)], d);
                push(&[(var(x, y), -one), (var(x, y2), -one)], -d);
            }
        }
    }
    for &(x, y) in forced {
        push(&[(var(x, y), one)], e);
    }
    (rows, rhs)
}

/// Feasibility by assignment enumeration and one LP per assignment.
/// Partners are restricted to the `k` candidates with the closest
/// basepoint radius, so `k < n` can miss a solution; `k ≥ max(n₁, n₂)` is
/// exact.
pub fn feasible_lp<T: Real>(
    a: &FinitePointedSpace<T>,
    b: &FinitePointedSpace<T>,
    eps: T,
    k: usize,
) -> Result<Option<AdmissibleExtension<T>>> {
    check_eps(eps)?;
    if k == 0 {
        return Err(GromovError::InvalidArgument("k must be positive".into()));
    }
    let e = eps - T::lit(STRICT_DELTA);
    let slots = ball_slots(a, b, eps);
    let cands: Vec<Vec<usize>> = slots
        .iter()
        .map(|&(side, i)| {
            let (own, other) = if side == 0 { (a.d(0, i), b) } else { (b.d(0, i), a) };
            let mut c: Vec<usize> = (0..other.len()).collect();
            c.sort_by(|&u, &v| {
                let du = (other.d(0, u) - own).abs();
                let dv = (other.d(0, v) - own).abs();
                du.partial_cmp(&dv).expect("finite distances").then(u.cmp(&v))
            });
            c.truncate(k);
            c
        })
        .collect();
    let total = cands.iter().try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64)).unwrap_or(u64::MAX);
    if total > MAX_ASSIGNMENTS {
        return Err(GromovError::InvalidArgument(format!("{total} assignments exceed the enumeration limit")));
    }

    let n2 = b.len();
    let mut choice = vec![0usize; slots.len()];
    loop {
        let mut forced = vec![(0, 0)];
        for (s, &(side, i)) in slots.iter().enumerate() {
            let c = cands[s][choice[s]];
            forced.push(if side == 0 { (i, c) } else { (c, i) });
        }
        let (rows, rhs) = admissibility_system(a, b, &forced, e);
        if let Some(c) = feasible_point(&rows, &rhs) {
            let cross = c.chunks(n2).map(<[T]>::to_vec).collect();
            return Ok(Some(AdmissibleExtension { cross }));
        }
        // odometer
        let mut s = 0;
        loop {
            if s == slots.len() {
                return Ok(None);
            }
            choice[s] += 1;
            if choice[s] < cands[s].len() {
                break;
            }
            choice[s] = 0;
            s += 1;
        }
    }
}
