//! Decides `d_GS(a, b) < ε` exactly.
//!
//! An admissible `c` with `c(o₁,o₂) ≤ e` and every ball point matched within
//! `e` exists iff some relation `R ∋ (o₁,o₂)` covering both `1/ε`-balls has
//! `|d₁(x,x') − d₂(y,y')| ≤ 2e` on all of `R × R`. Given such `R` the witness
//! `c(x,y) = min_{(a,b)∈R} d₁(x,a) + e + d₂(b,y)` is admissible; conversely
//! the pairs with `c ≤ e` form such a relation. The search below is a
//! backtracking over relations with forward checking.

use crate::error::{GromovError, Result};
use crate::space::{AdmissibleExtension, FinitePointedSpace};
use rdl_core::Real;
use serde::{Deserialize, Serialize};

/// Strictness margin for the open inequalities `c < eps`.
pub const STRICT_DELTA: f64 = 1e-9;

/// Slack in the distortion comparison so that exact ties on decimal inputs
/// are not decided by the last ulp.
const CMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility<T> {
    pub feasible: bool,
    /// Matched pairs `(x, y)`, basepoints first.
    pub relation: Vec<(usize, usize)>,
    pub witness: Option<AdmissibleExtension<T>>,
    /// Search nodes expanded.
    pub nodes: u64,
}

pub(crate) fn check_eps<T: Real>(eps: T) -> Result<()> {
    if !(eps > T::zero() && eps < T::lit(0.5)) {
        return Err(GromovError::InvalidArgument(format!("eps = {eps} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// Points that need a partner: `(side, index)` with side 0 for `a`.
pub(crate) fn ball_slots<T: Real>(a: &FinitePointedSpace<T>, b: &FinitePointedSpace<T>, eps: T) -> Vec<(u8, usize)> {
    let r = eps.recip();
    let mut slots: Vec<(u8, usize)> = a.ball(r).into_iter().filter(|&x| x != 0).map(|x| (0, x)).collect();
    slots.extend(b.ball(r).into_iter().filter(|&y| y != 0).map(|y| (1, y)));
    slots
}

struct Search<'a, T> {
    a: &'a FinitePointedSpace<T>,
    b: &'a FinitePointedSpace<T>,
    bound: T,
    relation: Vec<(usize, usize)>,
    nodes: u64,
}

impl<T: Real> Search<'_, T> {
    #[inline]
    fn compatible(&self, (x, y): (usize, usize), (u, v): (usize, usize)) -> bool {
        (self.a.d(x, u) - self.b.d(y, v)).abs() <= self.bound
    }

    fn pair(slot: (u8, usize), cand: usize) -> (usize, usize) {
        match slot {
            (0, x) => (x, cand),
            (_, y) => (cand, y),
        }
    }

    /// `domains[i]` is `None` once slot `i` is covered.
    fn run(&mut self, slots: &[(u8, usize)], domains: Vec<Option<Vec<usize>>>) -> bool {
        self.nodes += 1;
        let Some(pick) = (0..slots.len())
            .filter(|&i| domains[i].is_some())
            .min_by_key(|&i| domains[i].as_ref().map_or(usize::MAX, Vec::len))
        else {
            return true;
        };
        let cands = domains[pick].clone().expect("picked slot is open");
        'cand: for c in cands {
            let p = Self::pair(slots[pick], c);
            let mut next = domains.clone();
            for (i, dom) in next.iter_mut().enumerate() {
                let Some(d) = dom else { continue };
                let covered = match slots[i] {
                    (0, x) => x == p.0,
                    (_, y) => y == p.1,
                };
                if covered {
                    *dom = None;
                    continue;
                }
                d.retain(|&cand| self.compatible(Self::pair(slots[i], cand), p));
                if d.is_empty() {
                    continue 'cand;
                }
            }
            self.relation.push(p);
            if self.run(slots, next) {
                return true;
            }
            self.relation.pop();
        }
        false
    }
}

/// Witness `c(x,y) = min_{(a,b)∈R} d₁(x,a) + e + d₂(b,y)`.
pub fn relation_witness<T: Real>(
    a: &FinitePointedSpace<T>,
    b: &FinitePointedSpace<T>,
    relation: &[(usize, usize)],
    e: T,
) -> AdmissibleExtension<T> {
    let cross = (0..a.len())
        .map(|x| {
            (0..b.len())
                .map(|y| relation.iter().map(|&(u, v)| a.d(x, u) + e + b.d(v, y)).fold(T::infinity(), T::min))
                .collect()
        })
        .collect();
    AdmissibleExtension { cross }
}

/// Largest `|d₁(x,x') − d₂(y,y')|` over pairs of the relation.
pub fn relation_distortion<T: Real>(
    a: &FinitePointedSpace<T>,
    b: &FinitePointedSpace<T>,
    relation: &[(usize, usize)],
) -> T {
    let mut dis = T::zero();
    for &(x, y) in relation {
        for &(u, v) in relation {
            dis = dis.max((a.d(x, u) - b.d(y, v)).abs());
        }
    }
    dis
}

/// Is there an admissible metric on `a ⊔ b` certifying `d_GS(a,b) < eps`?
pub fn feasible<T: Real>(a: &FinitePointedSpace<T>, b: &FinitePointedSpace<T>, eps: T) -> Result<Feasibility<T>> {
    check_eps(eps)?;
    let e = eps - T::lit(STRICT_DELTA);
    let two = T::lit(2.0);
    let bound = two * e + T::lit(CMP_TOL) * T::one().max(two * e);
    let slots = ball_slots(a, b, eps);
    let mut search = Search { a, b, bound, relation: vec![(0, 0)], nodes: 0 };

    let base = (0usize, 0usize);
    let mut domains = Vec::with_capacity(slots.len());
    for &slot in &slots {
        let other = if slot.0 == 0 { b.len() } else { a.len() };
        let mut dom: Vec<usize> =
            (0..other).filter(|&c| search.compatible(Search::<T>::pair(slot, c), base)).collect();
        // closest basepoint radii first
        dom.sort_by(|&c1, &c2| {
            let key = |c| {
                let (x, y) = Search::<T>::pair(slot, c);
                (a.d(0, x) - b.d(0, y)).abs()
            };
            key(c1).partial_cmp(&key(c2)).expect("finite distances").then(c1.cmp(&c2))
        });
        domains.push(Some(dom));
    }
    let ok = domains.iter().all(|d| d.as_ref().is_some_and(|d| !d.is_empty())) && search.run(&slots, domains);
    let relation = if ok { search.relation } else { Vec::new() };
    let witness = ok.then(|| relation_witness(a, b, &relation, e));
    Ok(Feasibility { feasible: ok, relation, witness, nodes: search.nodes })
}

/// Final bisection bracket; `d_GS ∈ (lo, hi]` up to the strictness margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GromovBracket {
    pub lo: f64,
    pub hi: f64,
}

impl GromovBracket {
    pub fn distance(&self) -> f64 {
        self.hi
    }
}

/// Smallest accepted tolerance.
pub const MIN_TOL: f64 = 1e-6;

/// `d_GS(a, b)` truncated at ½, by bisection on `feasible`. Tolerances below
/// `MIN_TOL` are raised to it.
pub fn gromov_distance<T: Real>(a: &FinitePointedSpace<T>, b: &FinitePointedSpace<T>, tol: f64) -> GromovBracket {
    gromov_bracket(a, b, tol).0
}

/// Bisection bracket together with the witness at the upper endpoint, if any
/// `eps < ½` was feasible.
pub fn gromov_bracket<T: Real>(
    a: &FinitePointedSpace<T>,
    b: &FinitePointedSpace<T>,
    tol: f64,
) -> (GromovBracket, Option<AdmissibleExtension<T>>) {
    let tol = if tol.is_finite() { tol.max(MIN_TOL) } else { MIN_TOL };
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    let mut witness = None;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f = feasible(a, b, T::lit(mid)).expect("bisection stays inside (0, 1/2)");
        if f.feasible {
            hi = mid;
            witness = f.witness;
        } else {
            lo = mid;
        }
    }
    (GromovBracket { lo, hi }, witness)
}
