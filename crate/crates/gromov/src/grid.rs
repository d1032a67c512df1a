//! Reference checker: exhaustive search over cross matrices on an integer
//! grid, independent of the relation argument used by `feasible`.
//!
//! With integer `d₁`, `d₂` and integer `e`, an admissible solution exists
//! iff one exists on the grid (the relation witness has integer entries),
//! so the search is exact. Exponential; meant for `n₁·n₂ ≤ 6`.

/// Is there an integer `c ≥ 1` with the admissibility constraints,
/// `c(0,0) ≤ e`, and every row and column holding an entry `≤ e`?
/// Every point counts as inside the balls.
pub fn grid_feasible(d1: &[Vec<i64>], d2: &[Vec<i64>], e: i64) -> bool {
    let dmax = d1.iter().chain(d2).flatten().copied().max().unwrap_or(0);
    let mut g = Grid { d1, d2, e, cmax: 2 * dmax + e, c: vec![vec![None; d2.len()]; d1.len()] };
    g.solve(0)
}

struct Grid<'a> {
    d1: &'a [Vec<i64>],
    d2: &'a [Vec<i64>],
    e: i64,
    cmax: i64,
    c: Vec<Vec<Option<i64>>>,
}

impl Grid<'_> {
    /// Interval left for `c(x,y)` by the entries already placed.
    fn bounds(&self, x: usize, y: usize) -> (i64, i64) {
        let (mut lo, mut hi) = (1, self.cmax);
        for (x2, row) in self.c.iter().enumerate() {
            if let Some(v) = row[y] {
                let d = self.d1[x][x2];
                lo = lo.max(v - d).max(d - v);
                hi = hi.min(v + d);
            }
        }
        for (y2, v) in self.c[x].iter().enumerate() {
            if let Some(v) = *v {
                let d = self.d2[y][y2];
                lo = lo.max(v - d).max(d - v);
                hi = hi.min(v + d);
            }
        }
        if x == 0 && y == 0 {
            hi = hi.min(self.e);
        }
        (lo, hi)
    }

    fn covered(&self) -> bool {
        let rows = self.c.iter().all(|r| r.iter().any(|v| v.is_some_and(|v| v <= self.e)));
        let cols = (0..self.d2.len()).all(|y| self.c.iter().any(|r| r[y].is_some_and(|v| v <= self.e)));
        rows && cols
    }

    fn solve(&mut self, k: usize) -> bool {
        let n2 = self.d2.len();
        if k == self.d1.len() * n2 {
            return self.covered();
        }
        let (x, y) = (k / n2, k % n2);
        let (lo, hi) = self.bounds(x, y);
        for v in lo..=hi {
            self.c[x][y] = Some(v);
            if self.solve(k + 1) {
                return true;
            }
        }
        self.c[x][y] = None;
        false
    }
}
