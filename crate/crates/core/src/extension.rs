//! Monotone extension of a seed `φ: Z → Z` to `Φ: Z² → Z`.
//!
//! For `m1 >= -m2`, `Φ(m1, m2) = max{φ(m) : -m2 <= m <= m1}`; for
//! `m1 <= -m2`, `Φ(m1, m2) = min{φ(m) : m1 <= m <= -m2}`. Both ranges grow
//! (respectively shrink) as either argument increases, so `Φ` is
//! non-decreasing in each variable, and on the antidiagonal both formulas
//! collapse to `Φ(m, -m) = φ(m)`.

use serde::Serialize;

/// Value of the seed outside its stored window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutOfWindow {
    /// Repeat the value at the nearest window endpoint.
    NearestEndpoint,
    Constant(i64),
}

/// A total map `m ↦ φ(m)` stored on `[lo, lo + values.len())`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedFunction {
    lo: i64,
    values: Vec<i64>,
    below: OutOfWindow,
    above: OutOfWindow,
}

impl SeedFunction {
    /// Seed on `[lo, lo + values.len() - 1]`, extended by nearest endpoints.
    ///
    /// # Panics
    /// If `values` is empty.
    pub fn new(lo: i64, values: Vec<i64>) -> Self {
        assert!(!values.is_empty(), "seed window must be nonempty");
        SeedFunction {
            lo,
            values,
            below: OutOfWindow::NearestEndpoint,
            above: OutOfWindow::NearestEndpoint,
        }
    }

    pub fn from_fn(lo: i64, hi: i64, f: impl Fn(i64) -> i64) -> Self {
        Self::new(lo, (lo..=hi).map(f).collect())
    }

    pub fn constant(v: i64) -> Self {
        Self::new(0, vec![v])
    }

    pub fn with_below(mut self, below: OutOfWindow) -> Self {
        self.below = below;
        self
    }

    pub fn with_above(mut self, above: OutOfWindow) -> Self {
        self.above = above;
        self
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.lo + self.values.len() as i64 - 1)
    }

    pub fn eval(&self, m: i64) -> i64 {
        let (lo, hi) = self.window();
        if m < lo {
            match self.below {
                OutOfWindow::NearestEndpoint => self.values[0],
                OutOfWindow::Constant(v) => v,
            }
        } else if m > hi {
            match self.above {
                OutOfWindow::NearestEndpoint => *self.values.last().expect("nonempty"),
                OutOfWindow::Constant(v) => v,
            }
        } else {
            self.values[(m - lo) as usize]
        }
    }
}

/// Sparse table answering range max/min over the seed window in O(1).
#[derive(Clone, Debug)]
struct RangeTable {
    max: Vec<Vec<i64>>,
    min: Vec<Vec<i64>>,
}

impl RangeTable {
    fn build(values: &[i64]) -> Self {
        let n = values.len();
        let mut max = vec![values.to_vec()];
        let mut min = vec![values.to_vec()];
        let mut span = 1;
        while 2 * span <= n {
            let (pm, pn) = (max.last().expect("level"), min.last().expect("level"));
            let len = n - 2 * span + 1;
            max.push((0..len).map(|i| pm[i].max(pm[i + span])).collect());
            min.push((0..len).map(|i| pn[i].min(pn[i + span])).collect());
            span *= 2;
        }
        RangeTable { max, min }
    }

    // Inclusive index range, i <= j.
    fn query(&self, i: usize, j: usize) -> (i64, i64) {
        let level = (usize::BITS - 1 - (j - i + 1).leading_zeros()) as usize;
        let span = 1usize << level;
        (
            self.max[level][i].max(self.max[level][j + 1 - span]),
            self.min[level][i].min(self.min[level][j + 1 - span]),
        )
    }
}

/// `Φ` built from a seed; immutable after construction.
#[derive(Clone, Debug)]
pub struct MonotoneExtension {
    seed: SeedFunction,
    table: RangeTable,
}

/// Outcome of a monotonicity scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneReport {
    pub ok: bool,
    pub checked: u64,
    pub first_violation: Option<Violation>,
}

/// `Φ` decreased when argument `axis` (1 or 2) was incremented at `(m1, m2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub m1: i64,
    pub m2: i64,
    pub axis: u8,
    pub before: i64,
    pub after: i64,
}

impl MonotoneExtension {
    pub fn new(seed: SeedFunction) -> Self {
        let table = RangeTable::build(&seed.values);
        MonotoneExtension { seed, table }
    }

    pub fn seed(&self) -> &SeedFunction {
        &self.seed
    }

    /// `(max, min)` of `φ` over `[a, b]`, `a <= b`.
    fn range_extrema(&self, a: i64, b: i64) -> (i64, i64) {
        let (lo, hi) = self.seed.window();
        let mut mx = i64::MIN;
        let mut mn = i64::MAX;
        if a < lo {
            let v = self.seed.eval(a);
            mx = mx.max(v);
            mn = mn.min(v);
        }
        if b > hi {
            let v = self.seed.eval(b);
            mx = mx.max(v);
            mn = mn.min(v);
        }
        let (ia, ib) = (a.max(lo), b.min(hi));
        if ia <= ib {
            let (x, n) = self.table.query((ia - lo) as usize, (ib - lo) as usize);
            mx = mx.max(x);
            mn = mn.min(n);
        }
        (mx, mn)
    }

    pub fn eval(&self, m1: i64, m2: i64) -> i64 {
        let neg = -m2;
        if m1 >= neg {
            self.range_extrema(neg, m1).0
        } else {
            self.range_extrema(m1, neg).1
        }
    }

    /// Both branch formulas at a point; they coincide on the antidiagonal.
    pub fn eval_branches(&self, m1: i64, m2: i64) -> (i64, i64) {
        let (a, b) = (m1.min(-m2), m1.max(-m2));
        let (mx, mn) = self.range_extrema(a, b);
        (mx, mn)
    }

    /// Checks unit increments in each argument over `[-n, n]²`.
    pub fn verify_monotone(&self, n: i64) -> MonotoneReport {
        check_monotone(n, |a, b| self.eval(a, b))
    }
}

/// Scans `f(m1+1, m2) >= f(m1, m2)` and `f(m1, m2+1) >= f(m1, m2)` over
/// `[-n, n]²` in row-major order, stopping at the first violation.
pub fn check_monotone(n: i64, f: impl Fn(i64, i64) -> i64) -> MonotoneReport {
    let mut checked = 0u64;
    for m1 in -n..=n {
        for m2 in -n..=n {
            let here = f(m1, m2);
            if m1 < n {
                checked += 1;
                let right = f(m1 + 1, m2);
                if right < here {
                    return violation(checked, m1, m2, 1, here, right);
                }
            }
            if m2 < n {
                checked += 1;
                let up = f(m1, m2 + 1);
                if up < here {
                    return violation(checked, m1, m2, 2, here, up);
                }
            }
        }
    }
    MonotoneReport {
        ok: true,
        checked,
        first_violation: None,
    }
}

fn violation(checked: u64, m1: i64, m2: i64, axis: u8, before: i64, after: i64) -> MonotoneReport {
    MonotoneReport {
        ok: false,
        checked,
        first_violation: Some(Violation {
            m1,
            m2,
            axis,
            before,
            after,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_seed() {
        let ext = MonotoneExtension::new(SeedFunction::constant(7));
        for (a, b) in [(0, 0), (-5, 3), (9, -40), (100, 100)] {
            assert_eq!(ext.eval(a, b), 7);
        }
        assert!(ext.verify_monotone(4).ok);
    }

    #[test]
    fn three_point_seed() {
        let ext = MonotoneExtension::new(SeedFunction::new(-1, vec![5, 0, 3]));
        assert_eq!(ext.eval(1, 1), 5);
        assert_eq!(ext.eval(-1, 0), 0);
        assert_eq!(ext.eval(1, -1), 3);
    }

    #[test]
    fn identity_and_negation_closed_forms() {
        let id = MonotoneExtension::new(SeedFunction::from_fn(-40, 40, |m| m));
        let neg = MonotoneExtension::new(SeedFunction::from_fn(-40, 40, |m| -m));
        for m1 in -16..=16 {
            for m2 in -16..=16 {
                assert_eq!(id.eval(m1, m2), m1);
                assert_eq!(neg.eval(m1, m2), m2);
            }
        }
        assert!(id.verify_monotone(16).ok);
        assert!(neg.verify_monotone(16).ok);
    }

    #[test]
    fn out_of_window_policies() {
        let s = SeedFunction::new(0, vec![4, 9]).with_below(OutOfWindow::Constant(0));
        assert_eq!(s.eval(-3), 0);
        assert_eq!(s.eval(7), 9);
        let ext = MonotoneExtension::new(s);
        assert_eq!(ext.eval(-2, 2), 0);
        assert_eq!(ext.eval(5, 3), 9);
        assert!(ext.verify_monotone(6).ok);
    }

    #[test]
    fn reports_first_violation() {
        let r = check_monotone(3, |a, b| if a == 1 && b == 0 { 5 } else { a + b });
        assert!(!r.ok);
        assert_eq!(
            r.first_violation,
            Some(Violation {
                m1: 1,
                m2: 0,
                axis: 1,
                before: 5,
                after: 2
            })
        );
        let r = check_monotone(2, |a, b| a + b);
        assert!(r.ok);
        assert_eq!(r.checked, 2 * 5 * 4);
    }

    proptest! {
        #[test]
        fn antidiagonal_and_monotone(values in proptest::collection::vec(-50i64..50, 1..40), lo in -20i64..20) {
            let seed = SeedFunction::new(lo, values);
            let ext = MonotoneExtension::new(seed.clone());
            for m in -30..30 {
                prop_assert_eq!(ext.eval(m, -m), seed.eval(m));
                let (mx, mn) = ext.eval_branches(m, -m);
                prop_assert_eq!(mx, mn);
            }
            let r = ext.verify_monotone(25);
            prop_assert!(r.ok, "{:?}", r.first_violation);
        }
    }
}
