//! Exponents of dyadic side lengths.
//!
//! Side lengths are `2^e` where `e` is either an integer or a real root
//! `sign(q)·|q|^(1/r)`. [`RootExponent`] covers both (`r = 1` is an integer)
//! and orders them exactly through big-integer cross powering.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Integer log2 side lengths of a dyadic box.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVec(Vec<i64>);

impl ExponentVec {
    pub fn new(exps: Vec<i64>) -> Result<Self> {
        if exps.is_empty() {
            return Err(Error::InvalidParameter("exponent vector must be nonempty".into()));
        }
        Ok(ExponentVec(exps))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

/// The real number `sign(q)·|q|^(1/r)`, stored with the smallest admissible `r`.
///
/// Canonical storage means two values are equal iff their fields are equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootExponent {
    radicand: i64,
    root: u32,
}

impl RootExponent {
    pub fn new(radicand: i64, root: u32) -> Result<Self> {
        if root == 0 {
            return Err(Error::InvalidParameter("root must be at least 1".into()));
        }
        Ok(canonicalize(radicand, root))
    }

    pub const fn int(v: i64) -> Self {
        RootExponent { radicand: v, root: 1 }
    }

    pub fn radicand(&self) -> i64 {
        self.radicand
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn as_integer(&self) -> Option<i64> {
        (self.root == 1).then_some(self.radicand)
    }

    pub fn signum(&self) -> i64 {
        self.radicand.signum()
    }

    pub fn to_f64(&self) -> f64 {
        if self.root == 1 {
            return self.radicand as f64;
        }
        let mag = (self.radicand.unsigned_abs() as f64).powf(1.0 / self.root as f64);
        mag * self.radicand.signum() as f64
    }
}

impl std::ops::Neg for RootExponent {
    type Output = RootExponent;
    fn neg(self) -> RootExponent {
        RootExponent {
            radicand: -self.radicand,
            root: self.root,
        }
    }
}

impl From<i64> for RootExponent {
    fn from(v: i64) -> Self {
        RootExponent::int(v)
    }
}

impl fmt::Display for RootExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            1 => write!(f, "{}", self.radicand),
            2 if self.radicand < 0 => write!(f, "-sqrt({})", -self.radicand),
            2 => write!(f, "sqrt({})", self.radicand),
            r if self.radicand < 0 => write!(f, "-root{}({})", r, -self.radicand),
            r => write!(f, "root{}({})", r, self.radicand),
        }
    }
}

/// Parses the [`Display`](fmt::Display) forms: `7`, `sqrt(2)`, `-root3(5)`.
impl std::str::FromStr for RootExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse exponent {s:?}"));
        let t = s.trim();
        if let Ok(v) = t.parse::<i64>() {
            return Ok(RootExponent::int(v));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (root, inner) = if let Some(rest) = body.strip_prefix("sqrt(") {
            (2, rest)
        } else if let Some(rest) = body.strip_prefix("root") {
            let open = rest.find('(').ok_or_else(bad)?;
            (rest[..open].parse::<u32>().map_err(|_| bad())?, &rest[open + 1..])
        } else {
            return Err(bad());
        };
        let q: i64 = inner.strip_suffix(')').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if q < 0 {
            return Err(bad());
        }
        RootExponent::new(if neg { -q } else { q }, root)
    }
}

fn perfect_root(n: u64, t: u32) -> Option<u64> {
    let c = n.nth_root(t);
    (c.checked_pow(t) == Some(n)).then_some(c)
}

fn canonicalize(radicand: i64, root: u32) -> RootExponent {
    let mag = radicand.unsigned_abs();
    if mag <= 1 || root == 1 {
        return RootExponent { radicand, root: 1 };
    }
    // Largest divisor t of `root` with |q| a perfect t-th power.
    let mut t = root;
    while t > 1 {
        if root.is_multiple_of(t) {
            if let Some(c) = perfect_root(mag, t) {
                return RootExponent {
                    radicand: c as i64 * radicand.signum(),
                    root: root / t,
                };
            }
        }
        t -= 1;
    }
    RootExponent { radicand, root }
}

/// Exact order of the denoted real numbers.
pub fn compare_exponents(a: &RootExponent, b: &RootExponent) -> Ordering {
    let (sa, sb) = (a.radicand.signum(), b.radicand.signum());
    if sa != sb {
        return sa.cmp(&sb);
    }
    if sa == 0 {
        return Ordering::Equal;
    }
    if a.root == b.root {
        return a.radicand.cmp(&b.radicand);
    }
    let (fa, fb) = (a.to_f64(), b.to_f64());
    if (fa - fb).abs() > 1e-9 * (fa.abs() + fb.abs()) {
        return fa.partial_cmp(&fb).expect("finite");
    }
    // |a|^(1/ra) vs |b|^(1/rb)  <=>  |a|^rb vs |b|^ra
    let lhs: BigInt = Pow::pow(BigInt::from(a.radicand.unsigned_abs()), b.root);
    let rhs: BigInt = Pow::pow(BigInt::from(b.radicand.unsigned_abs()), a.root);
    let mag = lhs.cmp(&rhs);
    if sa > 0 {
        mag
    } else {
        mag.reverse()
    }
}

impl Ord for RootExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_exponents(self, other)
    }
}

impl PartialOrd for RootExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An exact finite sum of root exponents.
///
/// Radicals are grouped into classes of rationally proportional values
/// (`a^(1/r) / b^(1/s) ∈ Q`); distinct classes are linearly independent over
/// `Q`, so the sum is an integer exactly when every class coefficient cancels.
#[derive(Clone, Debug, Default)]
pub struct ExponentSum {
    integer: i64,
    classes: Vec<RadicalClass>,
}

#[derive(Clone, Debug)]
struct RadicalClass {
    // Representative |q|^(1/r) with q > 1, r > 1.
    radicand: u64,
    root: u32,
    coefficient: BigRational,
}

impl ExponentSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, e: &RootExponent) {
        self.add_scaled(e, 1);
    }

    /// Adds `sign · e` where `sign` is `1` or `-1`.
    pub fn add_scaled(&mut self, e: &RootExponent, sign: i64) {
        if let Some(v) = e.as_integer() {
            self.integer += sign * v;
            return;
        }
        let mag = e.radicand.unsigned_abs();
        let s = sign * e.radicand.signum();
        for class in &mut self.classes {
            if let Some(ratio) = radical_ratio(mag, e.root, class.radicand, class.root) {
                class.coefficient += ratio * BigRational::from_integer(BigInt::from(s));
                return;
            }
        }
        self.classes.push(RadicalClass {
            radicand: mag,
            root: e.root,
            coefficient: BigRational::from_integer(BigInt::from(s)),
        });
    }

    pub fn add_int(&mut self, v: i64) {
        self.integer += v;
    }

    /// The exact integer value, if the radicals cancel.
    pub fn as_integer(&self) -> Option<i64> {
        self.classes
            .iter()
            .all(|c| c.coefficient.is_zero())
            .then_some(self.integer)
    }

    /// Nonzero radical classes as `(coefficient, radicand, root)`.
    pub(crate) fn radical_terms(&self) -> impl Iterator<Item = (&BigRational, u64, u32)> {
        self.classes
            .iter()
            .filter(|c| !c.coefficient.is_zero())
            .map(|c| (&c.coefficient, c.radicand, c.root))
    }

    pub fn integer_part(&self) -> i64 {
        self.integer
    }

    pub fn to_f64(&self) -> f64 {
        self.integer as f64
            + self
                .radical_terms()
                .map(|(c, q, r)| c.to_f64().unwrap_or(f64::NAN) * (q as f64).powf(1.0 / r as f64))
                .sum::<f64>()
    }
}

impl<'a> FromIterator<&'a RootExponent> for ExponentSum {
    fn from_iter<I: IntoIterator<Item = &'a RootExponent>>(iter: I) -> Self {
        let mut s = ExponentSum::new();
        for e in iter {
            s.push(e);
        }
        s
    }
}

/// `a^(1/r) / b^(1/s)` when it is rational.
fn radical_ratio(a: u64, r: u32, b: u64, s: u32) -> Option<BigRational> {
    let l = r.lcm(&s);
    let num: BigInt = Pow::pow(BigInt::from(a), l / r);
    let den: BigInt = Pow::pow(BigInt::from(b), l / s);
    let g = num.gcd(&den);
    let (num, den) = (num / &g, den / &g);
    let rn = num.nth_root(l);
    let rd = den.nth_root(l);
    if Pow::pow(&rn, l) == num && Pow::pow(&rd, l) == den {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_display_forms() {
        for (q, r) in [(7, 1), (-3, 1), (2, 2), (-2, 2), (5, 3), (-9, 4), (0, 1)] {
            let e = RootExponent::new(q, r).unwrap();
            assert_eq!(e.to_string().parse::<RootExponent>().unwrap(), e);
        }
        assert_eq!("sqrt(4)".parse::<RootExponent>().unwrap(), RootExponent::int(2));
        for bad in ["", "sqrt(2", "root(2)", "sqrt(-2)", "x"] {
            assert!(bad.parse::<RootExponent>().is_err(), "{bad}");
        }
    }
    use proptest::prelude::*;

    fn re(q: i64, r: u32) -> RootExponent {
        RootExponent::new(q, r).unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare_exponents(&re(9, 2), &re(3, 1)), Ordering::Equal);
        assert_eq!(compare_exponents(&re(2, 2), &re(3, 2)), Ordering::Less);
        assert_eq!(compare_exponents(&re(5, 2), &re(2, 1)), Ordering::Greater);
        // Brute cross-power oracle for the last case: 5 > 2^2.
        assert!(5i64.pow(1) > 2i64.pow(2));
    }

    #[test]
    fn canonical_roots() {
        assert_eq!(re(9, 2), RootExponent::int(3));
        assert_eq!(re(-8, 3), RootExponent::int(-2));
        assert_eq!(re(4, 4), re(2, 2));
        assert_eq!(re(64, 6), RootExponent::int(2));
        assert_eq!(re(0, 5), RootExponent::int(0));
        assert_eq!(re(-1, 4), RootExponent::int(-1));
        assert!(RootExponent::new(3, 0).is_err());
    }

    #[test]
    fn negation_is_exact() {
        let a = re(7, 3);
        assert_eq!(compare_exponents(&(-a), &re(-7, 3)), Ordering::Equal);
        assert_eq!((-a).to_f64(), -(a.to_f64()));
    }

    #[test]
    fn sums_detect_cancellation() {
        let s: ExponentSum = [re(2, 2), re(-2, 2), RootExponent::int(1), RootExponent::int(-1)]
            .iter()
            .collect();
        assert_eq!(s.as_integer(), Some(0));
        // sqrt(8) - sqrt(2) - sqrt(2) = 0 through proportional classes.
        let s: ExponentSum = [re(8, 2), re(-2, 2), re(-2, 2)].iter().collect();
        assert_eq!(s.as_integer(), Some(0));
        let s: ExponentSum = [re(2, 2), re(-3, 2)].iter().collect();
        assert_eq!(s.as_integer(), None);
        assert!((s.to_f64() - (2f64.sqrt() - 3f64.sqrt())).abs() < 1e-12);
        // 4^(1/3) and 2^(1/3) are not proportional over Q.
        let s: ExponentSum = [re(4, 3), re(-2, 3)].iter().collect();
        assert_eq!(s.as_integer(), None);
    }

    proptest! {
        #[test]
        fn order_is_total_and_numeric(
            a in (-400i64..400, 1u32..5),
            b in (-400i64..400, 1u32..5),
            c in (-400i64..400, 1u32..5),
        ) {
            let (x, y, z) = (re(a.0, a.1), re(b.0, b.1), re(c.0, c.1));
            prop_assert_eq!(compare_exponents(&x, &y), compare_exponents(&y, &x).reverse());
            if x <= y && y <= z {
                prop_assert!(x <= z);
            }
            let (fx, fy) = (x.to_f64(), y.to_f64());
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(compare_exponents(&x, &y), fx.partial_cmp(&fy).unwrap());
            }
        }
    }
}
