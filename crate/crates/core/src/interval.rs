//! Certified real arithmetic on dyadic intervals with directed rounding.
//!
//! An [`Interval`] encloses a real number between two dyadic endpoints. Every
//! operation rounds the lower endpoint down and the upper endpoint up to the
//! interval's mantissa budget, so enclosures stay valid through any chain of
//! operations. Transcendental functions (`2^x`, `exp`, `ln`) use Taylor or
//! `atanh` series with explicit remainder bounds, evaluated at the target
//! precision plus guard bits.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dyadic::{DyadicRational, Round};
use crate::exponent::{ExponentSum, RootExponent};

/// Default mantissa budget in bits.
pub const DEFAULT_PRECISION: u32 = 128;

const GUARD_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: DyadicRational,
    hi: DyadicRational,
    /// Mantissa bits kept by rounding; `0` means exact (no rounding).
    precision: u32,
}

impl Interval {
    /// Builds `[lo, hi]`, rounding outward to `precision` bits.
    pub fn new(lo: DyadicRational, hi: DyadicRational, precision: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval {
            lo: lo.round(precision, Round::Down),
            hi: hi.round(precision, Round::Up),
            precision,
        }
    }

    pub fn point(x: DyadicRational, precision: u32) -> Self {
        Self::new(x.clone(), x, precision)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::point(DyadicRational::from_i64(v), 0)
    }

    pub fn lo(&self) -> &DyadicRational {
        &self.lo
    }

    pub fn hi(&self) -> &DyadicRational {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = precision;
        self.lo = self.lo.round(precision, Round::Down);
        self.hi = self.hi.round(precision, Round::Up);
        self
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &DyadicRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint(&self) -> DyadicRational {
        (&self.lo + &self.hi).shl(-1)
    }

    /// Half the width: a bound on `|midpoint − true value|`.
    pub fn radius(&self) -> DyadicRational {
        (&self.hi - &self.lo).shl(-1)
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    /// An `f64` that is `>=` [`Interval::radius`] and covers the rounding of
    /// [`Interval::to_f64`].
    pub fn error_bound(&self) -> f64 {
        let r = self.radius().to_f64();
        let m = self.midpoint().to_f64().abs();
        // One ulp of the reported midpoint plus one ulp of the radius itself.
        next_up(r + m * f64::EPSILON)
    }

    /// Certain order with respect to `x`, or `None` if `x` lies inside.
    pub fn cmp_dyadic(&self, x: &DyadicRational) -> Option<Ordering> {
        if &self.hi < x {
            Some(Ordering::Less)
        } else if &self.lo > x {
            Some(Ordering::Greater)
        } else if self.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Enclosure of `max(a, b)`.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            precision: self.precision.max(other.precision),
        }
    }

    /// Enclosure of `min(a, b)`.
    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
            precision: self.precision.max(other.precision),
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        let f = DyadicRational::new(k.clone(), 0);
        self * &Interval::point(f, 0)
    }

    /// `self / k` for a nonzero integer `k`.
    pub fn div_int(&self, k: &BigInt) -> Interval {
        let p = self.work_bits();
        let (a, b) = if k.is_negative() {
            (-&self.hi, -&self.lo)
        } else {
            (self.lo.clone(), self.hi.clone())
        };
        let m = k.abs();
        Interval {
            lo: a.div_int(&m, p, Round::Down),
            hi: b.div_int(&m, p, Round::Up),
            precision: self.precision,
        }
    }

    pub fn mul_rational(&self, q: &BigRational) -> Interval {
        self.mul_int(q.numer()).div_int(q.denom())
    }

    /// `1 / self` for intervals not containing zero.
    pub fn recip(&self) -> Option<Interval> {
        if !(self.lo.is_positive() || self.hi.is_negative()) {
            return None;
        }
        let p = self.work_bits();
        let one = DyadicRational::one();
        let lo = recip_round(&self.hi, p, Round::Down, &one);
        let hi = recip_round(&self.lo, p, Round::Up, &one);
        Some(Interval {
            lo,
            hi,
            precision: self.precision,
        })
    }

    /// Integer power for nonnegative intervals.
    pub fn powi(&self, n: u32) -> Interval {
        let mut acc = Interval::from_i64(1).with_precision(self.precision);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    fn work_bits(&self) -> u32 {
        if self.precision == 0 {
            DEFAULT_PRECISION + GUARD_BITS
        } else {
            self.precision
        }
    }

    /// Enclosure of `2^self`.
    pub fn exp2(&self) -> Interval {
        let p = self.work_bits();
        let wp = p + GUARD_BITS;
        let lo = exp2_point(&self.lo, wp).lo;
        let hi = exp2_point(&self.hi, wp).hi;
        Interval::new(lo, hi, p)
    }

    /// Enclosure of `e^self`.
    pub fn exp(&self) -> Interval {
        let p = self.work_bits();
        let wp = p + GUARD_BITS;
        let lo = exp_point(&self.lo, wp).lo;
        let hi = exp_point(&self.hi, wp).hi;
        Interval::new(lo, hi, p)
    }

    /// Enclosure of the natural logarithm; `None` unless `self > 0`.
    pub fn ln(&self) -> Option<Interval> {
        if !self.lo.is_positive() {
            return None;
        }
        let p = self.work_bits();
        let wp = p + GUARD_BITS;
        let lo = ln_point(&self.lo, wp).lo;
        let hi = ln_point(&self.hi, wp).hi;
        Some(Interval::new(lo, hi, p))
    }

    /// `self^alpha` for `self > 0` and finite `alpha >= 0`.
    pub fn pow_f64(&self, alpha: f64) -> Option<Interval> {
        if alpha.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&alpha) {
            if !(self.lo.is_positive() || self.lo.is_zero()) {
                return None;
            }
            return Some(self.powi(alpha as u32));
        }
        let a = Interval::point(DyadicRational::from_f64(alpha)?, 0);
        let l = self.ln()?;
        Some((&a * &l).exp())
    }
}

fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let b = x.to_bits();
    if x > 0.0 {
        f64::from_bits(b + 1)
    } else {
        f64::from_bits(b - 1)
    }
}

fn recip_round(x: &DyadicRational, bits: u32, dir: Round, one: &DyadicRational) -> DyadicRational {
    // 1 / (n·2^e) = 2^-e / n
    let n = x.numerator();
    let scaled = one.shl(-x.exponent());
    let (num, d) = if n.is_negative() {
        (-&scaled, -n)
    } else {
        (scaled, n.clone())
    };
    num.div_int(&d, bits, dir)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± {:.3e}", self.to_f64(), self.error_bound())
    }
}

impl<'a> Add<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        let p = self.precision.max(rhs.precision);
        Interval {
            lo: (&self.lo + &rhs.lo).round(p, Round::Down),
            hi: (&self.hi + &rhs.hi).round(p, Round::Up),
            precision: p,
        }
    }
}

impl<'a> Sub<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        let p = self.precision.max(rhs.precision);
        Interval {
            lo: (&self.lo - &rhs.hi).round(p, Round::Down),
            hi: (&self.hi - &rhs.lo).round(p, Round::Up),
            precision: p,
        }
    }
}

impl<'a> Mul<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let p = self.precision.max(rhs.precision);
        let nonneg = |x: &Interval| !x.lo.is_negative();
        if nonneg(self) && nonneg(rhs) {
            return Interval {
                lo: (&self.lo * &rhs.lo).round(p, Round::Down),
                hi: (&self.hi * &rhs.hi).round(p, Round::Up),
                precision: p,
            };
        }
        let cands = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = cands.iter().min().expect("nonempty").round(p, Round::Down);
        let hi = cands.iter().max().expect("nonempty").round(p, Round::Up);
        Interval { lo, hi, precision: p }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            precision: self.precision,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Zero for Interval {
    fn zero() -> Self {
        Interval::from_i64(0)
    }
    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl One for Interval {
    fn one() -> Self {
        Interval::from_i64(1)
    }
}

/// Raw bounds used while summing series before the final outward rounding.
struct Bounds {
    lo: DyadicRational,
    hi: DyadicRational,
}

/// `ln 2 = Σ_{i≥1} 1/(i·2^i)`, tail after `N` terms at most `2^-N`.
pub fn ln2(precision: u32) -> Interval {
    static CACHE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("ln2 cache").get(&precision) {
        return v.clone();
    }
    let wp = precision + GUARD_BITS;
    let n_terms = wp as i64 + 4;
    let mut lo = DyadicRational::zero();
    let mut hi = DyadicRational::zero();
    for i in 1..=n_terms {
        let t = DyadicRational::pow2(-i);
        let d = BigInt::from(i);
        lo = (&lo + &t.div_int(&d, wp, Round::Down)).round(wp, Round::Down);
        hi = (&hi + &t.div_int(&d, wp, Round::Up)).round(wp, Round::Up);
    }
    hi = &hi + &DyadicRational::pow2(-n_terms);
    let v = Interval::new(lo, hi, precision);
    cache.lock().expect("ln2 cache").insert(precision, v.clone());
    v
}

/// Euler's number.
pub fn e_const(precision: u32) -> Interval {
    let wp = precision + GUARD_BITS;
    let b = exp_unit(&DyadicRational::one(), wp);
    Interval::new(b.lo, b.hi, precision)
}

/// `exp(t)` for `0 <= t <= 1` by Taylor series.
///
/// For `i >= 1` and `t <= 1` the tail after the `i`-th term is at most the
/// `i`-th term itself.
fn exp_unit(t: &DyadicRational, wp: u32) -> Bounds {
    debug_assert!(!t.is_negative() && *t <= DyadicRational::one());
    const HALVINGS: i64 = 8;
    if t.floor_log2().is_some_and(|l| l >= -HALVINGS) {
        // exp(t) = exp(t / 2^8)^(2^8); squaring costs 8 bits, within the guard.
        let Bounds { mut lo, mut hi } = exp_series(&t.shl(-HALVINGS), wp + HALVINGS as u32);
        for _ in 0..HALVINGS {
            lo = (&lo * &lo).round(wp + HALVINGS as u32, Round::Down);
            hi = (&hi * &hi).round(wp + HALVINGS as u32, Round::Up);
        }
        return Bounds {
            lo: lo.round(wp, Round::Down),
            hi: hi.round(wp, Round::Up),
        };
    }
    exp_series(t, wp)
}

fn exp_series(t: &DyadicRational, wp: u32) -> Bounds {
    let mut sum_lo = DyadicRational::one();
    let mut sum_hi = DyadicRational::one();
    if t.is_zero() {
        return Bounds { lo: sum_lo, hi: sum_hi };
    }
    let mut term_lo = DyadicRational::one();
    let mut term_hi = DyadicRational::one();
    let stop = DyadicRational::pow2(-(wp as i64) - 4);
    let mut i: i64 = 1;
    loop {
        let d = BigInt::from(i);
        term_lo = (&term_lo * t).round(wp, Round::Down).div_int(&d, wp, Round::Down);
        term_hi = (&term_hi * t).round(wp, Round::Up).div_int(&d, wp, Round::Up);
        sum_lo = (&sum_lo + &term_lo).round(wp, Round::Down);
        sum_hi = (&sum_hi + &term_hi).round(wp, Round::Up);
        if term_hi < stop {
            break;
        }
        i += 1;
    }
    sum_hi = (&sum_hi + &term_hi).round(wp, Round::Up);
    Bounds { lo: sum_lo, hi: sum_hi }
}

/// Enclosure of `2^x` for a dyadic point `x`.
fn exp2_point(x: &DyadicRational, wp: u32) -> Bounds {
    let a = x.floor();
    let a_i = a.to_i64().expect("exponent fits in i64");
    let f = x - &DyadicRational::new(a, 0);
    if f.is_zero() {
        let v = DyadicRational::pow2(a_i);
        return Bounds { lo: v.clone(), hi: v };
    }
    let l = ln2(wp);
    let t_lo = (&f * l.lo()).round(wp, Round::Down);
    let t_hi = (&f * l.hi()).round(wp, Round::Up);
    let lo = exp_unit(&t_lo, wp).lo.shl(a_i);
    let hi = exp_unit(&t_hi, wp).hi.shl(a_i);
    Bounds { lo, hi }
}

/// Enclosure of `e^x` for a dyadic point `x`, via `x = a·ln2 + r`, `0 <= r <= 1`.
fn exp_point(x: &DyadicRational, wp: u32) -> Bounds {
    let l = ln2(wp);
    let mut a = (x.to_f64() / std::f64::consts::LN_2).floor() as i64;
    loop {
        let a_d = DyadicRational::from_i64(a);
        // r = x − a·ln2 ∈ [x − a·ln2_hi, x − a·ln2_lo] for a >= 0 (reversed for a < 0).
        let (p_lo, p_hi) = if a >= 0 {
            (&a_d * l.lo(), &a_d * l.hi())
        } else {
            (&a_d * l.hi(), &a_d * l.lo())
        };
        let r_lo = (x - &p_hi).round(wp, Round::Down);
        let r_hi = (x - &p_lo).round(wp, Round::Up);
        if r_lo.is_negative() {
            a -= 1;
            continue;
        }
        if r_hi > DyadicRational::one() {
            a += 1;
            continue;
        }
        let lo = exp_unit(&r_lo, wp).lo.shl(a);
        let hi = exp_unit(&r_hi, wp).hi.shl(a);
        return Bounds { lo, hi };
    }
}

/// Enclosure of `ln y` for a dyadic point `y > 0`.
///
/// `y = m·2^a` with `m ∈ [1, 2)`, and `ln m = 2·atanh(z)` for
/// `z = (m−1)/(m+1) ∈ [0, 1/3)`; the series tail after the `z^(2N+1)` term is
/// at most `(9/8)·z^(2N+3)/(2N+3)`.
fn ln_point(y: &DyadicRational, wp: u32) -> Bounds {
    let a = y.floor_log2().expect("positive input");
    let m = y.shl(-a);
    let l = ln2(wp);
    let a_d = DyadicRational::from_i64(a);
    let (al_lo, al_hi) = if a >= 0 {
        (&a_d * l.lo(), &a_d * l.hi())
    } else {
        (&a_d * l.hi(), &a_d * l.lo())
    };
    if m == DyadicRational::one() {
        return Bounds { lo: al_lo, hi: al_hi };
    }
    // z = (M − D)/(M + D) with m = M/D, D = 2^-e.
    let e = m.exponent();
    let big_m = m.numerator().clone();
    let big_d = BigInt::one() << ((-e) as usize);
    let num = DyadicRational::new(&big_m - &big_d, 0);
    let den = &big_m + &big_d;
    let z_lo = num.div_int(&den, wp, Round::Down);
    let z_hi = num.div_int(&den, wp, Round::Up);
    let z2_lo = (&z_lo * &z_lo).round(wp, Round::Down);
    let z2_hi = (&z_hi * &z_hi).round(wp, Round::Up);
    let mut pow_lo = z_lo.clone();
    let mut pow_hi = z_hi.clone();
    let mut s_lo = z_lo;
    let mut s_hi = z_hi;
    let stop = DyadicRational::pow2(-(wp as i64) - 4);
    let mut k: i64 = 1;
    loop {
        pow_lo = (&pow_lo * &z2_lo).round(wp, Round::Down);
        pow_hi = (&pow_hi * &z2_hi).round(wp, Round::Up);
        let d = BigInt::from(2 * k + 1);
        s_lo = (&s_lo + &pow_lo.div_int(&d, wp, Round::Down)).round(wp, Round::Down);
        s_hi = (&s_hi + &pow_hi.div_int(&d, wp, Round::Up)).round(wp, Round::Up);
        if pow_hi < stop {
            break;
        }
        k += 1;
    }
    // Tail: (9/8)·z^(2k+3)/(2k+3) <= 2·pow_hi·z² ≤ pow_hi.
    s_hi = (&s_hi + &pow_hi).round(wp, Round::Up);
    let lo = (&al_lo + &s_lo.shl(1)).round(wp, Round::Down);
    let hi = (&al_hi + &s_hi.shl(1)).round(wp, Round::Up);
    Bounds { lo, hi }
}

/// Enclosure of the real number denoted by a root exponent.
pub fn root_enclosure(e: &RootExponent, precision: u32) -> Interval {
    if let Some(v) = e.as_integer() {
        return Interval::point(DyadicRational::from_i64(v), 0);
    }
    let w = precision as usize;
    let mag = BigInt::from(e.radicand().unsigned_abs());
    let scaled = &mag << (w * e.root() as usize);
    let floor = scaled.nth_root(e.root());
    let lo = DyadicRational::new(floor.clone(), -(w as i64));
    let hi = DyadicRational::new(floor + 1, -(w as i64));
    if e.signum() < 0 {
        Interval::new(-hi, -lo, precision)
    } else {
        Interval::new(lo, hi, precision)
    }
}

/// Enclosure of `2^e`; exact for integer exponents.
pub fn pow2_root(e: &RootExponent, precision: u32) -> Interval {
    static CACHE: OnceLock<Mutex<HashMap<(RootExponent, u32), Interval>>> = OnceLock::new();
    if let Some(v) = e.as_integer() {
        return Interval::point(DyadicRational::pow2(v), precision);
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("pow2 cache").get(&(*e, precision)) {
        return v.clone();
    }
    let wp = precision + GUARD_BITS;
    let x = root_enclosure(e, wp);
    let lo = exp2_point(x.lo(), wp).lo;
    let hi = exp2_point(x.hi(), wp).hi;
    let v = Interval::new(lo, hi, precision);
    cache.lock().expect("pow2 cache").insert((*e, precision), v.clone());
    v
}

/// Enclosure of an exact exponent sum.
pub fn sum_enclosure(s: &ExponentSum, precision: u32) -> Interval {
    let wp = precision + GUARD_BITS;
    let mut acc = Interval::from_i64(s.integer_part()).with_precision(wp);
    for (c, q, r) in s.radical_terms() {
        let rad = RootExponent::new(q as i64, r).expect("root >= 1");
        acc = &acc + &root_enclosure(&rad, wp).mul_rational(c);
    }
    acc.with_precision(precision)
}

/// Enclosure of `2^s`; exact when the sum is an integer.
pub fn pow2_sum(s: &ExponentSum, precision: u32) -> Interval {
    if let Some(v) = s.as_integer() {
        return Interval::point(DyadicRational::pow2(v), precision);
    }
    let wp = precision + GUARD_BITS;
    sum_enclosure(s, wp).exp2().with_precision(precision)
}
