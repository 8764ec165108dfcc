//! Exact dyadic rationals `numerator · 2^exponent`.
//!
//! Values are kept canonical: the numerator is odd, or the value is zero with
//! exponent `0`. Canonical form makes structural equality coincide with
//! numeric equality, so `Eq`/`Hash` can be derived.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction used when a dyadic value is truncated to a bit budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigInt,
    exponent: i64,
}

impl DyadicRational {
    pub fn new(numerator: BigInt, exponent: i64) -> Self {
        let mut v = DyadicRational { numerator, exponent };
        v.normalize();
        v
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    /// Exactly `2^e`.
    pub fn pow2(e: i64) -> Self {
        DyadicRational {
            numerator: BigInt::one(),
            exponent: e,
        }
    }

    /// Exact conversion; every finite `f64` is dyadic. Returns `None` for NaN/inf.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Self::new(BigInt::from(mant) * sign, exp))
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.numerator.is_positive()
    }

    pub fn abs(&self) -> Self {
        DyadicRational {
            numerator: self.numerator.abs(),
            exponent: self.exponent,
        }
    }

    /// Multiplies by `2^shift` exactly.
    pub fn shl(&self, shift: i64) -> Self {
        if self.numerator.is_zero() {
            return self.clone();
        }
        DyadicRational {
            numerator: self.numerator.clone(),
            exponent: self.exponent + shift,
        }
    }

    /// `floor(log2 |x|)` for nonzero `x`.
    pub fn floor_log2(&self) -> Option<i64> {
        if self.numerator.is_zero() {
            None
        } else {
            Some(self.numerator.bits() as i64 - 1 + self.exponent)
        }
    }

    /// True when the value is `±2^e` for some integer `e`.
    pub fn is_power_of_two(&self) -> bool {
        self.numerator.magnitude().is_one()
    }

    /// `floor(x)` as a big integer.
    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.numerator << (self.exponent as usize)
        } else {
            floor_shr(&self.numerator, (-self.exponent) as u64)
        }
    }

    /// Truncates the numerator to at most `bits` significant bits, rounding in
    /// the requested direction. `bits == 0` means no truncation.
    pub fn round(&self, bits: u32, dir: Round) -> Self {
        let len = self.numerator.bits();
        if bits == 0 || len <= bits as u64 {
            return self.clone();
        }
        let shift = len - bits as u64;
        let mag = self.numerator.magnitude();
        let mut q: BigUint = mag >> shift;
        let inexact = mag.trailing_zeros().is_some_and(|tz| tz < shift);
        let away = matches!(
            (self.numerator.sign(), dir),
            (Sign::Plus, Round::Up) | (Sign::Minus, Round::Down)
        );
        if inexact && away {
            q += 1u32;
        }
        let sign = self.numerator.sign();
        Self::new(BigInt::from_biguint(sign, q), self.exponent + shift as i64)
    }

    /// `self / d` rounded to `bits` significant bits in direction `dir`.
    pub fn div_int(&self, d: &BigInt, bits: u32, dir: Round) -> Self {
        assert!(!d.is_zero(), "division by zero");
        if self.numerator.is_zero() {
            return Self::zero();
        }
        // Scale so the quotient carries at least `bits + 2` significant bits.
        let extra = (d.bits() as i64 + bits as i64 + 2 - self.numerator.bits() as i64).max(0);
        let scaled = &self.numerator << (extra as usize);
        let (mut q, r) = num_integer::Integer::div_mod_floor(&scaled, d);
        if !r.is_zero() && dir == Round::Up {
            q += 1;
        }
        Self::new(q, self.exponent - extra).round(bits, dir)
    }

    /// Round-to-nearest `f64` (up to the final rounding of the 64 leading bits).
    pub fn to_f64(&self) -> f64 {
        if self.numerator.is_zero() {
            return 0.0;
        }
        let len = self.numerator.bits() as i64;
        let shift = (len - 64).max(0);
        let top = (self.numerator.magnitude() >> shift as u64)
            .to_u64()
            .expect("64 leading bits fit");
        let sign = if self.numerator.is_negative() { -1.0 } else { 1.0 };
        let e = self.exponent + shift;
        sign * scale_f64(top as f64, e)
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        if let Some(tz) = self.numerator.trailing_zeros() {
            if tz > 0 {
                self.numerator >>= tz as usize;
                self.exponent += tz as i64;
            }
        }
    }
}

fn floor_shr(x: &BigInt, shift: u64) -> BigInt {
    if x.is_negative() {
        let mag = x.magnitude();
        let q: BigUint = mag >> shift;
        let exact = mag.trailing_zeros().is_none_or(|tz| tz >= shift);
        let q = if exact { q } else { q + 1u32 };
        -BigInt::from(q)
    } else {
        x >> (shift as usize)
    }
}

fn scale_f64(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl Zero for DyadicRational {
    fn zero() -> Self {
        DyadicRational {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }
    fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

impl One for DyadicRational {
    fn one() -> Self {
        Self::pow2(0)
    }
}

impl<'a> Add<&'a DyadicRational> for &'a DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        if self.numerator.is_zero() {
            return rhs.clone();
        }
        if rhs.numerator.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.numerator << ((self.exponent - e) as usize);
        let b = &rhs.numerator << ((rhs.exponent - e) as usize);
        DyadicRational::new(a + b, e)
    }
}

impl<'a> Sub<&'a DyadicRational> for &'a DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a DyadicRational> for &'a DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        if self.numerator.is_zero() || rhs.numerator.is_zero() {
            return DyadicRational::zero();
        }
        // Product of odd numerators is odd: already canonical.
        DyadicRational {
            numerator: &self.numerator * &rhs.numerator,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

impl Neg for &DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational {
            numerator: -&self.numerator,
            exponent: self.exponent,
        }
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DyadicRational {
            type Output = DyadicRational;
            fn $m(self, rhs: DyadicRational) -> DyadicRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.numerator.sign(), other.numerator.sign());
        if sa != sb {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.numerator << ((self.exponent - e) as usize);
        let b = &other.numerator << ((other.exponent - e) as usize);
        a.cmp(&b)
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for DyadicRational {
    fn from(v: i64) -> Self {
        Self::from_i64(v)
    }
}

/// Prints integers plainly and proper dyadics as `p/2^q` expanded, e.g. `3/2`.
impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            write!(f, "{}", &self.numerator << (self.exponent as usize))
        } else {
            let den = BigInt::one() << ((-self.exponent) as usize);
            write!(f, "{}/{}", self.numerator, den)
        }
    }
}
