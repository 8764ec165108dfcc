//! Nonnegative enclosures with 128-bit mantissas and directed rounding.
//!
//! [`Interval128`] is the fast certified scalar of the measure engine. It only
//! encloses nonnegative reals: subtraction assumes the true difference is
//! nonnegative, which holds for the side-length differences the engine forms.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_traits::{One, ToPrimitive, Zero};

use crate::dyadic::{DyadicRational, Round};
use crate::error::Result;
use crate::exponent::RootExponent;
use crate::interval::{self, Interval};
use crate::scalar::MeasureScalar;

/// `mant·2^exp` with `mant` normalized to bit 127 set, or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Float128 {
    mant: u128,
    exp: i64,
}

const TOP: u128 = 1 << 127;

#[derive(Clone, Copy)]
struct U256 {
    hi: u128,
    lo: u128,
}

impl U256 {
    fn is_zero(&self) -> bool {
        self.hi == 0 && self.lo == 0
    }

    fn leading_zeros(&self) -> u32 {
        if self.hi != 0 {
            self.hi.leading_zeros()
        } else {
            128 + self.lo.leading_zeros()
        }
    }

    fn shl(&self, s: u32) -> U256 {
        match s {
            0 => *self,
            1..=127 => U256 {
                hi: (self.hi << s) | (self.lo >> (128 - s)),
                lo: self.lo << s,
            },
            128..=255 => U256 {
                hi: self.lo << (s - 128),
                lo: 0,
            },
            _ => U256 { hi: 0, lo: 0 },
        }
    }

    fn overflowing_add(&self, o: &U256) -> (U256, bool) {
        let (lo, c) = self.lo.overflowing_add(o.lo);
        let (hi, c1) = self.hi.overflowing_add(o.hi);
        let (hi, c2) = hi.overflowing_add(c as u128);
        (U256 { hi, lo }, c1 || c2)
    }

    fn wrapping_sub(&self, o: &U256) -> U256 {
        let (lo, b) = self.lo.overflowing_sub(o.lo);
        let hi = self.hi.wrapping_sub(o.hi).wrapping_sub(b as u128);
        U256 { hi, lo }
    }

    fn mul(a: u128, b: u128) -> U256 {
        let (a1, a0) = (a >> 64, a & u64::MAX as u128);
        let (b1, b0) = (b >> 64, b & u64::MAX as u128);
        let p00 = a0 * b0;
        let p01 = a0 * b1;
        let p10 = a1 * b0;
        let p11 = a1 * b1;
        let mid = (p00 >> 64) + (p01 & u64::MAX as u128) + (p10 & u64::MAX as u128);
        let lo = (p00 & u64::MAX as u128) | (mid << 64);
        let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
        U256 { hi, lo }
    }

    /// `m·2^-s` as a 256-bit value scaled by `2^128`, and whether bits were lost.
    fn aligned(m: u128, s: u64) -> (U256, bool) {
        match s {
            0 => (U256 { hi: m, lo: 0 }, false),
            1..=127 => (
                U256 {
                    hi: m >> s,
                    lo: m << (128 - s),
                },
                false,
            ),
            128 => (U256 { hi: 0, lo: m }, false),
            129..=255 => {
                let t = s - 128;
                (U256 { hi: 0, lo: m >> t }, m & ((1u128 << t) - 1) != 0)
            }
            _ => (U256 { hi: 0, lo: 0 }, m != 0),
        }
    }
}

impl Float128 {
    pub const ZERO: Float128 = Float128 { mant: 0, exp: 0 };

    pub fn is_zero(&self) -> bool {
        self.mant == 0
    }

    /// Rounds `v·2^exp`, where the true value lies in `(v, v + 1)·2^exp`
    /// when `above` is set and equals `v·2^exp` otherwise.
    fn round(v: U256, exp: i64, above: bool, dir: Round) -> Float128 {
        if v.is_zero() {
            return match (dir, above) {
                (Round::Up, true) => Float128 {
                    mant: TOP,
                    exp: exp - 127,
                },
                _ => Float128::ZERO,
            };
        }
        let lz = v.leading_zeros();
        let n = v.shl(lz);
        let mut mant = n.hi;
        let mut e = exp - lz as i64 + 128;
        let inexact = n.lo != 0 || above;
        if inexact && dir == Round::Up {
            let (m, c) = mant.overflowing_add(1);
            if c {
                mant = TOP;
                e += 1;
            } else {
                mant = m;
            }
        }
        Float128 { mant, exp: e }
    }

    pub fn mul(&self, o: &Float128, dir: Round) -> Float128 {
        if self.is_zero() || o.is_zero() {
            return Float128::ZERO;
        }
        Float128::round(U256::mul(self.mant, o.mant), self.exp + o.exp, false, dir)
    }

    pub fn add(&self, o: &Float128, dir: Round) -> Float128 {
        if o.is_zero() {
            return *self;
        }
        if self.is_zero() {
            return *o;
        }
        let (a, b) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let (bs, lost) = U256::aligned(b.mant, (a.exp - b.exp) as u64);
        let base = a.exp - 128;
        let (sum, carry) = U256 { hi: a.mant, lo: 0 }.overflowing_add(&bs);
        if carry {
            let low = sum.lo & 1 != 0;
            let v = U256 {
                hi: (sum.hi >> 1) | TOP,
                lo: (sum.lo >> 1) | (sum.hi << 127),
            };
            Float128::round(v, base + 1, lost || low, dir)
        } else {
            Float128::round(sum, base, lost, dir)
        }
    }

    /// `max(self − o, 0)` rounded in direction `dir`.
    pub fn sub(&self, o: &Float128, dir: Round) -> Float128 {
        if o.is_zero() {
            return *self;
        }
        if self.cmp_value(o) != Ordering::Greater {
            return Float128::ZERO;
        }
        let (bs, lost) = U256::aligned(o.mant, (self.exp - o.exp) as u64);
        let base = self.exp - 128;
        let diff = U256 { hi: self.mant, lo: 0 }.wrapping_sub(&bs);
        if lost {
            // True value lies in (diff − 1, diff).
            match dir {
                Round::Up => Float128::round(diff, base, false, Round::Up),
                Round::Down => {
                    let d1 = diff.wrapping_sub(&U256 { hi: 0, lo: 1 });
                    Float128::round(d1, base, false, Round::Down)
                }
            }
        } else {
            Float128::round(diff, base, false, dir)
        }
    }

    fn cmp_value(&self, o: &Float128) -> Ordering {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.exp.cmp(&o.exp).then(self.mant.cmp(&o.mant)),
        }
    }

    /// Rounds a nonnegative dyadic; negative inputs become zero.
    pub fn from_dyadic(x: &DyadicRational, dir: Round) -> Float128 {
        if !x.is_positive() {
            return Float128::ZERO;
        }
        let n = x.numerator();
        let bits = n.bits();
        if bits <= 128 {
            let m = n.to_u128().expect("fits in 128 bits");
            let s = 128 - bits as u32;
            Float128 {
                mant: m << s,
                exp: x.exponent() - s as i64,
            }
        } else {
            let shift = bits - 128;
            let top: BigInt = n >> shift;
            let lost = (&top << shift) != *n;
            let m = top.to_u128().expect("fits in 128 bits");
            Float128::round(U256 { hi: 0, lo: m }, x.exponent() + shift as i64, lost, dir)
        }
    }

    pub fn to_dyadic(&self) -> DyadicRational {
        if self.is_zero() {
            return DyadicRational::zero();
        }
        DyadicRational::new(BigInt::from_biguint(Sign::Plus, self.mant.into()), self.exp)
    }

    /// `self·2^k`.
    pub fn scale(&self, k: i64) -> Float128 {
        if self.is_zero() {
            *self
        } else {
            Float128 {
                mant: self.mant,
                exp: self.exp + k,
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let half = self.exp / 2;
        self.mant as f64 * pow2_f64(half) * pow2_f64(self.exp - half)
    }
}

fn pow2_f64(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        f64::from_bits(1u64 << (e + 1074))
    }
}

const HALVINGS: i64 = 8;
const TERMS: usize = 14;

struct ExpTables {
    ln2: [Float128; 2],
    inv_fact: Vec<[Float128; 2]>,
    tail: Float128,
}

fn exp_tables() -> &'static ExpTables {
    static TABLES: OnceLock<ExpTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let l = interval::ln2(192);
        let mut fact = BigInt::one();
        let mut inv_fact = Vec::with_capacity(TERMS + 1);
        for i in 0..=TERMS {
            if i > 0 {
                fact *= i;
            }
            let one = DyadicRational::one();
            inv_fact.push([
                Float128::from_dyadic(&one.div_int(&fact, 192, Round::Down), Round::Down),
                Float128::from_dyadic(&one.div_int(&fact, 192, Round::Up), Round::Up),
            ]);
        }
        ExpTables {
            ln2: [
                Float128::from_dyadic(l.lo(), Round::Down),
                Float128::from_dyadic(l.hi(), Round::Up),
            ],
            inv_fact,
            // Series remainder for t < 2^-8: below 2 t^15 / 15! < 2^-160.
            tail: Float128::from_dyadic(&DyadicRational::pow2(-160), Round::Up),
        }
    })
}

/// `2^x` rounded toward `dir`, as `exp(f·ln2 / 2^8)^(2^8)·2^⌊x⌋`.
fn exp2_bound(x: &DyadicRational, dir: Round) -> Float128 {
    let side = usize::from(dir == Round::Up);
    let tables = exp_tables();
    let a = x.floor();
    let a = a.to_i64().expect("exponent fits in i64");
    let f = x - &DyadicRational::from_i64(a);
    let t = Float128::from_dyadic(&f, dir)
        .mul(&tables.ln2[side], dir)
        .scale(-HALVINGS);
    let mut s = tables.inv_fact[TERMS][side];
    for c in tables.inv_fact[..TERMS].iter().rev() {
        s = s.mul(&t, dir).add(&c[side], dir);
    }
    if dir == Round::Up {
        s = s.add(&tables.tail, dir);
    }
    for _ in 0..HALVINGS {
        s = s.mul(&s, dir);
    }
    s.scale(a)
}

/// An enclosure `[lo, hi]` of a nonnegative real.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval128 {
    lo: Float128,
    hi: Float128,
}

impl Interval128 {
    pub fn from_interval(x: &Interval) -> Self {
        Interval128 {
            lo: Float128::from_dyadic(x.lo(), Round::Down),
            hi: Float128::from_dyadic(x.hi(), Round::Up),
        }
    }

    pub fn from_dyadic(x: &DyadicRational) -> Self {
        Interval128 {
            lo: Float128::from_dyadic(x, Round::Down),
            hi: Float128::from_dyadic(x, Round::Up),
        }
    }

    pub fn to_interval(&self, precision: u32) -> Interval {
        Interval::new(self.lo.to_dyadic(), self.hi.to_dyadic(), precision)
    }

    pub fn lo(&self) -> &Float128 {
        &self.lo
    }

    pub fn hi(&self) -> &Float128 {
        &self.hi
    }
}

impl Add for Interval128 {
    type Output = Interval128;
    fn add(self, o: Interval128) -> Interval128 {
        Interval128 {
            lo: self.lo.add(&o.lo, Round::Down),
            hi: self.hi.add(&o.hi, Round::Up),
        }
    }
}

impl Sub for Interval128 {
    type Output = Interval128;
    fn sub(self, o: Interval128) -> Interval128 {
        Interval128 {
            lo: self.lo.sub(&o.hi, Round::Down),
            hi: self.hi.sub(&o.lo, Round::Up),
        }
    }
}

impl Mul for Interval128 {
    type Output = Interval128;
    fn mul(self, o: Interval128) -> Interval128 {
        Interval128 {
            lo: self.lo.mul(&o.lo, Round::Down),
            hi: self.hi.mul(&o.hi, Round::Up),
        }
    }
}

impl Zero for Interval128 {
    fn zero() -> Self {
        Interval128 {
            lo: Float128::ZERO,
            hi: Float128::ZERO,
        }
    }

    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl One for Interval128 {
    fn one() -> Self {
        let one = Float128 { mant: TOP, exp: -127 };
        Interval128 { lo: one, hi: one }
    }
}

impl MeasureScalar for Interval128 {
    fn pow2(e: &RootExponent, precision: u32) -> Result<Self> {
        if precision > 128 {
            return Ok(Interval128::from_interval(&interval::pow2_root(e, precision)));
        }
        if let Some(v) = e.as_integer() {
            return Ok(Interval128::from_dyadic(&DyadicRational::pow2(v)));
        }
        let x = interval::root_enclosure(e, 192);
        Ok(Interval128 {
            lo: exp2_bound(x.lo(), Round::Down),
            hi: exp2_bound(x.hi(), Round::Up),
        })
    }

    fn approx_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }
}
