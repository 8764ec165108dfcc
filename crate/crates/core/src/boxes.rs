//! Origin-anchored axis-parallel boxes `[0, 2^{e_1}) × ⋯ × [0, 2^{e_d})`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;

use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::exponent::{compare_exponents, ExponentSum, ExponentVec, RootExponent};
use crate::interval::{self, Interval};

const MAX_REFINE_BITS: u32 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnchoredBox {
    exps: Vec<RootExponent>,
}

impl AnchoredBox {
    pub fn new(exps: Vec<RootExponent>) -> Result<Self> {
        if exps.is_empty() {
            return Err(Error::InvalidParameter("box dimension must be at least 1".into()));
        }
        Ok(AnchoredBox { exps })
    }

    pub fn from_ints(exps: &[i64]) -> Result<Self> {
        Self::new(exps.iter().copied().map(RootExponent::int).collect())
    }

    /// The cube `[0, 2^e)^d`.
    pub fn cube(dim: usize, e: i64) -> Self {
        AnchoredBox {
            exps: vec![RootExponent::int(e); dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn exps(&self) -> &[RootExponent] {
        &self.exps
    }

    pub fn is_integral(&self) -> bool {
        self.exps.iter().all(|e| e.as_integer().is_some())
    }

    pub fn integer_exps(&self) -> Option<ExponentVec> {
        let v: Option<Vec<i64>> = self.exps.iter().map(|e| e.as_integer()).collect();
        v.and_then(|v| ExponentVec::new(v).ok())
    }

    /// Exact sum of exponents, i.e. `log2 |R|`.
    pub fn log2_volume(&self) -> ExponentSum {
        self.exps.iter().collect()
    }

    /// Per-axis `<=` under the exact exponent order.
    pub fn is_dominated_by(&self, other: &AnchoredBox) -> bool {
        self.dim() == other.dim()
            && self
                .exps
                .iter()
                .zip(&other.exps)
                .all(|(a, b)| compare_exponents(a, b) != Ordering::Greater)
    }

    /// Half-open membership of a point with dyadic coordinates.
    pub fn contains_point(&self, x: &[DyadicRational]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        for (xi, e) in x.iter().zip(&self.exps) {
            if xi.is_negative() || !lt_pow2(xi, e)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for AnchoredBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Decides `x < 2^e` exactly for `x >= 0`.
pub(crate) fn lt_pow2(x: &DyadicRational, e: &RootExponent) -> Result<bool> {
    if x.is_zero() {
        return Ok(true);
    }
    let l = x.floor_log2().expect("nonzero");
    if x.is_power_of_two() {
        return Ok(compare_exponents(&RootExponent::int(l), e) == Ordering::Less);
    }
    // l < log2 x < l + 1
    if compare_exponents(e, &RootExponent::int(l + 1)) != Ordering::Less {
        return Ok(true);
    }
    if compare_exponents(e, &RootExponent::int(l)) != Ordering::Greater {
        return Ok(false);
    }
    // 2^e is transcendental here, so refinement terminates.
    let mut bits = 64;
    while bits <= MAX_REFINE_BITS {
        match interval::pow2_root(e, bits).cmp_dyadic(x) {
            Some(Ordering::Greater) => return Ok(true),
            Some(_) => return Ok(false),
            None => bits *= 2,
        }
    }
    Err(Error::Undecided(MAX_REFINE_BITS))
}

/// Decides `x <= 2^e` exactly for `x >= 0`.
pub(crate) fn le_pow2(x: &DyadicRational, e: &RootExponent) -> Result<bool> {
    match e.as_integer() {
        Some(v) => Ok(*x <= DyadicRational::pow2(v)),
        // 2^e is irrational, so equality is impossible.
        None => lt_pow2(x, e),
    }
}

/// A volume or average: exact when the exponent sum is an integer, otherwise a
/// certified enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Measure {
    Exact(DyadicRational),
    Certified(Interval),
}

impl Measure {
    pub fn is_exact(&self) -> bool {
        matches!(self, Measure::Exact(_))
    }

    pub fn exact(&self) -> Option<&DyadicRational> {
        match self {
            Measure::Exact(v) => Some(v),
            Measure::Certified(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Measure::Exact(v) => v.to_f64(),
            Measure::Certified(iv) => iv.to_f64(),
        }
    }

    /// Bound on `|to_f64() − true value|`, up to the final `f64` rounding in exact mode.
    pub fn error_bound(&self) -> f64 {
        match self {
            Measure::Exact(_) => 0.0,
            Measure::Certified(iv) => iv.error_bound(),
        }
    }

    pub fn to_interval(&self) -> Interval {
        match self {
            Measure::Exact(v) => Interval::point(v.clone(), 0),
            Measure::Certified(iv) => iv.clone(),
        }
    }

    pub fn max(&self, other: &Measure) -> Measure {
        match (self, other) {
            (Measure::Exact(a), Measure::Exact(b)) => Measure::Exact(a.clone().max(b.clone())),
            _ => Measure::Certified(self.to_interval().max(&other.to_interval())),
        }
    }

    pub fn min(&self, other: &Measure) -> Measure {
        match (self, other) {
            (Measure::Exact(a), Measure::Exact(b)) => Measure::Exact(a.clone().min(b.clone())),
            _ => Measure::Certified(self.to_interval().min(&other.to_interval())),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Exact(v) => write!(f, "{v}"),
            Measure::Certified(iv) => write!(f, "{iv}"),
        }
    }
}

/// `2^s`, exact when `s` is an integer.
pub fn pow2_measure(s: &ExponentSum, precision: u32) -> Measure {
    match s.as_integer() {
        Some(v) => Measure::Exact(DyadicRational::pow2(v)),
        None => Measure::Certified(interval::pow2_sum(s, precision.max(64))),
    }
}

/// `|b| = 2^{Σ e_i}`; exact when the exponents sum to an integer.
pub fn box_volume(b: &AnchoredBox, precision: u32) -> Measure {
    pow2_measure(&b.log2_volume(), precision)
}

/// Per-axis minimum; anchored boxes are closed under intersection.
pub fn intersect_anchored(a: &AnchoredBox, b: &AnchoredBox) -> Result<AnchoredBox> {
    check_dim(a.dim(), b.dim())?;
    Ok(AnchoredBox {
        exps: a
            .exps
            .iter()
            .zip(&b.exps)
            .map(|(x, y)| {
                if compare_exponents(x, y) == Ordering::Greater {
                    *y
                } else {
                    *x
                }
            })
            .collect(),
    })
}

/// Whether `b ⊇ [0, 2^{-k})^d`.
pub fn contains_cube(b: &AnchoredBox, k: u32) -> bool {
    let floor = RootExponent::int(-(k as i64));
    b.exps.iter().all(|e| compare_exponents(e, &floor) != Ordering::Less)
}
