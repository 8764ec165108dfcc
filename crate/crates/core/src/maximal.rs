//! Test functions `f_k = 2^{dk}·1_{[0,2^{-k})^d}`, their box averages, the
//! restricted maximal operator and the Orlicz side of the weak-type bound.

use std::cmp::Ordering;

use serde::Serialize;

use crate::boxes::{pow2_measure, AnchoredBox, Measure};
use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::exponent::{compare_exponents, ExponentSum, RootExponent};
use crate::interval::{self, Interval};
use crate::measure::{union_volume, MeasureMode, UnionMeasureResult};

/// Precision ceiling when deciding `average >= λ` by refinement.
const MAX_REFINE_BITS: u32 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TestFunction {
    pub d: usize,
    pub k: u32,
}

impl TestFunction {
    pub fn new(d: usize, k: u32) -> Self {
        TestFunction { d, k }
    }

    /// The support `[0, 2^{-k})^d`.
    pub fn support(&self) -> AnchoredBox {
        AnchoredBox::cube(self.d, -(self.k as i64))
    }

    /// `log2` of the height `2^{dk}`.
    pub fn log2_height(&self) -> i64 {
        self.d as i64 * self.k as i64
    }

    pub fn eval(&self, x: &[DyadicRational]) -> Result<DyadicRational> {
        Ok(if self.support().contains_point(x)? {
            DyadicRational::pow2(self.log2_height())
        } else {
            DyadicRational::from_i64(0)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakTypeConfig {
    pub alpha: f64,
    /// The level `λ` in `|{Mf >= λ}|`.
    pub lambda: f64,
}

impl WeakTypeConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(WeakTypeConfig { alpha, lambda: 1.0 })
    }
}

fn check_dim(b: &AnchoredBox, f: &TestFunction) -> Result<()> {
    if b.dim() != f.d {
        return Err(Error::DimensionMismatch {
            expected: f.d,
            found: b.dim(),
        });
    }
    Ok(())
}

/// `log2` of `(1/|R|) ∫_R f_k = 2^{dk}·|R ∩ [0,2^{-k})^d| / |R|`.
pub fn log2_average(b: &AnchoredBox, f: &TestFunction) -> Result<ExponentSum> {
    check_dim(b, f)?;
    let floor = RootExponent::int(-(f.k as i64));
    let mut s = ExponentSum::new();
    for e in b.exps() {
        // Axis factor 2^{min(e, -k) - e + k}.
        if compare_exponents(e, &floor) == Ordering::Less {
            s.add_int(f.k as i64);
        } else {
            s.add_scaled(e, -1);
        }
    }
    Ok(s)
}

/// Average of `f` over `b`; exact when the exponents of `b` above `-k`
/// sum to an integer.
pub fn average_over_box(b: &AnchoredBox, f: &TestFunction, precision: u32) -> Result<Measure> {
    Ok(pow2_measure(&log2_average(b, f)?, precision))
}

/// Decides `average_over_box(b, f) >= λ` for dyadic `λ > 0`, refining the
/// enclosure until it separates from `λ`.
pub fn average_at_least(b: &AnchoredBox, f: &TestFunction, lambda: &DyadicRational) -> Result<bool> {
    if !lambda.is_positive() {
        return Ok(true);
    }
    let s = log2_average(b, f)?;
    if let Some(v) = s.as_integer() {
        return Ok(DyadicRational::pow2(v) >= *lambda);
    }
    // An irrational exponent never lands on a dyadic level.
    let mut bits = 128;
    while bits <= MAX_REFINE_BITS {
        match interval::pow2_sum(&s, bits).cmp_dyadic(lambda) {
            Some(Ordering::Less) => return Ok(false),
            Some(_) => return Ok(true),
            None => bits *= 2,
        }
    }
    Err(Error::Undecided(MAX_REFINE_BITS))
}

/// `Mf(x)` over a finite family: the largest average of `f` over a box
/// containing `x`, or 0.
pub fn maximal_eval(x: &[DyadicRational], family: &[AnchoredBox], f: &TestFunction, precision: u32) -> Result<Measure> {
    let mut best = Measure::Exact(DyadicRational::from_i64(0));
    for b in family {
        if b.contains_point(x)? {
            best = best.max(&average_over_box(b, f, precision)?);
        }
    }
    Ok(best)
}

/// `|∪ {R : avg_R f >= λ}|`, a lower bound for `|{Mf >= λ}|`.
pub fn superlevel_lower_bound(
    family: &[AnchoredBox],
    f: &TestFunction,
    lambda: &DyadicRational,
    mode: MeasureMode,
    precision: u32,
) -> Result<UnionMeasureResult> {
    let mut survivors = Vec::with_capacity(family.len());
    for b in family {
        if average_at_least(b, f, lambda)? {
            survivors.push(b.clone());
        }
    }
    union_volume(&survivors, mode, precision)
}

/// `∫ f log(e + f)^α = log(e + 2^{dk})^α`, natural logarithm.
pub fn orlicz_rhs(f: &TestFunction, alpha: f64, precision: u32) -> Result<Interval> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(Interval::point(DyadicRational::from_i64(1), precision));
    }
    let height = Interval::point(DyadicRational::pow2(f.log2_height()), precision);
    let arg = &interval::e_const(precision) + &height;
    let log = arg.ln().expect("e + 2^{dk} > 0");
    log.pow_f64(alpha)
        .map(|v| v.with_precision(precision))
        .ok_or_else(|| Error::InvalidParameter(format!("alpha {alpha} is not representable")))
}
