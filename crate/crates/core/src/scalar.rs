//! Scalar types the measure computations are generic over.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Sub};

use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::exponent::RootExponent;
use crate::interval::{self, Interval};

/// A ring of reals in which side lengths `2^e` can be represented.
///
/// Exact scalars reject irrational exponents with [`Error::MixedMode`];
/// approximate scalars accept everything.
pub trait MeasureScalar: Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    /// `2^e`, computed with `precision` mantissa bits where that applies.
    fn pow2(e: &RootExponent, precision: u32) -> Result<Self>;

    fn approx_f64(&self) -> f64;
}

impl MeasureScalar for DyadicRational {
    fn pow2(e: &RootExponent, _precision: u32) -> Result<Self> {
        e.as_integer()
            .map(DyadicRational::pow2)
            .ok_or_else(|| Error::MixedMode(e.to_string()))
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64()
    }
}

impl MeasureScalar for BigRational {
    fn pow2(e: &RootExponent, _precision: u32) -> Result<Self> {
        let v = e.as_integer().ok_or_else(|| Error::MixedMode(e.to_string()))?;
        let p = BigInt::one() << (v.unsigned_abs() as usize);
        Ok(if v >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        })
    }

    fn approx_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl MeasureScalar for Interval {
    fn pow2(e: &RootExponent, precision: u32) -> Result<Self> {
        Ok(interval::pow2_root(e, precision))
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64()
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl MeasureScalar for $t {
            fn pow2(e: &RootExponent, _precision: u32) -> Result<Self> {
                Ok((2.0 as $t).powf(e.to_f64() as $t))
            }

            fn approx_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}
float_scalar!(f32);
float_scalar!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_scalars_reject_roots() {
        let r = RootExponent::new(2, 2).unwrap();
        assert!(<DyadicRational as MeasureScalar>::pow2(&r, 64).is_err());
        assert!(<BigRational as MeasureScalar>::pow2(&r, 64).is_err());
        let v = <BigRational as MeasureScalar>::pow2(&RootExponent::int(-3), 64).unwrap();
        assert_eq!(v, BigRational::new(1.into(), 8.into()));
        assert!(!<f64 as MeasureScalar>::pow2(&r, 0).unwrap().is_zero());
    }
}
