//! Dyadic bases with monotone shape functions and their maximal operators.
//!
//! The crate builds the monotone shape functions and interval bases, measures
//! unions of origin-anchored dyadic boxes exactly or with certified error
//! bounds, and evaluates the restricted maximal operator on the test functions
//! `f_k = 2^{dk}·1_{[0,2^{-k})^d}`.
//!
//! Measure computations are generic over [`MeasureScalar`]; the aliases below
//! name the instantiations used throughout.

pub mod basis;
pub mod boxes;
pub mod dyadic;
pub mod error;
pub mod experiment;
pub mod exponent;
pub mod extension;
pub mod interval;
pub mod maximal;
pub mod measure;
pub mod scalar;
pub mod softfloat;

pub use boxes::{box_volume, contains_cube, intersect_anchored, AnchoredBox, Measure};
pub use dyadic::DyadicRational;
pub use error::{Error, Result};
pub use exponent::{compare_exponents, ExponentSum, ExponentVec, RootExponent};
pub use extension::{MonotoneExtension, SeedFunction};
pub use interval::Interval;
pub use scalar::MeasureScalar;
pub use softfloat::Interval128;

/// Exact volumes of boxes with integer exponents.
pub type ExactScalar = DyadicRational;
/// Independent exact rationals, used by the inclusion–exclusion oracle.
pub type RationalScalar = num_rational::BigRational;
/// Certified enclosures with directed rounding.
pub type CertifiedScalar = Interval;
/// Fast certified enclosures of nonnegative reals.
pub type FastCertifiedScalar = Interval128;
/// Fast unchecked floating point.
pub type FloatScalar = f64;
