//! The two counterexample bases.
//!
//! * [`theorem1`]: every dyadic shape in `Z^d` is reached on the antidiagonal
//!   of monotone shape functions of two integer parameters.
//! * [`theorem2`]: the basis driven by the zero-sum tuple sequence
//!   [`beta::BetaSequence`] and the map `τ(s) = s^{d-2}·sign(s)`, whose
//!   unit-volume members defeat the weak-type `L log L^α` estimate for
//!   `α < d − 2`.

pub mod beta;
pub mod bijection;
pub mod theorem1;
pub mod theorem2;

pub use beta::{beta_index_find, BetaIndex, BetaSequence};
pub use bijection::LatticeBijection;
pub use theorem1::{lift_extension, theorem1_basis, theorem1_basis_with, CoverageReport, ZygmundBasisSpec};
pub use theorem2::{
    auto_cd, is_e_prime, tau, tau_inverse, theorem2_family, theorem2_family_auto, FamilyMember, Theorem2Basis,
    Theorem2Family,
};
