//! Monotone shape functions whose antidiagonal reaches every dyadic shape.
//!
//! Each coordinate `ψ_i` of the lattice bijection is used as a seed and
//! extended to `Φ_i: Z² → Z`. On the antidiagonal `Φ_i(m, -m) = ψ_i(m)`, so
//! `m ↦ (Φ_1(m,-m), …, Φ_d(m,-m))` is onto `Z^d`.

use std::collections::HashSet;

use serde::Serialize;

use super::bijection::{unzigzag, LatticeBijection};
use crate::error::{Error, Result};
use crate::extension::{MonotoneExtension, SeedFunction};

/// Shape functions `Ψ_i: Z^k → Z`, each depending on the first two variables.
#[derive(Clone, Debug)]
pub struct ZygmundBasisSpec {
    dim: usize,
    arity: usize,
    shapes: Vec<MonotoneExtension>,
}

impl ZygmundBasisSpec {
    /// # Errors
    /// `InvalidParameter` when there are no shapes or `arity < 2`.
    pub fn new(shapes: Vec<MonotoneExtension>, arity: usize) -> Result<Self> {
        if shapes.is_empty() || arity < 2 {
            return Err(Error::InvalidParameter("need at least one shape and arity >= 2".into()));
        }
        Ok(ZygmundBasisSpec {
            dim: shapes.len(),
            arity,
            shapes,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn shapes(&self) -> &[MonotoneExtension] {
        &self.shapes
    }

    /// Exponent vector `(Ψ_1(m), …, Ψ_d(m))`.
    pub fn eval(&self, m: &[i64]) -> Result<Vec<i64>> {
        if m.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                found: m.len(),
            });
        }
        Ok(self.shapes.iter().map(|s| s.eval(m[0], m[1])).collect())
    }
}

/// `Ψ_i(m_1, …, m_k) = Φ_i(m_1, m_2)`.
///
/// # Errors
/// `InvalidParameter` for `k < 2`.
pub fn lift_extension(spec: &ZygmundBasisSpec, k: usize) -> Result<ZygmundBasisSpec> {
    ZygmundBasisSpec::new(spec.shapes.clone(), k)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub dim: u32,
    pub window: i64,
    /// Seed indices `m` range over `[index_lo, index_hi]`.
    pub index_lo: i64,
    pub index_hi: i64,
    pub targets: u64,
    pub attained: u64,
    pub missing: Vec<Vec<i64>>,
    /// Targets whose shape at `ψ^{-1}(v)` differs from `v`.
    pub antidiagonal_mismatches: Vec<Vec<i64>>,
    pub monotone_window: i64,
    pub monotone_checked: u64,
    pub monotone_ok: bool,
    pub ok: bool,
}

/// Builds the shapes from `ψ` on the seed window that enumerates
/// `[-N, N]^d`, then checks coverage and monotonicity.
///
/// # Errors
/// `InvalidParameter` for `d < 2` or `N < 1`; `Coverage` if some target
/// in `[-N, N]^d` is missed.
pub fn theorem1_basis(d: u32, n: i64) -> Result<(ZygmundBasisSpec, CoverageReport)> {
    theorem1_basis_with(d, n, None)
}

/// As [`theorem1_basis`], with an explicit monotonicity window.
pub fn theorem1_basis_with(d: u32, n: i64, monotone_window: Option<i64>) -> Result<(ZygmundBasisSpec, CoverageReport)> {
    if d < 2 || n < 1 {
        return Err(Error::InvalidParameter(format!(
            "need d >= 2 and N >= 1, got d = {d}, N = {n}"
        )));
    }
    let psi = LatticeBijection::new(d)?;
    let count = (2 * n as u128 + 1)
        .checked_pow(d)
        .ok_or_else(|| Error::Overflow(format!("(2N+1)^d for N = {n}, d = {d}")))?;
    // Zigzag indices 0..count cover exactly the integers in [lo, hi].
    let last = count - 1;
    let lo = unzigzag(last - last % 2);
    let hi = unzigzag(last - (last + 1) % 2);
    let points: Vec<Vec<i64>> = (lo..=hi).map(|m| psi.eval(m)).collect::<Result<_>>()?;
    let shapes: Vec<MonotoneExtension> = (0..d as usize)
        .map(|i| MonotoneExtension::new(SeedFunction::new(lo, points.iter().map(|p| p[i]).collect())))
        .collect();
    let spec = ZygmundBasisSpec::new(shapes, 2)?;

    let mut seen = HashSet::new();
    for m in lo..=hi {
        seen.insert(spec.eval(&[m, -m])?);
    }
    let mut missing = Vec::new();
    let mut mismatches = Vec::new();
    let mut targets = 0u64;
    let side = 2 * n + 1;
    for t in 0..count {
        let mut v = Vec::with_capacity(d as usize);
        let mut r = t;
        for _ in 0..d {
            v.push((r % side as u128) as i64 - n);
            r /= side as u128;
        }
        v.reverse();
        targets += 1;
        if !seen.contains(&v) {
            missing.push(v.clone());
        }
        let m = psi.index_of(&v)?;
        if spec.eval(&[m, -m])? != v {
            mismatches.push(v);
        }
    }
    let w = monotone_window.unwrap_or_else(|| lo.abs().max(hi.abs()));
    let mut monotone_ok = true;
    let mut monotone_checked = 0;
    for s in spec.shapes() {
        let r = s.verify_monotone(w);
        monotone_checked += r.checked;
        monotone_ok &= r.ok;
    }
    let ok = missing.is_empty() && mismatches.is_empty() && monotone_ok;
    let report = CoverageReport {
        dim: d,
        window: n,
        index_lo: lo,
        index_hi: hi,
        targets,
        attained: targets - missing.len() as u64,
        missing,
        antidiagonal_mismatches: mismatches,
        monotone_window: w,
        monotone_checked,
        monotone_ok,
        ok,
    };
    if !report.missing.is_empty() {
        return Err(Error::Coverage(format!(
            "{} of {} targets missed, first {:?}",
            report.missing.len(),
            report.targets,
            report.missing[0]
        )));
    }
    Ok((spec, report))
}

#[cfg(test)]
mod tests {
    use super::super::bijection::zigzag;
    use super::*;

    #[test]
    fn seed_window_is_the_zigzag_prefix() {
        let (_, r) = theorem1_basis(3, 2).unwrap();
        let idx: Vec<u128> = (r.index_lo..=r.index_hi).map(zigzag).collect();
        let mut sorted = idx.clone();
        sorted.sort();
        assert_eq!(sorted, (0..125).collect::<Vec<_>>());
    }

    #[test]
    fn d3_n2_covers_all_targets() {
        let (_, r) = theorem1_basis(3, 2).unwrap();
        assert_eq!((r.targets, r.attained), (125, 125));
        assert!(r.ok && r.monotone_ok);
        assert!(r.antidiagonal_mismatches.is_empty());
    }

    #[test]
    fn d2_n1_covers_all_targets() {
        let (spec, r) = theorem1_basis(2, 1).unwrap();
        assert_eq!((r.targets, r.attained), (9, 9));
        // Brute force: every target appears somewhere on the antidiagonal.
        for a in -1..=1 {
            for b in -1..=1 {
                assert!((-20..=20).any(|m| spec.eval(&[m, -m]).unwrap() == vec![a, b]));
            }
        }
    }

    #[test]
    fn lift_ignores_extra_variables() {
        let (spec, _) = theorem1_basis(2, 1).unwrap();
        let same = lift_extension(&spec, 2).unwrap();
        assert_eq!(same.eval(&[3, -1]).unwrap(), spec.eval(&[3, -1]).unwrap());
        let lifted = lift_extension(&spec, 4).unwrap();
        for (a, b, c, e) in [(1, 2, 7, -9), (-3, 0, 0, 5), (2, -2, -40, 40)] {
            assert_eq!(lifted.eval(&[a, b, c, e]).unwrap(), spec.eval(&[a, b]).unwrap());
            assert_eq!(
                lifted.eval(&[a, b, c + 1, e]).unwrap(),
                lifted.eval(&[a, b, c, e]).unwrap()
            );
        }
        assert!(lifted.eval(&[1, 2]).is_err());
        assert!(lift_extension(&spec, 1).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(theorem1_basis(1, 2).is_err());
        assert!(theorem1_basis(3, 0).is_err());
    }
}
