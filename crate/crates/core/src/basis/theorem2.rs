//! The interval basis driven by the zero-sum tuple sequence.
//!
//! Seeds are `φ_i(m) = π_i(β_m)` for `m >= 0` and `0` for `m < 0`. A member
//! of the basis has side exponents `(s, t, Φ_1(τ(s), τ(t)), …)` with
//! `s, t ∈ τ^{-1}(Z)`, where `τ(s) = s^{d-2}·sign(s)`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::beta::{beta_index_find, BetaSequence};
use crate::boxes::AnchoredBox;
use crate::error::{Error, Result};
use crate::exponent::{compare_exponents, RootExponent};
use crate::extension::{MonotoneExtension, OutOfWindow, SeedFunction};

/// `τ(s) = s^{d-2}·sign(s)` when it is an integer.
pub fn tau(d: u32, s: &RootExponent) -> Option<i64> {
    let e = d.checked_sub(2)?;
    if e == 0 {
        return Some(s.signum());
    }
    if e % s.root() != 0 {
        return None;
    }
    let mag = s.radicand().unsigned_abs().checked_pow(e / s.root())?;
    i64::try_from(mag).ok().map(|m| m * s.signum())
}

/// `τ^{-1}(n) = sign(n)·|n|^{1/(d-2)}`.
///
/// # Errors
/// `InvalidParameter` for `d < 3`.
pub fn tau_inverse(d: u32, n: i64) -> Result<RootExponent> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("tau needs d >= 3, got {d}")));
    }
    RootExponent::new(n, d - 2)
}

/// Whether `|π_1(R)|·|π_2(R)| = 1`, i.e. the first two exponents cancel.
pub fn is_e_prime(shape: &[RootExponent]) -> bool {
    shape.len() >= 2 && compare_exponents(&-shape[0], &shape[1]).is_eq()
}

/// Shape functions of the basis, with seeds stored on `[0, M]`.
#[derive(Clone, Debug)]
pub struct Theorem2Basis {
    seq: BetaSequence,
    window: i64,
    shapes: Vec<MonotoneExtension>,
}

impl Theorem2Basis {
    /// # Errors
    /// `InvalidParameter` for `d < 4` or a negative window.
    pub fn new(d: u32, window: i64) -> Result<Self> {
        let seq = BetaSequence::new(d)?;
        if window < 0 {
            return Err(Error::InvalidParameter(format!("window must be >= 0, got {window}")));
        }
        let betas: Vec<Vec<i64>> = (0..=window as u128).map(|m| seq.concat(m)).collect::<Result<_>>()?;
        let shapes = (0..seq.tuple_len())
            .map(|i| {
                MonotoneExtension::new(
                    SeedFunction::new(0, betas.iter().map(|b| b[i]).collect()).with_below(OutOfWindow::Constant(0)),
                )
            })
            .collect();
        Ok(Theorem2Basis { seq, window, shapes })
    }

    pub fn dim(&self) -> u32 {
        self.seq.dim()
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn shapes(&self) -> &[MonotoneExtension] {
        &self.shapes
    }

    /// `(Φ_1(a, b), …, Φ_{d-2}(a, b))`.
    ///
    /// # Errors
    /// `WindowExceeded` if the evaluation reads seeds beyond `M`.
    pub fn shape_at(&self, a: i64, b: i64) -> Result<Vec<i64>> {
        let (lo, hi) = (a.min(-b), a.max(-b));
        if hi > self.window {
            return Err(Error::WindowExceeded {
                lo,
                hi,
                window_lo: 0,
                window_hi: self.window,
            });
        }
        Ok(self.shapes.iter().map(|s| s.eval(a, b)).collect())
    }

    /// Side exponents `(s, t, Φ_1(τ(s), τ(t)), …, Φ_{d-2}(τ(s), τ(t)))`.
    ///
    /// # Errors
    /// `InvalidParameter` if `τ(s)` or `τ(t)` is not an integer;
    /// `WindowExceeded` as for [`Theorem2Basis::shape_at`].
    pub fn basis_a_interval(&self, s: &RootExponent, t: &RootExponent) -> Result<Vec<RootExponent>> {
        let d = self.dim();
        let not_int = |x: &RootExponent| Error::InvalidParameter(format!("tau({x}) is not an integer for d = {d}"));
        let a = tau(d, s).ok_or_else(|| not_int(s))?;
        let b = tau(d, t).ok_or_else(|| not_int(t))?;
        let mut out = vec![*s, *t];
        out.extend(self.shape_at(a, b)?.into_iter().map(RootExponent::int));
        Ok(out)
    }
}

/// One box of the family together with the data that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyMember {
    /// Concatenated β index; the first two exponents are `±τ^{-1}(n)`.
    pub n: u128,
    pub tuple: Vec<i64>,
    /// Smallest scale `j` that emitted this box.
    pub j: u64,
}

impl FamilyMember {
    pub fn to_box(&self, d: u32) -> Result<AnchoredBox> {
        let n = i64::try_from(self.n).map_err(|_| Error::Overflow(format!("index {}", self.n)))?;
        let s = tau_inverse(d, n)?;
        let mut exps = vec![s, -s];
        exps.extend(self.tuple.iter().map(|&m| RootExponent::int(m)));
        AnchoredBox::new(exps)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Family {
    pub d: u32,
    pub k: u64,
    pub cd: u64,
    /// Sorted by `(n, tuple)`, without duplicates.
    pub members: Vec<FamilyMember>,
}

impl Theorem2Family {
    pub fn boxes(&self) -> Result<Vec<AnchoredBox>> {
        self.members.iter().map(|m| m.to_box(self.d)).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Every tuple with free coordinates in `[0, c]` and zero sum, lexicographically.
fn scale_tuples(free: usize, c: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; free];
    loop {
        let mut t = cur.clone();
        t.push(-cur.iter().sum::<i64>());
        out.push(t);
        let mut i = free;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < c {
                cur[i] += 1;
                cur[i + 1..].iter_mut().for_each(|x| *x = 0);
                break;
            }
        }
    }
}

/// Boxes `[0, 2^{τ^{-1}(n)}) × [0, 2^{-τ^{-1}(n)}) × R̄` for `j = 1..=k`,
/// where `R̄` has exponents `m` with `0 <= m_i <= ⌊j/C_d⌋` (`i <= d − 3`) and
/// `Σ m = 0`, and `n` is the smallest admissible index with `β_n = m`.
///
/// # Errors
/// `InvalidParameter` for `d < 4`, `k < 1`, or `C_d < d − 3`; `NotFound`
/// if `C_d` is too small for some scale.
pub fn theorem2_family(d: u32, k: u64, cd: u64) -> Result<Theorem2Family> {
    let seq = BetaSequence::new(d)?;
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if cd < u64::from(d - 3).max(2) {
        return Err(Error::InvalidParameter(format!(
            "C_d must be at least max(d - 3, 2) = {}, got {cd}",
            u64::from(d - 3).max(2)
        )));
    }
    let free = seq.tuple_len() - 1;
    let mut found: BTreeMap<(u128, Vec<i64>), u64> = BTreeMap::new();
    for j in 1..=k {
        let c = (j / cd) as i64;
        for tuple in scale_tuples(free, c) {
            let idx = beta_index_find(&seq, &tuple, j, cd)?;
            found.entry((idx.n, tuple)).or_insert(j);
        }
    }
    let members = found
        .into_iter()
        .map(|((n, tuple), j)| FamilyMember { n, tuple, j })
        .collect();
    Ok(Theorem2Family { d, k, cd, members })
}

/// Smallest integer `C_d >= max(d − 3, 2)` for which every index lookup up to
/// scale `k` succeeds.
///
/// # Errors
/// `NotFound` when no constant up to `64·d` works.
pub fn auto_cd(d: u32, k: u64) -> Result<u64> {
    let start = u64::from(d.saturating_sub(3)).max(2);
    let mut last = None;
    for cd in start..=64 * u64::from(d) {
        match theorem2_family(d, k, cd) {
            Ok(_) => return Ok(cd),
            Err(e @ Error::NotFound { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::InvalidParameter(format!("no C_d for d = {d}"))))
}

/// [`theorem2_family`] with `C_d` chosen by [`auto_cd`].
pub fn theorem2_family_auto(d: u32, k: u64) -> Result<Theorem2Family> {
    let cd = auto_cd(d, k)?;
    theorem2_family(d, k, cd)
}
