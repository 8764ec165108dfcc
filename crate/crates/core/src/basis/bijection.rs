//! An explicit bijection `ψ: Z → Z^d`.
//!
//! `Z` is folded onto `N` by the zigzag `0, 1, -1, 2, -2, …`; `N` then walks
//! `Z^d` shell by shell in the max norm, lexicographically inside each shell.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeBijection {
    dim: u32,
}

/// `0, 1, -1, 2, -2, …` ↦ `0, 1, 2, 3, 4, …`
pub fn zigzag(m: i64) -> u128 {
    if m > 0 {
        2 * m as u128 - 1
    } else {
        2 * (-(m as i128)) as u128
    }
}

pub fn unzigzag(t: u128) -> i64 {
    if t % 2 == 1 {
        t.div_ceil(2) as i64
    } else {
        -((t / 2) as i64)
    }
}

impl LatticeBijection {
    pub fn new(dim: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("lattice dimension must be at least 1".into()));
        }
        Ok(LatticeBijection { dim })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    fn pow(&self, base: u128, e: u32) -> Result<u128> {
        base.checked_pow(e)
            .ok_or_else(|| Error::Overflow(format!("{base}^{e}")))
    }

    /// Number of lattice points with max norm `< s`.
    fn below_shell(&self, s: u128) -> Result<u128> {
        if s == 0 {
            Ok(0)
        } else {
            self.pow(2 * s - 1, self.dim)
        }
    }

    /// Completions of a prefix to a point of max norm exactly `s`, with
    /// `rem` free coordinates left.
    fn completions(&self, s: u128, rem: u32, hit: bool) -> Result<u128> {
        let all = self.pow(2 * s + 1, rem)?;
        if hit {
            Ok(all)
        } else if s == 0 {
            Ok(0)
        } else {
            Ok(all - self.pow(2 * s - 1, rem)?)
        }
    }

    /// The `t`-th lattice point in shell-lexicographic order.
    pub fn unrank(&self, t: u128) -> Result<Vec<i64>> {
        let mut s = 0u128;
        while self.below_shell(s + 1)? <= t {
            s += 1;
        }
        let mut pos = t - self.below_shell(s)?;
        let mut point = Vec::with_capacity(self.dim as usize);
        let mut hit = s == 0;
        let si = s as i64;
        for i in 0..self.dim {
            let rem = self.dim - i - 1;
            let mut chosen = None;
            for v in -si..=si {
                let h = hit || v.unsigned_abs() as u128 == s;
                let c = self.completions(s, rem, h)?;
                if pos < c {
                    chosen = Some((v, h));
                    break;
                }
                pos -= c;
            }
            let (v, h) = chosen.expect("position lies inside the shell");
            point.push(v);
            hit = h;
        }
        Ok(point)
    }

    /// Inverse of [`LatticeBijection::unrank`].
    pub fn rank(&self, point: &[i64]) -> Result<u128> {
        if point.len() != self.dim as usize {
            return Err(Error::DimensionMismatch {
                expected: self.dim as usize,
                found: point.len(),
            });
        }
        let s = point.iter().map(|x| x.unsigned_abs() as u128).max().unwrap_or(0);
        let si = s as i64;
        let mut pos = 0u128;
        let mut hit = s == 0;
        for (i, &x) in point.iter().enumerate() {
            let rem = self.dim - i as u32 - 1;
            for v in -si..x {
                let h = hit || v.unsigned_abs() as u128 == s;
                pos += self.completions(s, rem, h)?;
            }
            hit = hit || x.unsigned_abs() as u128 == s;
        }
        Ok(self.below_shell(s)? + pos)
    }

    /// `ψ(m)`.
    pub fn eval(&self, m: i64) -> Result<Vec<i64>> {
        self.unrank(zigzag(m))
    }

    /// `ψ^{-1}(point)`.
    pub fn index_of(&self, point: &[i64]) -> Result<i64> {
        Ok(unzigzag(self.rank(point)?))
    }
}
