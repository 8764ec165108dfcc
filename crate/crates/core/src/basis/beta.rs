//! The zero-sum tuple sequence.
//!
//! Shell `n` lists every `(m_1, …, m_{d-2}) ∈ Z^{d-2}` with `Σ m = 0` and
//! `0 <= m_j <= n` for `j <= d − 3`, lexicographically in the free
//! coordinates; the last coordinate is minus the sum of the others. The
//! concatenation of shells `0, 1, 2, …` is the one-index sequence `β_m`.
//! Shell `n` has `(n+1)^{d-3}` tuples and starts at index
//! `Σ_{t=1}^{n} t^{d-3}`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BetaSequence {
    dim: u32,
}

impl BetaSequence {
    /// # Errors
    /// `InvalidParameter` for `d < 4`.
    pub fn new(dim: u32) -> Result<Self> {
        if dim < 4 {
            return Err(Error::InvalidParameter(format!(
                "beta sequence needs d >= 4, got {dim}"
            )));
        }
        Ok(BetaSequence { dim })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Length `d − 2` of each tuple.
    pub fn tuple_len(&self) -> usize {
        self.dim as usize - 2
    }

    fn free(&self) -> u32 {
        self.dim - 3
    }

    pub fn shell_size(&self, n: u64) -> Result<u128> {
        (n as u128 + 1)
            .checked_pow(self.free())
            .ok_or_else(|| Error::Overflow(format!("shell size {n}")))
    }

    /// Concatenated index of the first element of shell `n`.
    pub fn shell_start(&self, n: u64) -> Result<u128> {
        let mut acc = 0u128;
        for t in 1..=n as u128 {
            let term = t
                .checked_pow(self.free())
                .ok_or_else(|| Error::Overflow(format!("shell start {n}")))?;
            acc = acc
                .checked_add(term)
                .ok_or_else(|| Error::Overflow(format!("shell start {n}")))?;
        }
        Ok(acc)
    }

    /// Element `pos` of shell `n`.
    pub fn element(&self, n: u64, pos: u128) -> Vec<i64> {
        let base = n as u128 + 1;
        let mut digits = vec![0i64; self.free() as usize];
        let mut p = pos;
        for d in digits.iter_mut().rev() {
            *d = (p % base) as i64;
            p /= base;
        }
        let sum: i64 = digits.iter().sum();
        digits.push(-sum);
        digits
    }

    /// Position of a tuple inside shell `n`, if it belongs to it.
    pub fn position_in_shell(&self, tuple: &[i64], n: u64) -> Option<u128> {
        let free = &tuple[..self.free() as usize];
        if free.iter().any(|&m| m < 0 || m as u64 > n) {
            return None;
        }
        let base = n as u128 + 1;
        Some(free.iter().fold(0u128, |acc, &m| acc * base + m as u128))
    }

    pub fn shell(&self, n: u64) -> Result<Vec<Vec<i64>>> {
        let size = self.shell_size(n)?;
        Ok((0..size).map(|p| self.element(n, p)).collect())
    }

    /// `β_m`.
    pub fn concat(&self, m: u128) -> Result<Vec<i64>> {
        // Shells grow like n^{d-3}; walk forward from an underestimate.
        let mut n = 0u64;
        let mut start = 0u128;
        loop {
            let size = self.shell_size(n)?;
            if m < start + size {
                return Ok(self.element(n, m - start));
            }
            start += size;
            n += 1;
        }
    }

    /// Validates the zero-sum and nonnegativity constraints.
    pub fn validate(&self, tuple: &[i64]) -> Result<()> {
        if tuple.len() != self.tuple_len() {
            return Err(Error::DimensionMismatch {
                expected: self.tuple_len(),
                found: tuple.len(),
            });
        }
        let free = &tuple[..self.free() as usize];
        if free.iter().any(|&m| m < 0) || tuple.iter().sum::<i64>() != 0 {
            return Err(Error::InvalidParameter(format!(
                "{tuple:?} is not a zero-sum tuple with nonnegative leading entries"
            )));
        }
        Ok(())
    }

    /// Concatenated indices of every occurrence of `tuple` that are `<= upper`.
    pub fn occurrences_up_to(&self, tuple: &[i64], upper: u128) -> Result<Vec<u128>> {
        self.validate(tuple)?;
        let first_shell = tuple[..self.free() as usize].iter().copied().max().unwrap_or(0) as u64;
        let mut out = Vec::new();
        let mut start = self.shell_start(first_shell)?;
        let mut n = first_shell;
        loop {
            let pos = self.position_in_shell(tuple, n).expect("tuple fits shell");
            let idx = start + pos;
            if idx > upper {
                break;
            }
            out.push(idx);
            start += self.shell_size(n)?;
            n += 1;
        }
        Ok(out)
    }
}

/// Admissible concatenated indices of a tuple at scale `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaIndex {
    /// Smallest admissible index.
    pub n: u128,
    pub admissible: Vec<u128>,
    /// Lower bound is `(j−1)^{d−2} / C_d`, stored as its numerator.
    pub lower_numerator: u128,
    pub cd: u64,
    pub upper: u128,
}

/// Finds `n` with `β_n = tuple` and `C_d^{-1}(j−1)^{d−2} <= n <= j^{d−2}`.
///
/// # Errors
/// `NotFound` if no occurrence lies within the bounds; `InvalidParameter`
/// for `C_d <= 1`, `j == 0`, or a malformed tuple.
pub fn beta_index_find(seq: &BetaSequence, tuple: &[i64], j: u64, cd: u64) -> Result<BetaIndex> {
    if cd <= 1 {
        return Err(Error::InvalidParameter(format!("C_d must exceed 1, got {cd}")));
    }
    if j == 0 {
        return Err(Error::InvalidParameter("scale j must be at least 1".into()));
    }
    let e = seq.dim() - 2;
    let overflow = || Error::Overflow(format!("index bounds at j = {j}"));
    let upper = (j as u128).checked_pow(e).ok_or_else(overflow)?;
    let lower_numerator = ((j - 1) as u128).checked_pow(e).ok_or_else(overflow)?;
    let admissible: Vec<u128> = seq
        .occurrences_up_to(tuple, upper)?
        .into_iter()
        .filter(|&n| n * cd as u128 >= lower_numerator)
        .collect();
    match admissible.first() {
        Some(&n) => Ok(BetaIndex {
            n,
            admissible,
            lower_numerator,
            cd,
            upper,
        }),
        None => Err(Error::NotFound {
            tuple: tuple.to_vec(),
            j,
            cd,
            lower: format!("{lower_numerator}/{cd}"),
            upper,
        }),
    }
}
