//! Lebesgue measure of unions of origin-anchored boxes.
//!
//! Boxes are compressed to per-axis ranks. One axis `p` is swept downward:
//! once boxes are inserted in non-increasing order of their `p` side, each
//! new box `R` contributes `|R_p|` times the volume of its projection that
//! is not yet covered. That projection is split by the remaining "level"
//! axes into cells; inside a cell the covered set is a 2D staircase on two
//! axes `u`, `v`, kept incrementally. The same sweep yields the greedy
//! witness sets `E(R_i) = R_i \ ∪_{l<i} R_l`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::boxes::{check_dim, intersect_anchored, le_pow2, lt_pow2, AnchoredBox, Measure};
use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::exponent::RootExponent;
use crate::interval::Interval;
use crate::scalar::MeasureScalar;
use crate::softfloat::Interval128;

const MAX_LEVELS: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureMode {
    Exact,
    Certified,
}

impl fmt::Display for MeasureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureMode::Exact => "exact",
            MeasureMode::Certified => "certified",
        })
    }
}

impl FromStr for MeasureMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MeasureMode::Exact),
            "certified" => Ok(MeasureMode::Certified),
            other => Err(Error::Config(format!("unknown measure mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnionMeasureResult {
    pub value: Measure,
    /// Bound on `|value.to_f64() − true measure|`; zero in exact mode.
    pub error_bound: f64,
    pub mode: MeasureMode,
    /// Distinct boxes after removing duplicates.
    pub boxes: usize,
}

impl UnionMeasureResult {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Boxes in rank space with per-axis tables of `2^e`.
struct Ranked<S> {
    dim: usize,
    /// `vals[a][r]` for rank `r >= 1`; `vals[a][0] = 0`.
    vals: Vec<Vec<S>>,
    ranks: Vec<Vec<u32>>,
}

impl<S: MeasureScalar> Ranked<S> {
    /// Pads to at least three axes with unit sides.
    fn build(boxes: &[AnchoredBox], precision: u32) -> Result<Self> {
        let d = boxes.first().map_or(1, AnchoredBox::dim);
        for b in boxes {
            check_dim(d, b.dim())?;
        }
        let dim = d.max(3);
        let mut vals = Vec::with_capacity(dim);
        let mut ranks = vec![Vec::with_capacity(dim); boxes.len()];
        for a in 0..dim {
            let mut distinct: Vec<RootExponent> = if a < d {
                let mut seen: Vec<RootExponent> = boxes.iter().map(|b| b.exps()[a]).collect();
                seen.sort_unstable_by_key(|e| (e.radicand(), e.root()));
                seen.dedup();
                seen
            } else {
                vec![RootExponent::int(0)]
            };
            distinct.sort();
            let index: HashMap<RootExponent, u32> =
                distinct.iter().enumerate().map(|(i, e)| (*e, i as u32 + 1)).collect();
            let mut table = Vec::with_capacity(distinct.len() + 1);
            table.push(S::zero());
            for e in &distinct {
                table.push(S::pow2(e, precision)?);
            }
            vals.push(table);
            for (r, b) in ranks.iter_mut().zip(boxes) {
                r.push(if a < d { index[&b.exps()[a]] } else { 1 });
            }
        }
        Ok(Ranked { dim, vals, ranks })
    }

    fn distinct(&self, a: usize) -> usize {
        self.vals[a].len() - 1
    }

    /// Axis whose ranks are non-increasing along `order`, if any.
    fn monotone_axis(&self, order: &[usize]) -> Option<usize> {
        (0..self.dim).find(|&a| order.windows(2).all(|w| self.ranks[w[0]][a] >= self.ranks[w[1]][a]))
    }

    /// Staircase axes and level axes for a sweep along `p`.
    fn split_axes(&self, p: usize) -> (usize, usize, Vec<usize>) {
        let mut rest: Vec<usize> = (0..self.dim).filter(|&a| a != p).collect();
        // Densest axes form the staircase; the sparsest become levels.
        rest.sort_by_key(|&a| std::cmp::Reverse(self.distinct(a)));
        let mut levels: Vec<usize> = rest[2..].to_vec();
        levels.sort_unstable();
        (rest[0], rest[1], levels)
    }

    /// Number of staircase insertions a sweep along `p` performs.
    fn sweep_cost(&self, p: usize) -> u128 {
        let (_, _, levels) = self.split_axes(p);
        self.ranks
            .iter()
            .map(|r| levels.iter().map(|&a| r[a] as u128).product::<u128>())
            .sum()
    }

    /// Volume of each box outside the earlier ones, in `order`, which must be
    /// non-increasing in axis `p`.
    fn exclusive_volumes(&self, order: &[usize], p: usize) -> Result<Vec<S>> {
        let (u, v, levels) = self.split_axes(p);
        let sizes: Vec<usize> = levels.iter().map(|&a| self.distinct(a)).collect();
        let total = sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s).filter(|&t| t <= MAX_LEVELS));
        let total = total.ok_or_else(|| Error::Overflow(format!("level grid {sizes:?} exceeds {MAX_LEVELS} cells")))?;
        let mut strides = vec![1usize; levels.len()];
        for i in (0..levels.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        let weights = self.level_weights(&levels, &sizes, total);
        let mut stairs: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); total];
        let (vu, vv) = (&self.vals[u], &self.vals[v]);

        let mut out = Vec::with_capacity(order.len());
        let mut counter = vec![0usize; levels.len()];
        for &i in order {
            let r = &self.ranks[i];
            let (ru, rv) = (r[u], r[v]);
            let top: usize = levels
                .iter()
                .zip(&strides)
                .map(|(&a, &s)| (r[a] as usize - 1) * s)
                .sum();
            // Dominated in its own cell means dominated in every lower cell.
            if dominated(&stairs[top], ru, rv) {
                out.push(S::zero());
                continue;
            }
            let mut excl = S::zero();
            counter.iter_mut().for_each(|c| *c = 0);
            let mut idx = 0usize;
            loop {
                if let Some(area) = insert(&mut stairs[idx], ru, rv, vu, vv) {
                    excl = excl + weights[idx].clone() * area;
                }
                // Odometer over cells below the box's level ranks.
                let mut k = levels.len();
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    if counter[k] + 1 < r[levels[k]] as usize {
                        counter[k] += 1;
                        idx += strides[k];
                        break;
                    }
                    idx -= counter[k] * strides[k];
                    counter[k] = 0;
                    if k == 0 {
                        k = usize::MAX;
                        break;
                    }
                }
                if k == usize::MAX || levels.is_empty() {
                    break;
                }
            }
            out.push(self.vals[p][r[p] as usize].clone() * excl);
        }
        Ok(out)
    }

    fn level_weights(&self, levels: &[usize], sizes: &[usize], total: usize) -> Vec<S> {
        let mut weights = vec![S::one(); 1];
        for (&a, &n) in levels.iter().zip(sizes) {
            let t = &self.vals[a];
            let widths: Vec<S> = (1..=n).map(|r| t[r].clone() - t[r - 1].clone()).collect();
            weights = weights
                .iter()
                .flat_map(|w| widths.iter().map(move |x| w.clone() * x.clone()))
                .collect();
        }
        debug_assert_eq!(weights.len(), total);
        weights
    }

    fn volume(&self, i: usize) -> S {
        (0..self.dim).fold(S::one(), |acc, a| acc * self.vals[a][self.ranks[i][a] as usize].clone())
    }
}

fn dominated(stair: &BTreeMap<u32, u32>, ru: u32, rv: u32) -> bool {
    stair.range(ru..).next().is_some_and(|(_, &v)| v >= rv)
}

/// Inserts `(ru, rv)` into a staircase and returns the newly covered area, or
/// `None` if the rectangle was already covered.
fn insert<S: MeasureScalar>(stair: &mut BTreeMap<u32, u32>, ru: u32, rv: u32, vu: &[S], vv: &[S]) -> Option<S> {
    let mut level = 0u32;
    if let Some((&k, &v)) = stair.range(ru..).next() {
        if v >= rv {
            return None;
        }
        if k == ru {
            stair.remove(&k);
        }
        level = v;
    }
    let top = vv[rv as usize].clone();
    let mut cur = ru;
    let mut area = S::zero();
    loop {
        match stair.range(..cur).next_back().map(|(&k, &v)| (k, v)) {
            Some((k, v)) => {
                let w = vu[cur as usize].clone() - vu[k as usize].clone();
                area = area + w * (top.clone() - vv[level as usize].clone());
                if v >= rv {
                    if v == rv {
                        stair.remove(&k);
                    }
                    break;
                }
                stair.remove(&k);
                level = v;
                cur = k;
            }
            None => {
                area = area + vu[cur as usize].clone() * (top.clone() - vv[level as usize].clone());
                break;
            }
        }
    }
    stair.insert(ru, rv);
    Some(area)
}

fn first_irrational(boxes: &[AnchoredBox]) -> Option<RootExponent> {
    boxes
        .iter()
        .flat_map(|b| b.exps())
        .find(|e| e.as_integer().is_none())
        .copied()
}

fn distinct_boxes(boxes: &[AnchoredBox]) -> Vec<AnchoredBox> {
    let mut seen = std::collections::HashSet::new();
    boxes.iter().filter(|b| seen.insert(*b)).cloned().collect()
}

/// Union volume over any [`MeasureScalar`].
///
/// # Errors
/// `DimensionMismatch` for mixed dimensions; `MixedMode` when an exact scalar
/// meets an irrational exponent.
pub fn union_volume_with<S: MeasureScalar>(boxes: &[AnchoredBox], precision: u32) -> Result<S> {
    if boxes.is_empty() {
        return Ok(S::zero());
    }
    let boxes = distinct_boxes(boxes);
    let ranked = Ranked::<S>::build(&boxes, precision)?;
    let p = (0..ranked.dim)
        .min_by_key(|&a| ranked.sweep_cost(a))
        .expect("at least one axis");
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    // Larger boxes first so that later ones are often dominated outright.
    order.sort_by(|&i, &j| {
        let (a, b) = (&ranked.ranks[i], &ranked.ranks[j]);
        b[p].cmp(&a[p]).then_with(|| b.cmp(a))
    });
    let parts = ranked.exclusive_volumes(&order, p)?;
    Ok(parts.into_iter().fold(S::zero(), |acc, x| acc + x))
}

/// Measure of `∪ boxes`: exact (dyadic) or a certified enclosure.
///
/// # Errors
/// `MixedMode` for exact mode with irrational exponents;
/// `DimensionMismatch` for mixed dimensions.
pub fn union_volume(boxes: &[AnchoredBox], mode: MeasureMode, precision: u32) -> Result<UnionMeasureResult> {
    let distinct = distinct_boxes(boxes).len();
    let value = match mode {
        MeasureMode::Exact => {
            if let Some(e) = first_irrational(boxes) {
                return Err(Error::MixedMode(e.to_string()));
            }
            Measure::Exact(union_volume_with::<DyadicRational>(boxes, precision)?)
        }
        MeasureMode::Certified => Measure::Certified(certified_union(boxes, precision)?),
    };
    Ok(UnionMeasureResult {
        error_bound: value.error_bound(),
        value,
        mode,
        boxes: distinct,
    })
}

fn certified_union(boxes: &[AnchoredBox], precision: u32) -> Result<Interval> {
    if precision <= 128 {
        Ok(union_volume_with::<Interval128>(boxes, precision)?.to_interval(precision))
    } else {
        Ok(union_volume_with::<Interval>(boxes, precision)?.with_precision(precision))
    }
}

/// Independent check of [`union_volume`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Alternating sum over nonempty subsets, at most 20 boxes.
    InclusionExclusion,
    /// Cell count on a dyadic grid with `2^resolution` cells per axis.
    Grid { resolution: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl OracleResult {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

pub const MAX_INCLUSION_EXCLUSION: usize = 20;

/// Brute-force union measure.
///
/// Inclusion–exclusion is exact for integral exponents; the grid gives
/// `lower <= |∪| <= upper` and is exact once the grid resolves every side.
///
/// # Errors
/// `Overflow` for more than 20 boxes in inclusion–exclusion mode or a grid
/// over `2^26` cells; `MixedMode` for irrational exponents in
/// inclusion–exclusion mode.
pub fn union_volume_oracle(boxes: &[AnchoredBox], mode: OracleMode) -> Result<OracleResult> {
    match mode {
        OracleMode::InclusionExclusion => {
            let v = inclusion_exclusion::<BigRational>(boxes)?;
            Ok(OracleResult {
                lower: v.clone(),
                upper: v,
            })
        }
        OracleMode::Grid { resolution } => grid_count(boxes, resolution),
    }
}

/// `Σ_{∅≠T} (−1)^{|T|+1} |∩T|` by depth-first search over subsets.
pub fn inclusion_exclusion<S: MeasureScalar>(boxes: &[AnchoredBox]) -> Result<S> {
    if boxes.len() > MAX_INCLUSION_EXCLUSION {
        return Err(Error::Overflow(format!(
            "inclusion-exclusion over {} boxes (limit {MAX_INCLUSION_EXCLUSION})",
            boxes.len()
        )));
    }
    if let Some(b) = boxes.first() {
        for c in boxes {
            check_dim(b.dim(), c.dim())?;
        }
    }
    let mut pos = S::zero();
    let mut neg = S::zero();
    let mut stack: Vec<(usize, AnchoredBox, bool)> =
        boxes.iter().enumerate().map(|(i, b)| (i, b.clone(), true)).collect();
    while let Some((i, cur, odd)) = stack.pop() {
        let vol = cur
            .exps()
            .iter()
            .try_fold(S::one(), |acc, e| S::pow2(e, 0).map(|x| acc * x))?;
        if odd {
            pos = pos + vol;
        } else {
            neg = neg + vol;
        }
        for (j, b) in boxes.iter().enumerate().skip(i + 1) {
            stack.push((j, intersect_anchored(&cur, b)?, !odd));
        }
    }
    Ok(pos - neg)
}

fn grid_count(boxes: &[AnchoredBox], resolution: u32) -> Result<OracleResult> {
    let zero = BigRational::zero();
    let Some(first) = boxes.first() else {
        return Ok(OracleResult {
            lower: zero.clone(),
            upper: zero,
        });
    };
    let d = first.dim();
    for b in boxes {
        check_dim(d, b.dim())?;
    }
    let cells_per_axis = 1u64.checked_shl(resolution).unwrap_or(0);
    let total = (cells_per_axis as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if cells_per_axis == 0 || total > 1 << 26 {
        return Err(Error::Overflow(format!("grid of 2^{resolution} cells over {d} axes")));
    }
    // Cell side on axis a is 2^(top_a − resolution), top_a = ceil(max exponent).
    let tops: Vec<i64> = (0..d)
        .map(|a| {
            boxes
                .iter()
                .map(|b| {
                    let e = b.exps()[a];
                    e.as_integer().unwrap_or_else(|| e.to_f64().ceil() as i64)
                })
                .max()
                .expect("nonempty")
        })
        .collect();
    let sides: Vec<DyadicRational> = tops
        .iter()
        .map(|&t| DyadicRational::pow2(t - resolution as i64))
        .collect();
    let mut inside = 0u64;
    let mut touched = 0u64;
    let mut cell = vec![0u64; d];
    'cells: loop {
        let lo: Vec<DyadicRational> = cell
            .iter()
            .zip(&sides)
            .map(|(&c, s)| s * &DyadicRational::from_i64(c as i64))
            .collect();
        let hi: Vec<DyadicRational> = lo.iter().zip(&sides).map(|(l, s)| l + s).collect();
        let mut any_touch = false;
        let mut any_inside = false;
        for b in boxes {
            let mut touch = true;
            let mut full = true;
            for a in 0..d {
                let e = &b.exps()[a];
                if !lt_pow2(&lo[a], e)? {
                    touch = false;
                    break;
                }
                if full && !le_pow2(&hi[a], e)? {
                    full = false;
                }
            }
            any_touch |= touch;
            any_inside |= touch && full;
            if any_inside {
                break;
            }
        }
        touched += any_touch as u64;
        inside += any_inside as u64;
        for a in (0..d).rev() {
            cell[a] += 1;
            if cell[a] < cells_per_axis {
                continue 'cells;
            }
            cell[a] = 0;
        }
        break;
    }
    let cell_volume: DyadicRational = sides.iter().fold(DyadicRational::one(), |acc, s| &acc * s);
    let cv = dyadic_to_rational(&cell_volume);
    Ok(OracleResult {
        lower: &cv * BigRational::from_integer(BigInt::from(inside)),
        upper: &cv * BigRational::from_integer(BigInt::from(touched)),
    })
}

pub fn dyadic_to_rational(x: &DyadicRational) -> BigRational {
    let n = x.numerator().clone();
    let e = x.exponent();
    if e >= 0 {
        BigRational::from_integer(n << e as usize)
    } else {
        BigRational::new(n, BigInt::one() << (-e) as usize)
    }
}

/// Order in which greedy witness sets are carved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOrder {
    /// Decreasing first-axis exponent, ties by the second axis, and so on.
    LexDescending,
    /// An explicit permutation of the box indices.
    Custom(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct SparsenessReport {
    /// `|E(R_i)|`, indexed like the input boxes.
    pub witness: Vec<Measure>,
    /// `min_i |E(R_i)| / |R_i|`.
    pub c_min: Measure,
    pub argmin: usize,
    pub order: Vec<usize>,
    pub union: Measure,
    pub sum_volumes: Measure,
    /// `Σ|R| / |∪R|`.
    pub carleson: f64,
}

/// Greedy sets `E(R_i) = R_i \ ∪_{l<i} R_l` in the given order.
///
/// # Errors
/// `InvalidParameter` for a bad permutation; otherwise as [`union_volume`].
pub fn sparseness_witness(
    boxes: &[AnchoredBox],
    order: &WitnessOrder,
    mode: MeasureMode,
    precision: u32,
) -> Result<SparsenessReport> {
    if mode == MeasureMode::Exact {
        if let Some(e) = first_irrational(boxes) {
            return Err(Error::MixedMode(e.to_string()));
        }
    }
    let order = match order {
        WitnessOrder::LexDescending => {
            let mut o: Vec<usize> = (0..boxes.len()).collect();
            o.sort_by(|&i, &j| boxes[j].exps().cmp(boxes[i].exps()).then(i.cmp(&j)));
            o
        }
        WitnessOrder::Custom(o) => {
            let mut seen = vec![false; boxes.len()];
            if o.len() != boxes.len()
                || o.iter()
                    .any(|&i| i >= boxes.len() || std::mem::replace(&mut seen[i], true))
            {
                return Err(Error::InvalidParameter(
                    "order is not a permutation of the boxes".into(),
                ));
            }
            o.clone()
        }
    };
    match mode {
        MeasureMode::Exact => witness_report::<DyadicRational>(boxes, order, precision, |x, _| Measure::Exact(x)),
        MeasureMode::Certified if precision <= 128 => {
            witness_report::<Interval128>(boxes, order, precision, |x, p| Measure::Certified(x.to_interval(p)))
        }
        MeasureMode::Certified => {
            witness_report::<Interval>(boxes, order, precision, |x, p| Measure::Certified(x.with_precision(p)))
        }
    }
}

fn witness_report<S: MeasureScalar>(
    boxes: &[AnchoredBox],
    order: Vec<usize>,
    precision: u32,
    wrap: impl Fn(S, u32) -> Measure,
) -> Result<SparsenessReport> {
    if boxes.is_empty() {
        return Err(Error::InvalidParameter("sparseness of an empty family".into()));
    }
    let ranked = Ranked::<S>::build(boxes, precision)?;
    let parts = match ranked.monotone_axis(&order) {
        Some(p) => ranked.exclusive_volumes(&order, p)?,
        None => quadratic_witness::<S>(boxes, &order, &ranked, precision)?,
    };
    let mut witness = vec![Measure::Exact(DyadicRational::zero()); boxes.len()];
    let mut union = S::zero();
    let mut sum = S::zero();
    let mut c_min: Option<Measure> = None;
    let mut argmin = order[0];
    for (&i, e) in order.iter().zip(parts) {
        union = union + e.clone();
        let vol = ranked.volume(i);
        sum = sum + vol;
        let inv = boxes[i]
            .exps()
            .iter()
            .try_fold(S::one(), |acc, x| S::pow2(&-*x, precision).map(|y| acc * y))?;
        let ratio = wrap(e.clone() * inv, precision);
        let better = match &c_min {
            None => true,
            Some(c) => ratio.to_f64() < c.to_f64(),
        };
        c_min = Some(match c_min {
            None => ratio,
            Some(c) => {
                let m = c.min(&ratio);
                if better {
                    argmin = i;
                }
                m
            }
        });
        witness[i] = wrap(e, precision);
    }
    let union = wrap(union, precision);
    let sum_volumes = wrap(sum, precision);
    let carleson = sum_volumes.to_f64() / union.to_f64();
    Ok(SparsenessReport {
        witness,
        c_min: c_min.expect("nonempty"),
        argmin,
        order,
        union,
        sum_volumes,
        carleson,
    })
}

/// `|R_i| − |∪_{l<i} (R_l ∩ R_i)|` box by box.
fn quadratic_witness<S: MeasureScalar>(
    boxes: &[AnchoredBox],
    order: &[usize],
    ranked: &Ranked<S>,
    precision: u32,
) -> Result<Vec<S>> {
    let mut out = Vec::with_capacity(order.len());
    for (pos, &i) in order.iter().enumerate() {
        let clipped: Vec<AnchoredBox> = order[..pos]
            .iter()
            .map(|&l| intersect_anchored(&boxes[l], &boxes[i]))
            .collect::<Result<_>>()?;
        let covered = union_volume_with::<S>(&clipped, precision)?;
        out.push(ranked.volume(i) - covered);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bx(e: &[i64]) -> AnchoredBox {
        AnchoredBox::from_ints(e).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn exact(boxes: &[AnchoredBox]) -> BigRational {
        let r = union_volume(boxes, MeasureMode::Exact, 0).unwrap();
        dyadic_to_rational(r.value.exact().unwrap())
    }

    #[test]
    fn union_examples() {
        assert_eq!(exact(&[bx(&[1, -1])]), q(1, 1));
        let pair = [bx(&[1, -1]), bx(&[0, 0])];
        assert_eq!(exact(&pair), q(3, 2));
        assert_eq!(exact(&[bx(&[2, 1, 0]), bx(&[1, 1, -3]), bx(&[2, 0, 0])]), q(8, 1));
        assert_eq!(exact(&[]), q(0, 1));
        assert_eq!(exact(&[bx(&[3]), bx(&[-1]), bx(&[5])]), q(32, 1));
    }

    #[test]
    fn exact_mode_rejects_roots() {
        let b = AnchoredBox::new(vec![RootExponent::new(2, 2).unwrap(), 0.into()]).unwrap();
        assert!(matches!(
            union_volume(&[b], MeasureMode::Exact, 128),
            Err(Error::MixedMode(_))
        ));
    }

    #[test]
    fn oracle_examples() {
        let pair = [bx(&[1, -1]), bx(&[0, 0])];
        let ie = union_volume_oracle(&pair, OracleMode::InclusionExclusion).unwrap();
        assert_eq!(ie.lower, q(3, 2));
        let g = union_volume_oracle(&pair, OracleMode::Grid { resolution: 2 }).unwrap();
        assert!(g.is_exact());
        assert_eq!(g.lower, q(3, 2));
        let one = union_volume_oracle(&[bx(&[2, -5, 1])], OracleMode::InclusionExclusion).unwrap();
        assert_eq!(one.lower, q(1, 4));
        assert!(union_volume_oracle(&vec![bx(&[0]); 21], OracleMode::InclusionExclusion).is_err());
    }

    #[test]
    fn grid_brackets_irrational_unions() {
        let r2 = RootExponent::new(2, 2).unwrap();
        let b = AnchoredBox::new(vec![r2, -r2]).unwrap();
        let g = union_volume_oracle(&[b.clone(), bx(&[0, 0])], OracleMode::Grid { resolution: 7 }).unwrap();
        let c = union_volume(&[b, bx(&[0, 0])], MeasureMode::Certified, 128).unwrap();
        let v = c.to_f64();
        assert!(num_traits::ToPrimitive::to_f64(&g.lower).unwrap() <= v);
        assert!(v <= num_traits::ToPrimitive::to_f64(&g.upper).unwrap());
    }

    fn random_boxes(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<AnchoredBox> {
        (0..n)
            .map(|_| bx(&(0..d).map(|_| rng.gen_range(-6..=6)).collect::<Vec<_>>()))
            .collect()
    }

    #[test]
    fn matches_inclusion_exclusion_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let d = rng.gen_range(1..=5);
            let n = rng.gen_range(1..=12);
            let boxes = random_boxes(&mut rng, n, d);
            let ie = inclusion_exclusion::<BigRational>(&boxes).unwrap();
            assert_eq!(exact(&boxes), ie, "{boxes:?}");
        }
    }

    #[test]
    fn certified_encloses_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let boxes = random_boxes(&mut rng, 8, 4);
            let ex = union_volume(&boxes, MeasureMode::Exact, 0).unwrap();
            let x = ex.value.exact().unwrap();
            for prec in [64, 128, 200] {
                let c = union_volume(&boxes, MeasureMode::Certified, prec).unwrap();
                assert!(c.value.to_interval().contains(x));
                assert!((c.to_f64() - x.to_f64()).abs() <= c.error_bound);
            }
            let f = union_volume_with::<f64>(&boxes, 0).unwrap();
            assert!((f - x.to_f64()).abs() <= 1e-9 * x.to_f64());
        }
    }

    #[test]
    fn irrational_union_matches_certified_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..60 {
            let n = rng.gen_range(1..=7);
            let boxes: Vec<AnchoredBox> = (0..n)
                .map(|_| {
                    AnchoredBox::new(
                        (0..3)
                            .map(|_| RootExponent::new(rng.gen_range(-9..=9), rng.gen_range(1..=3)).unwrap())
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            let ie = inclusion_exclusion::<Interval>(&boxes).unwrap_or_else(|_| unreachable!());
            let fast = union_volume(&boxes, MeasureMode::Certified, 128).unwrap();
            let slow = union_volume(&boxes, MeasureMode::Certified, 160).unwrap();
            let (a, b) = (fast.value.to_interval(), slow.value.to_interval());
            // Enclosures of the same number must overlap.
            assert!(a.lo() <= b.hi() && b.lo() <= a.hi());
            assert!(a.lo() <= ie.hi() && ie.lo() <= a.hi());
            assert!(a.radius().to_f64() < 1e-30 * a.to_f64().max(1.0));
        }
    }

    #[test]
    fn witness_examples() {
        let single = sparseness_witness(&[bx(&[1, 2])], &WitnessOrder::LexDescending, MeasureMode::Exact, 0).unwrap();
        assert_eq!(single.c_min, Measure::Exact(DyadicRational::one()));
        let dup = [bx(&[0, 1]), bx(&[0, 1])];
        let r = sparseness_witness(&dup, &WitnessOrder::LexDescending, MeasureMode::Exact, 0).unwrap();
        assert_eq!(r.c_min, Measure::Exact(DyadicRational::zero()));
        let pair = [bx(&[1, -1]), bx(&[0, 0])];
        let r = sparseness_witness(&pair, &WitnessOrder::Custom(vec![0, 1]), MeasureMode::Exact, 0).unwrap();
        let half = DyadicRational::pow2(-1);
        assert_eq!(r.witness[1], Measure::Exact(half.clone()));
        assert_eq!(r.c_min, Measure::Exact(half));
        assert_eq!(r.union, Measure::Exact(DyadicRational::from_i64(3).shl(-1)));
        assert!(sparseness_witness(&pair, &WitnessOrder::Custom(vec![0, 0]), MeasureMode::Exact, 0).is_err());
    }

    fn arb_family() -> impl Strategy<Value = Vec<AnchoredBox>> {
        (1usize..=4).prop_flat_map(|d| {
            proptest::collection::vec(proptest::collection::vec(-4i64..=4, d), 1..9)
                .prop_map(|v| v.iter().map(|e| bx(e)).collect())
        })
    }

    proptest! {
        #[test]
        fn order_and_duplicate_invariance(boxes in arb_family(), seed in 0u64..1000) {
            let base = exact(&boxes);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm = boxes.clone();
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            prop_assert_eq!(exact(&perm), base.clone());
            let mut doubled = boxes.clone();
            doubled.extend(boxes.iter().cloned());
            prop_assert_eq!(exact(&doubled), base.clone());
            let max = boxes.iter().map(|b| exact(std::slice::from_ref(b))).max().unwrap();
            let sum: BigRational = boxes.iter().map(|b| exact(std::slice::from_ref(b))).sum();
            prop_assert!(max <= base && base <= sum);
        }

        #[test]
        fn witnesses_partition_the_union(boxes in arb_family(), seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..boxes.len()).collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let union = exact(&boxes);
            for o in [WitnessOrder::LexDescending, WitnessOrder::Custom(order)] {
                let r = sparseness_witness(&boxes, &o, MeasureMode::Exact, 0).unwrap();
                let total: BigRational = r.witness.iter().map(|w| dyadic_to_rational(w.exact().unwrap())).sum();
                prop_assert_eq!(total, union.clone());
                // Brute force: |E(R_i)| = |∪_{l<=i}| − |∪_{l<i}|.
                for pos in 0..r.order.len() {
                    let upto: Vec<_> = r.order[..=pos].iter().map(|&i| boxes[i].clone()).collect();
                    let before: Vec<_> = r.order[..pos].iter().map(|&i| boxes[i].clone()).collect();
                    let w = dyadic_to_rational(r.witness[r.order[pos]].exact().unwrap());
                    prop_assert_eq!(w, exact(&upto) - exact(&before));
                }
            }
        }
    }
}
