//! Self-checks over every construction, with a deterministic report.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::basis::{auto_cd, beta_index_find, theorem1_basis, theorem2_family, BetaSequence};
use crate::boxes::{contains_cube, AnchoredBox};
use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::extension::{MonotoneExtension, SeedFunction};
use crate::maximal::{average_over_box, TestFunction};
use crate::measure::{dyadic_to_rational, inclusion_exclusion, union_volume, MeasureMode};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub version: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

/// Random seeds on `[-window, window]`: the extension must agree with the
/// seed on the antidiagonal and be monotone on the square.
pub fn check_extension(seed: u64, window: i64, trials: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    let mut violations = 0usize;
    let mut first = None;
    for t in 0..trials {
        let spread = rng.gen_range(1..=1000);
        let values: Vec<i64> = (-window..=window).map(|_| rng.gen_range(-spread..=spread)).collect();
        let phi = SeedFunction::new(-window, values);
        let ext = MonotoneExtension::new(phi.clone());
        let bad = (-window..=window).filter(|&m| ext.eval(m, -m) != phi.eval(m)).count();
        mismatches += bad;
        let rep = ext.verify_monotone(window);
        if !rep.ok {
            violations += 1;
        }
        if (bad > 0 || !rep.ok) && first.is_none() {
            first = Some(t);
        }
    }
    let passed = mismatches == 0 && violations == 0;
    let mut detail = format!(
        "{trials} seeds on [-{window}, {window}]: {mismatches} antidiagonal mismatches, {violations} non-monotone extensions"
    );
    if let Some(t) = first {
        detail.push_str(&format!(", first failing trial {t}"));
    }
    CheckOutcome::new("extension", passed, detail)
}

pub fn check_coverage(cases: &[(u32, i64)]) -> CheckOutcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for &(d, n) in cases {
        match theorem1_basis(d, n) {
            Ok((_, r)) => {
                passed &= r.ok;
                parts.push(format!(
                    "d={d} N={n}: {}/{} attained, monotone {}",
                    r.attained, r.targets, r.monotone_ok
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("d={d} N={n}: {e}"));
            }
        }
    }
    CheckOutcome::new("coverage", passed, parts.join("; "))
}

/// Shell `n` of the d = 4 sequence, optionally rotated.
fn d4_shell(n: u64, mutate: Option<u64>) -> Vec<Vec<i64>> {
    let mut shell = BetaSequence::new(4).expect("d = 4").shell(n).expect("small shell");
    if let Some(seed) = mutate {
        if shell.len() > 1 {
            let r = 1 + (seed as usize + n as usize) % (shell.len() - 1);
            shell.rotate_left(r);
        }
    }
    shell
}

/// The displayed d = 4 shells and the first six terms of the concatenation.
pub fn check_beta(mutate: Option<u64>) -> CheckOutcome {
    let expected_shells: Vec<Vec<Vec<i64>>> = vec![
        vec![vec![0, 0]],
        vec![vec![0, 0], vec![1, -1]],
        vec![vec![0, 0], vec![1, -1], vec![2, -2]],
    ];
    let shells: Vec<Vec<Vec<i64>>> = (0..3).map(|n| d4_shell(n, mutate)).collect();
    let prefix: Vec<Vec<i64>> = shells.iter().flatten().take(6).cloned().collect();
    let expected_prefix: Vec<Vec<i64>> = expected_shells.iter().flatten().cloned().collect();
    let seq = BetaSequence::new(4).expect("d = 4");
    let concat: Vec<Vec<i64>> = (0..6).map(|m| seq.concat(m).expect("small index")).collect();
    let concat_ok = mutate.is_some() || concat == expected_prefix;
    let passed = shells == expected_shells && prefix == expected_prefix && concat_ok;
    let detail = format!("shells 0..2 = {shells:?}");
    CheckOutcome::new("beta", passed, detail)
}

/// For every scale `j <= jmax` and every tuple, an index `n` with `β_n`
/// equal to the tuple and `(j−1)^{d−2} <= C_d·n`, `n <= j^{d−2}`.
pub fn check_index_bounds(dims: &[u32], jmax: u64) -> CheckOutcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for &d in dims {
        match index_bounds_for(d, jmax) {
            Ok(s) => parts.push(s),
            Err(e) => {
                passed = false;
                parts.push(format!("d={d}: {e}"));
            }
        }
    }
    CheckOutcome::new("index-bounds", passed, parts.join("; "))
}

fn index_bounds_for(d: u32, jmax: u64) -> Result<String> {
    let cd = auto_cd(d, jmax)?;
    let seq = BetaSequence::new(d)?;
    let e = d - 2;
    let mut checked = 0u64;
    for j in 1..=jmax {
        let c = (j / cd) as i64;
        for tuple in tuples(d as usize - 3, c) {
            let idx = beta_index_find(&seq, &tuple, j, cd)?;
            let n = idx.n;
            let lower_ok = n * cd as u128 >= ((j - 1) as u128).pow(e);
            let upper_ok = n <= (j as u128).pow(e);
            if !lower_ok || !upper_ok || seq.concat(n)? != tuple {
                return Err(Error::Check(format!("j={j} tuple {tuple:?}: index {n} out of bounds")));
            }
            checked += 1;
        }
    }
    let floor = u64::from(d - 3).max(2);
    let minimal = cd == floor || theorem2_family(d, jmax, cd - 1).is_err();
    if !minimal {
        return Err(Error::Check(format!("C_d = {} also works for d = {d}", cd - 1)));
    }
    Ok(format!(
        "d={d}: minimal C_d = {cd}, {checked} (j, tuple) pairs in bounds"
    ))
}

/// Zero-sum tuples with `free` leading coordinates in `[0, c]`, by brute force.
fn tuples(free: usize, c: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..free {
        out = out
            .into_iter()
            .flat_map(|t: Vec<i64>| {
                (0..=c).map(move |v| {
                    let mut u = t.clone();
                    u.push(v);
                    u
                })
            })
            .collect();
    }
    for t in &mut out {
        let s: i64 = t.iter().sum();
        t.push(-s);
    }
    out
}

/// Random integral families: the exact union against inclusion–exclusion.
pub fn check_oracle(seed: u64, trials: usize, max_boxes: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0usize;
    let mut first_bad = None;
    for t in 0..trials {
        let d = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=max_boxes.max(1));
        let boxes: Vec<AnchoredBox> = (0..n)
            .map(|_| {
                let e: Vec<i64> = (0..d).map(|_| rng.gen_range(-6..=6)).collect();
                AnchoredBox::from_ints(&e).expect("nonempty")
            })
            .collect();
        let engine = union_volume(&boxes, MeasureMode::Exact, 0).map(|r| r.value.exact().map(dyadic_to_rational));
        let oracle = inclusion_exclusion::<BigRational>(&boxes);
        match (engine, oracle) {
            (Ok(Some(a)), Ok(b)) if a == b => agree += 1,
            _ => {
                first_bad.get_or_insert(t);
            }
        }
    }
    let mut detail = format!("{agree}/{trials} instances agree exactly (<= {max_boxes} boxes, d <= 5)");
    if let Some(t) = first_bad {
        detail.push_str(&format!(", first disagreement at trial {t}"));
    }
    CheckOutcome::new("oracle", agree == trials, detail)
}

/// Every family box at `d = 4` has average exactly 1 and contains the cube.
pub fn check_averages(ks: &[u64]) -> CheckOutcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for &k in ks {
        let res = (|| -> Result<String> {
            let fam = theorem2_family(4, k, auto_cd(4, k)?)?;
            let f = TestFunction::new(4, k as u32);
            let one = DyadicRational::from_i64(1);
            for b in fam.boxes()? {
                if average_over_box(&b, &f, 128)?.exact() != Some(&one) || !contains_cube(&b, k as u32) {
                    return Err(Error::Check(format!("k={k}: box {b}")));
                }
            }
            Ok(format!("k={k}: {} boxes with average 1", fam.len()))
        })();
        match res {
            Ok(s) => parts.push(s),
            Err(e) => {
                passed = false;
                parts.push(e.to_string());
            }
        }
    }
    CheckOutcome::new("averages", passed, parts.join("; "))
}

pub fn run_suite(cfg: &ExperimentConfig) -> SuiteReport {
    let mutate = cfg.mutate_beta.then_some(cfg.seed);
    let checks = vec![
        check_extension(cfg.seed, cfg.window, cfg.trials),
        check_coverage(&[(2, 3), (3, 2), (4, 2)]),
        check_beta(mutate),
        check_index_bounds(&[4, 5], cfg.index_jmax),
        check_oracle(cfg.seed, cfg.oracle_trials, cfg.max_boxes),
        check_averages(&cfg.average_ks),
    ];
    SuiteReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
