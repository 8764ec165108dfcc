//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zygmund_core::basis::{auto_cd, beta_index_find, theorem1_basis, theorem2_family, BetaSequence};
use zygmund_core::experiment::{run_lowerbound, CdChoice, ExperimentConfig, LowerBoundReport};
use zygmund_core::maximal::{average_over_box, TestFunction};
use zygmund_core::measure::{sparseness_witness, union_volume, MeasureMode, WitnessOrder};
use zygmund_core::{contains_cube, AnchoredBox, DyadicRational, MonotoneExtension, SeedFunction};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Duration, limit: f64, what: &str) -> Result<(), String> {
    ensure(t.as_secs_f64() < limit, || {
        format!("{what} took {:.1}s, limit {limit}s", t.as_secs_f64())
    })
}

/// Ordinary least squares slope of `ln y` against `ln x`.
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn naive_extension(phi: &SeedFunction, m1: i64, m2: i64) -> i64 {
    if m1 >= -m2 {
        (-m2..=m1).map(|m| phi.eval(m)).max().unwrap()
    } else {
        (m1..=-m2).map(|m| phi.eval(m)).min().unwrap()
    }
}

fn monotone_on(n: i64, f: impl Fn(i64, i64) -> i64) -> bool {
    for a in -n..=n {
        for b in -n..=n {
            let v = f(a, b);
            if (a < n && f(a + 1, b) < v) || (b < n && f(a, b + 1) < v) {
                return false;
            }
        }
    }
    true
}

fn c1_extension() -> Outcome {
    let t = Instant::now();
    let window = 64i64;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..200 {
        let values: Vec<i64> = (-window..=window).map(|_| rng.gen_range(-500..=500)).collect();
        let phi = SeedFunction::new(-window, values);
        let ext = MonotoneExtension::new(phi.clone());
        for m in -window..=window {
            ensure(ext.eval(m, -m) == phi.eval(m), || {
                format!("seed {trial}: Φ({m}, {}) != φ({m})", -m)
            })?;
        }
        let rep = ext.verify_monotone(window);
        ensure(rep.ok, || format!("seed {trial}: verify_monotone reports a violation"))?;
        ensure(monotone_on(window, |a, b| ext.eval(a, b)), || {
            format!("seed {trial}: neighbor scan found a decrease")
        })?;
        for _ in 0..50 {
            let (a, b) = (rng.gen_range(-window..=window), rng.gen_range(-window..=window));
            ensure(ext.eval(a, b) == naive_extension(&phi, a, b), || {
                format!("seed {trial}: Φ({a}, {b}) differs from the max/min formula")
            })?;
        }
    }
    within(t.elapsed(), 5.0, "extension suite")?;
    Ok(format!("200 seeds on [-64, 64], {:.2}s", t.elapsed().as_secs_f64()))
}

fn c2_coverage() -> Outcome {
    let t = Instant::now();
    let mut parts = Vec::new();
    for (d, n) in [(2u32, 3i64), (3, 2), (4, 2)] {
        let (spec, rep) = theorem1_basis(d, n).map_err(|e| format!("d={d} N={n}: {e}"))?;
        let image: HashSet<Vec<i64>> = (rep.index_lo..=rep.index_hi)
            .map(|m| spec.eval(&[m, -m]).unwrap())
            .collect();
        let side = (2 * n + 1) as usize;
        let mut targets = 0;
        for idx in 0..side.pow(d) {
            let mut r = idx;
            let v: Vec<i64> = (0..d)
                .map(|_| {
                    let c = (r % side) as i64 - n;
                    r /= side;
                    c
                })
                .collect();
            ensure(image.contains(&v), || format!("d={d} N={n}: {v:?} not attained"))?;
            targets += 1;
        }
        let w = rep.index_lo.abs().max(rep.index_hi.abs());
        for (i, s) in spec.shapes().iter().enumerate() {
            ensure(s.verify_monotone(w).ok && monotone_on(w, |a, b| s.eval(a, b)), || {
                format!("d={d} N={n}: shape {i} not monotone on [-{w}, {w}]^2")
            })?;
        }
        parts.push(format!("d={d} N={n}: {targets}/{targets}"));
    }
    within(t.elapsed(), 30.0, "coverage")?;
    Ok(format!("{}, {:.2}s", parts.join(", "), t.elapsed().as_secs_f64()))
}

fn c3_beta() -> Outcome {
    let seq = BetaSequence::new(4).map_err(|e| e.to_string())?;
    let shells: Vec<Vec<Vec<i64>>> = (0..3).map(|n| seq.shell(n).unwrap()).collect();
    ensure(shells[0] == vec![vec![0, 0]], || format!("shell 0 = {:?}", shells[0]))?;
    ensure(shells[1] == vec![vec![0, 0], vec![1, -1]], || {
        format!("shell 1 = {:?}", shells[1])
    })?;
    ensure(shells[2] == vec![vec![0, 0], vec![1, -1], vec![2, -2]], || {
        format!("shell 2 = {:?}", shells[2])
    })?;
    let prefix: Vec<Vec<i64>> = (0..6).map(|m| seq.concat(m).unwrap()).collect();
    let expected = vec![
        vec![0, 0],
        vec![0, 0],
        vec![1, -1],
        vec![0, 0],
        vec![1, -1],
        vec![2, -2],
    ];
    ensure(prefix == expected, || format!("prefix {prefix:?}"))?;
    Ok("shells 0..2 and the length-6 prefix match".into())
}

/// Brute-force β list up to index `upper`, as tuple → sorted indices.
fn beta_occurrences(d: u32, upper: u128) -> HashMap<Vec<i64>, Vec<u128>> {
    let free = d as usize - 3;
    let mut map: HashMap<Vec<i64>, Vec<u128>> = HashMap::new();
    let mut idx = 0u128;
    let mut shell = 0i64;
    while idx <= upper {
        let mut cur = vec![0i64; free];
        'shell: loop {
            let mut t = cur.clone();
            t.push(-cur.iter().sum::<i64>());
            map.entry(t).or_default().push(idx);
            idx += 1;
            let mut i = free;
            loop {
                if i == 0 {
                    break 'shell;
                }
                i -= 1;
                if cur[i] < shell {
                    cur[i] += 1;
                    cur[i + 1..].iter_mut().for_each(|x| *x = 0);
                    break;
                }
            }
        }
        shell += 1;
    }
    map
}

fn admissible_tuples(free: usize, c: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..free {
        out = out
            .into_iter()
            .flat_map(|t| (0..=c).map(move |v| [t.clone(), vec![v]].concat()))
            .collect();
    }
    out.into_iter()
        .map(|mut t| {
            let s: i64 = t.iter().sum();
            t.push(-s);
            t
        })
        .collect()
}

/// Smallest brute-force index in bounds for every (j, tuple), or the first failure.
fn bounds_hold(
    d: u32,
    cd: u64,
    jmax: u64,
    occ: &HashMap<Vec<i64>, Vec<u128>>,
) -> Result<Vec<(u64, Vec<i64>, u128)>, String> {
    let e = d - 2;
    let mut found = Vec::new();
    for j in 1..=jmax {
        let lower = ((j - 1) as u128).pow(e);
        let upper = (j as u128).pow(e);
        for t in admissible_tuples(d as usize - 3, (j / cd) as i64) {
            let n = occ
                .get(&t)
                .and_then(|v| v.iter().copied().find(|&n| n * cd as u128 >= lower && n <= upper))
                .ok_or_else(|| format!("j={j} tuple {t:?}"))?;
            found.push((j, t, n));
        }
    }
    Ok(found)
}

fn c4_index_bounds() -> Outcome {
    let jmax = 60u64;
    let mut parts = Vec::new();
    for d in [4u32, 5] {
        let cd = auto_cd(d, jmax).map_err(|e| format!("d={d}: {e}"))?;
        let occ = beta_occurrences(d, (jmax as u128).pow(d - 2));
        let found = bounds_hold(d, cd, jmax, &occ).map_err(|w| format!("d={d} C_d={cd}: no index for {w}"))?;
        let seq = BetaSequence::new(d).unwrap();
        for (j, t, n) in &found {
            let got = beta_index_find(&seq, t, *j, cd).map_err(|e| format!("d={d} j={j}: {e}"))?;
            ensure(got.n == *n, || {
                format!("d={d} j={j} tuple {t:?}: index {} but brute force gives {n}", got.n)
            })?;
        }
        let floor = u64::from(d - 3).max(2);
        ensure(cd == floor || bounds_hold(d, cd - 1, jmax, &occ).is_err(), || {
            format!("d={d}: C_d = {} also works", cd - 1)
        })?;
        parts.push(format!("d={d}: minimal C_d = {cd}, {} pairs", found.len()));
    }
    Ok(parts.join("; "))
}

/// Inclusion–exclusion in units of `2^-30`, exact in i128.
fn inclusion_exclusion_scaled(boxes: &[Vec<i64>]) -> i128 {
    let n = boxes.len();
    let d = boxes[0].len();
    let mut total = 0i128;
    for mask in 1u32..(1 << n) {
        let mut sum = 0i64;
        for axis in 0..d {
            sum += boxes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, b)| b[axis])
                .min()
                .unwrap();
        }
        let v = 1i128 << (sum + 30);
        total += if mask.count_ones() % 2 == 1 { v } else { -v };
    }
    total
}

fn scaled(x: &DyadicRational) -> Option<i128> {
    let num: i128 = x.numerator().to_string().parse().ok()?;
    let shift = x.exponent() + 30;
    if shift < 0 {
        None
    } else {
        Some(num << shift)
    }
}

fn c5_oracle() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..500 {
        let d = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=12);
        let exps: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-6..=6)).collect())
            .collect();
        let boxes: Vec<AnchoredBox> = exps.iter().map(|e| AnchoredBox::from_ints(e).unwrap()).collect();
        let r = union_volume(&boxes, MeasureMode::Exact, 0).map_err(|e| format!("trial {trial}: {e}"))?;
        let got = r.value.exact().and_then(scaled);
        let want = inclusion_exclusion_scaled(&exps);
        ensure(got == Some(want), || {
            format!("trial {trial}: engine {got:?}, oracle {want} (units of 2^-30)")
        })?;
    }
    within(t.elapsed(), 60.0, "oracle run")?;
    Ok(format!("500/500 instances agree, {:.2}s", t.elapsed().as_secs_f64()))
}

fn c6_averages() -> Outcome {
    let one = DyadicRational::from_i64(1);
    let mut parts = Vec::new();
    for k in [5u64, 10, 20] {
        let fam = theorem2_family(4, k, auto_cd(4, k).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let f = TestFunction::new(4, k as u32);
        for (m, b) in fam.members.iter().zip(fam.boxes().map_err(|e| e.to_string())?) {
            // First two exponents are ±n^{1/2}; the cube is inside iff n <= k^2.
            let expected = m.n <= u128::from(k * k)
                && m.tuple.iter().all(|&v| v >= -(k as i64))
                && m.tuple.iter().sum::<i64>() == 0;
            ensure(expected, || format!("k={k}: member {m:?} fails the cube rule"))?;
            let avg = average_over_box(&b, &f, 128).map_err(|e| e.to_string())?;
            ensure(avg.exact() == Some(&one) && contains_cube(&b, k as u32), || {
                format!("k={k}: box {b} has average {avg}")
            })?;
        }
        parts.push(format!("k={k}: {} boxes", fam.len()));
    }
    Ok(parts.join(", "))
}

struct Sweeps {
    d4: LowerBoundReport,
    d5: LowerBoundReport,
    elapsed: Duration,
}

fn sweeps() -> Result<Sweeps, String> {
    let t = Instant::now();
    let run = |dim, kmin, kmax, alphas: Vec<f64>| {
        let cfg = ExperimentConfig {
            dim,
            kmin,
            kmax,
            points: 9,
            cd: CdChoice::Auto,
            alphas,
            ..Default::default()
        };
        run_lowerbound(&cfg, |r| {
            eprintln!("  d={dim} k={}: {} boxes, union {:.4}", r.k, r.family_size, r.union);
            Ok(())
        })
        .map_err(|e| format!("d={dim}: {e}"))
    };
    let d4 = run(4, 50, 400, vec![1.0, 2.0])?;
    let d5 = run(5, 20, 100, vec![2.0, 3.0])?;
    Ok(Sweeps {
        d4,
        d5,
        elapsed: t.elapsed(),
    })
}

fn fit_of(rep: &LowerBoundReport, y: impl Fn(&zygmund_core::experiment::LowerBoundRow) -> f64) -> f64 {
    let pts: Vec<(f64, f64)> = rep
        .rows
        .iter()
        .filter(|r| rep.summary.fit_ks.contains(&r.k))
        .map(|r| (r.k as f64, y(r)))
        .collect();
    slope(&pts)
}

fn c7_growth(s: &Sweeps) -> Outcome {
    let mut parts = Vec::new();
    for (rep, lo, hi) in [(&s.d4, 1.75, 2.25), (&s.d5, 2.6, 3.4)] {
        let d = rep.summary.dim;
        for r in &rep.rows {
            ensure(r.union_error * 1e6 <= r.union, || {
                format!("d={d} k={}: error {:e} vs union {:e}", r.k, r.union_error, r.union)
            })?;
        }
        let sl = fit_of(rep, |r| r.union);
        ensure((lo..=hi).contains(&sl), || {
            format!("d={d}: union slope {sl:.4} outside [{lo}, {hi}]")
        })?;
        parts.push(format!("d={d}: slope {sl:.3}"));
    }
    within(s.elapsed, 600.0, "sweeps")?;
    Ok(format!("{}, {:.1}s", parts.join(", "), s.elapsed.as_secs_f64()))
}

fn c8_threshold(s: &Sweeps) -> Outcome {
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for (rep, tol) in [(&s.d4, 0.15), (&s.d5, 0.2)] {
        let d = rep.summary.dim;
        let below = fit_of(rep, |r| r.ratio[0]);
        let at = fit_of(rep, |r| r.ratio[1]);
        let (a0, a1) = (rep.summary.alphas[0], rep.summary.alphas[1]);
        parts.push(format!("d={d}: α={a0} slope {below:.3}, α={a1} slope {at:.3}"));
        if below < 0.5 {
            failures.push(format!("d={d} α={a0}: slope {below:.4} < 0.5"));
        }
        if at.abs() > tol {
            failures.push(format!("d={d} α={a1}: |slope| {:.4} > {tol}", at.abs()));
        }
    }
    if failures.is_empty() {
        Ok(parts.join("; "))
    } else {
        Err(format!("{} ({})", failures.join("; "), parts.join("; ")))
    }
}

fn c9_sparseness() -> Outcome {
    let mut rows = Vec::new();
    for k in [25u64, 50, 100, 200] {
        let fam = theorem2_family(4, k, auto_cd(4, k).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let boxes = fam.boxes().map_err(|e| e.to_string())?;
        let rep = sparseness_witness(&boxes, &WitnessOrder::LexDescending, MeasureMode::Certified, 128)
            .map_err(|e| format!("k={k}: {e}"))?;
        rows.push((k, rep.c_min.to_f64(), rep.carleson));
    }
    let c0 = rows[0].1;
    ensure(c0 > 0.0, || "c_min(25) is zero".into())?;
    for &(k, c, _) in &rows[1..] {
        ensure(c >= 0.9 * c0, || {
            format!("c_min({k}) = {c:.4} < 0.9 · c_min(25) = {:.4}", 0.9 * c0)
        })?;
    }
    let cmax = rows.iter().map(|r| r.2).fold(f64::MIN, f64::max);
    let cmin = rows.iter().map(|r| r.2).fold(f64::MAX, f64::min);
    ensure(cmax / cmin < 2.0, || {
        format!("Carleson ratio varies by {:.3}", cmax / cmin)
    })?;
    let desc: Vec<String> = rows
        .iter()
        .map(|(k, c, r)| format!("k={k}: c_min {c:.4}, Carleson {r:.3}"))
        .collect();
    Ok(desc.join("; "))
}

fn run_cli(args: &[&str]) -> Result<(Vec<u8>, bool), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_zygmund"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.success()))
}

fn read(p: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "seed = 11\ndim = 4\nkmin = 5\nkmax = 30\nalpha = 1, 2\n").map_err(|e| e.to_string())?;
    let cfg = cfg.to_str().unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let suite = dir.path().join(format!("suite{run}.json"));
        let (stdout_s, ok_s) = run_cli(&["suite", "--config", cfg, "--out", suite.to_str().unwrap()])?;
        ensure(ok_s, || "suite run failed".into())?;
        let csv = dir.path().join(format!("lb{run}.csv"));
        let summary = dir.path().join(format!("lb{run}.json"));
        let (stdout_l, ok_l) = run_cli(&[
            "lowerbound",
            "--config",
            cfg,
            "--out",
            csv.to_str().unwrap(),
            "--summary",
            summary.to_str().unwrap(),
        ])?;
        ensure(ok_l, || "lowerbound run failed".into())?;
        let (stdout_c, _) = run_cli(&["lowerbound", "--config", cfg, "--summary", summary.to_str().unwrap()])?;
        outputs.push([
            stdout_s,
            read(&suite)?,
            stdout_l,
            read(&csv)?,
            read(&summary)?,
            stdout_c,
        ]);
    }
    let names = [
        "suite stdout",
        "suite report",
        "lowerbound stdout",
        "lowerbound csv",
        "lowerbound summary",
        "lowerbound csv on stdout",
    ];
    for (i, name) in names.iter().enumerate() {
        ensure(outputs[0][i] == outputs[1][i], || {
            format!("{name} differs between runs")
        })?;
    }
    ensure(!outputs[0][1].is_empty() && !outputs[0][3].is_empty(), || {
        "empty output".into()
    })?;
    Ok(format!("{} output streams byte-identical across two runs", names.len()))
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome| {
        match &o {
            Ok(d) => println!("PASS criterion {n} ({name}): {d}"),
            Err(d) => println!("FAIL criterion {n} ({name}): {d}"),
        }
        results.push((n, name, o));
    };
    report(1, "extension", c1_extension());
    report(2, "coverage", c2_coverage());
    report(3, "beta prefix", c3_beta());
    report(4, "index bounds", c4_index_bounds());
    report(5, "union oracle", c5_oracle());
    report(6, "exact averages", c6_averages());
    match sweeps() {
        Ok(s) => {
            report(7, "growth exponent", c7_growth(&s));
            report(8, "alpha threshold", c8_threshold(&s));
        }
        Err(e) => {
            report(7, "growth exponent", Err(e.clone()));
            report(8, "alpha threshold", Err(e));
        }
    }
    report(9, "sparseness", c9_sparseness());
    report(10, "determinism", c10_determinism());
    let failed: Vec<u32> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
