//! The `|{Mf_k >= 1}|` versus `∫ f_k log(e + f_k)^α` sweep over `k`.

use std::io::Write;

use serde::Serialize;

use super::config::{CdChoice, ExperimentConfig};
use super::fit::{fit_loglog_slope, SlopeFit};
use crate::basis::{auto_cd, theorem2_family};
use crate::boxes::contains_cube;
use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::maximal::{average_over_box, orlicz_rhs, TestFunction};
use crate::measure::{sparseness_witness, union_volume, MeasureMode, WitnessOrder};

/// A ratio slope at most this counts as bounded.
pub const THRESHOLD_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundRow {
    pub k: u64,
    pub family_size: usize,
    pub union: f64,
    pub union_error: f64,
    pub sum_volumes: f64,
    pub c_min: f64,
    pub carleson: f64,
    pub rhs: Vec<f64>,
    pub ratio: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaFit {
    pub alpha: f64,
    pub fit: Option<SlopeFit>,
    pub bounded: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundSummary {
    pub version: String,
    pub dim: u32,
    pub kmin: u64,
    pub kmax: u64,
    pub ks: Vec<u64>,
    pub cd: u64,
    pub cd_auto: bool,
    pub precision: u32,
    pub alphas: Vec<f64>,
    /// The `k` values entering the fits: the upper half of the range.
    pub fit_ks: Vec<u64>,
    pub union_fit: Option<SlopeFit>,
    pub expected_union_slope: u32,
    pub ratio_fits: Vec<AlphaFit>,
    /// Smallest α whose ratio slope is at most the tolerance.
    pub alpha_threshold: Option<f64>,
    pub threshold_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub rows: Vec<LowerBoundRow>,
    pub summary: LowerBoundSummary,
}

pub fn resolve_cd(cfg: &ExperimentConfig) -> Result<u64> {
    match cfg.cd {
        CdChoice::Fixed(c) => Ok(c),
        CdChoice::Auto => auto_cd(cfg.dim, cfg.kmax),
    }
}

/// One row: the family at scale `k`, its union, witnesses and both sides of
/// the weak-type inequality for every α.
pub fn lowerbound_row(dim: u32, k: u64, cd: u64, alphas: &[f64], precision: u32) -> Result<LowerBoundRow> {
    let family = theorem2_family(dim, k, cd)?;
    let boxes = family.boxes()?;
    let kk = u32::try_from(k).map_err(|_| Error::Overflow(format!("k = {k}")))?;
    let f = TestFunction::new(dim as usize, kk);
    let one = DyadicRational::from_i64(1);
    for b in &boxes {
        let avg = average_over_box(b, &f, precision)?;
        if avg.exact() != Some(&one) || !contains_cube(b, kk) {
            return Err(Error::Check(format!("average of f_{k} over {b} is {avg}, not 1")));
        }
    }
    // Every average is 1, so the whole family lies in {Mf_k >= 1}.
    let union = union_volume(&boxes, MeasureMode::Certified, precision)?;
    let witness = sparseness_witness(&boxes, &WitnessOrder::LexDescending, MeasureMode::Certified, precision)?;
    let mut rhs = Vec::with_capacity(alphas.len());
    let mut ratio = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let r = orlicz_rhs(&f, a, precision)?.to_f64();
        rhs.push(r);
        ratio.push(union.to_f64() / r);
    }
    Ok(LowerBoundRow {
        k,
        family_size: boxes.len(),
        union: union.to_f64(),
        union_error: union.error_bound,
        sum_volumes: witness.sum_volumes.to_f64(),
        c_min: witness.c_min.to_f64(),
        carleson: witness.carleson,
        rhs,
        ratio,
    })
}

/// Upper half of the range, or the last three `k` when the half is shorter.
pub fn fit_window(ks: &[u64], kmin: u64, kmax: u64) -> Vec<u64> {
    let upper: Vec<u64> = ks.iter().copied().filter(|&k| 2 * k >= kmin + kmax).collect();
    if upper.len() >= 3 {
        upper
    } else {
        ks[ks.len().saturating_sub(3)..].to_vec()
    }
}

fn summarize(cfg: &ExperimentConfig, cd: u64, rows: &[LowerBoundRow]) -> LowerBoundSummary {
    let ks: Vec<u64> = rows.iter().map(|r| r.k).collect();
    let fit_ks = fit_window(&ks, cfg.kmin, cfg.kmax);
    let fit_rows: Vec<&LowerBoundRow> = rows.iter().filter(|r| fit_ks.contains(&r.k)).collect();
    let fit = |y: &dyn Fn(&LowerBoundRow) -> f64| -> Option<SlopeFit> {
        let pts: Vec<(f64, f64)> = fit_rows.iter().map(|r| (r.k as f64, y(r))).collect();
        fit_loglog_slope(&pts).ok()
    };
    let union_fit = fit(&|r| r.union);
    let ratio_fits: Vec<AlphaFit> = cfg
        .alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let f = fit(&|r| r.ratio[i]);
            AlphaFit {
                alpha,
                fit: f,
                bounded: f.map(|f| f.slope <= THRESHOLD_TOLERANCE),
            }
        })
        .collect();
    let alpha_threshold = ratio_fits
        .iter()
        .filter(|a| a.bounded == Some(true))
        .map(|a| a.alpha)
        .fold(None, |m: Option<f64>, a| Some(m.map_or(a, |m| m.min(a))));
    LowerBoundSummary {
        version: env!("CARGO_PKG_VERSION").to_string(),
        dim: cfg.dim,
        kmin: cfg.kmin,
        kmax: cfg.kmax,
        ks,
        cd,
        cd_auto: cfg.cd == CdChoice::Auto,
        precision: cfg.precision,
        alphas: cfg.alphas.clone(),
        fit_ks,
        union_fit,
        expected_union_slope: cfg.dim - 2,
        ratio_fits,
        alpha_threshold,
        threshold_tolerance: THRESHOLD_TOLERANCE,
    }
}

/// Runs the sweep, handing each row to `on_row` as soon as it is computed.
///
/// # Errors
/// Configuration errors, `NotFound` for a too small `C_d`, and any error
/// returned by `on_row`; rows already delivered stay delivered.
pub fn run_lowerbound(
    cfg: &ExperimentConfig,
    mut on_row: impl FnMut(&LowerBoundRow) -> Result<()>,
) -> Result<LowerBoundReport> {
    cfg.validate()?;
    let cd = resolve_cd(cfg)?;
    let mut rows = Vec::new();
    for k in cfg.k_values() {
        let row = lowerbound_row(cfg.dim, k, cd, &cfg.alphas, cfg.precision)?;
        on_row(&row)?;
        rows.push(row);
    }
    let summary = summarize(cfg, cd, &rows);
    Ok(LowerBoundReport { rows, summary })
}

pub fn csv_header(alphas: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = [
        "k",
        "family_size",
        "union",
        "union_error",
        "sum_volumes",
        "c_min",
        "carleson",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(alphas.iter().map(|a| format!("rhs_alpha_{a}")));
    h.extend(alphas.iter().map(|a| format!("ratio_alpha_{a}")));
    h
}

pub fn csv_record(row: &LowerBoundRow) -> Vec<String> {
    let mut r = vec![
        row.k.to_string(),
        row.family_size.to_string(),
        format!("{:e}", row.union),
        format!("{:e}", row.union_error),
        format!("{:e}", row.sum_volumes),
        format!("{:e}", row.c_min),
        format!("{:e}", row.carleson),
    ];
    r.extend(row.rhs.iter().map(|v| format!("{v:e}")));
    r.extend(row.ratio.iter().map(|v| format!("{v:e}")));
    r
}

/// Streams rows to CSV, flushing after each one.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W, alphas: &[f64]) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(inner);
        writer.write_record(csv_header(alphas))?;
        writer.flush()?;
        Ok(CsvSink { writer })
    }

    pub fn push(&mut self, row: &LowerBoundRow) -> Result<()> {
        self.writer.write_record(csv_record(row))?;
        self.writer.flush()?;
        Ok(())
    }
}
