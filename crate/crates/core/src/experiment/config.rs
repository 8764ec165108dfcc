//! Flat `key = value` run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CdChoice {
    Auto,
    Fixed(u64),
}

impl FromStr for CdChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(CdChoice::Auto),
            v => v
                .parse()
                .map(CdChoice::Fixed)
                .map_err(|_| Error::Config(format!("cd must be an integer or \"auto\", got {v:?}"))),
        }
    }
}

impl fmt::Display for CdChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CdChoice::Auto => f.write_str("auto"),
            CdChoice::Fixed(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub dim: u32,
    pub kmin: u64,
    pub kmax: u64,
    /// Number of evenly spaced `k` values in `[kmin, kmax]`.
    pub points: usize,
    pub cd: CdChoice,
    pub alphas: Vec<f64>,
    pub precision: u32,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub seed: u64,
    /// Random seeds in the extension check.
    pub trials: usize,
    /// Half-width of the extension check window.
    pub window: i64,
    pub oracle_trials: usize,
    pub max_boxes: usize,
    /// Largest scale `j` in the index-bound check.
    pub index_jmax: u64,
    pub average_ks: Vec<u64>,
    /// Rotates every β shell, so the β check must fail.
    pub mutate_beta: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dim: 4,
            kmin: 10,
            kmax: 40,
            points: 9,
            cd: CdChoice::Auto,
            alphas: vec![0.0, 1.0, 2.0, 3.0],
            precision: 128,
            out: None,
            summary: None,
            seed: 0,
            trials: 200,
            window: 64,
            oracle_trials: 500,
            max_boxes: 12,
            index_jmax: 60,
            average_ks: vec![5, 10, 20],
            mutate_beta: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Sets one key; `-` and `_` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        match key.as_str() {
            "dim" | "d" => self.dim = parse(&key, v)?,
            "kmin" => self.kmin = parse(&key, v)?,
            "kmax" => self.kmax = parse(&key, v)?,
            "k" => {
                self.kmin = parse(&key, v)?;
                self.kmax = self.kmin;
            }
            "points" => self.points = parse(&key, v)?,
            "cd" => self.cd = v.parse()?,
            "alpha" | "alphas" => self.alphas = parse_list(&key, v)?,
            "precision" => self.precision = parse(&key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "summary" => self.summary = Some(PathBuf::from(v)),
            "seed" => self.seed = parse(&key, v)?,
            "trials" => self.trials = parse(&key, v)?,
            "window" => self.window = parse(&key, v)?,
            "oracle-trials" => self.oracle_trials = parse(&key, v)?,
            "max-boxes" => self.max_boxes = parse(&key, v)?,
            "index-jmax" => self.index_jmax = parse(&key, v)?,
            "average-ks" => self.average_ks = parse_list(&key, v)?,
            "mutate-beta" => self.mutate_beta = parse(&key, v)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Checks the parameters of the lower-bound sweep.
    pub fn validate(&self) -> Result<()> {
        if self.dim < 4 {
            return Err(Error::Config(format!("dim must be at least 4, got {}", self.dim)));
        }
        if self.kmin < 1 || self.kmin > self.kmax {
            return Err(Error::Config(format!(
                "need 1 <= kmin <= kmax, got [{}, {}]",
                self.kmin, self.kmax
            )));
        }
        if self.points == 0 {
            return Err(Error::Config("points must be positive".into()));
        }
        if self.precision < 64 {
            return Err(Error::Config(format!(
                "precision must be at least 64, got {}",
                self.precision
            )));
        }
        if let CdChoice::Fixed(c) = self.cd {
            let floor = u64::from(self.dim - 3).max(2);
            if c < floor {
                return Err(Error::Config(format!("cd must be at least {floor}, got {c}")));
            }
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(Error::Config(format!("alpha must be >= 0, got {a}")));
        }
        Ok(())
    }

    /// `points` evenly spaced integers from `kmin` to `kmax`, both included.
    pub fn k_values(&self) -> Vec<u64> {
        let span = self.kmax - self.kmin;
        if self.points as u64 > span {
            return (self.kmin..=self.kmax).collect();
        }
        if self.points == 1 {
            return vec![self.kmax];
        }
        let steps = self.points as u64 - 1;
        let mut ks: Vec<u64> = (0..=steps)
            .map(|i| self.kmin + (2 * i * span + steps) / (2 * steps))
            .collect();
        ks.dedup();
        ks
    }
}
