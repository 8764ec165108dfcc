use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use zygmund_core::basis::{auto_cd, theorem1_basis_with, theorem2_family, BetaSequence};
use zygmund_core::experiment::{
    check_extension, check_oracle, run_lowerbound, run_suite, CdChoice, CsvSink, ExperimentConfig, LowerBoundRow,
};
use zygmund_core::measure::{sparseness_witness, union_volume, MeasureMode, WitnessOrder};
use zygmund_core::{AnchoredBox, Error, RootExponent};

#[derive(Parser)]
#[command(
    name = "zygmund",
    version,
    about = "Dyadic bases, anchored-box unions and maximal-operator lower bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep k: union of the family at scale k against the Orlicz side.
    Lowerbound(LowerboundArgs),
    /// Check that the antidiagonal reaches every vector of [-N, N]^d.
    Coverage {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        window: i64,
    },
    /// Print the first terms of the concatenated tuple sequence.
    Beta {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        count: u128,
    },
    /// Random seeds: antidiagonal identity and monotonicity of the extension.
    CheckExtension {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        window: i64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Greedy witness sets for the family at one scale.
    Sparseness {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value = "auto")]
        cd: String,
        #[arg(long, default_value_t = 128)]
        precision: u32,
    },
    /// Exact unions of random boxes against inclusion-exclusion.
    OracleCheck {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 12)]
        max_boxes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every self-check and print a JSON report.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure of the union of boxes read from a file (one box per line).
    Measure {
        /// Exponents separated by spaces or commas: `1 -2 sqrt(3)`.
        #[arg(long)]
        boxes: PathBuf,
        #[arg(long, default_value = "certified")]
        mode: String,
        #[arg(long, default_value_t = 128)]
        precision: u32,
    },
    /// Print the family at one scale as CSV.
    Family {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value = "auto")]
        cd: String,
    },
}

#[derive(Args)]
struct LowerboundArgs {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    kmin: Option<u64>,
    #[arg(long)]
    kmax: Option<u64>,
    /// Evenly spaced k values in [kmin, kmax].
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    cd: Option<String>,
    /// Comma-separated exponents α.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Check(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter(_) | Error::MixedMode(_) => Failure::Usage(e.to_string()),
            Error::Check(_) | Error::Coverage(_) => Failure::Check(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Lowerbound(args) => lowerbound(args),
        Command::Coverage { dim, window } => coverage(dim, window),
        Command::Beta { dim, count } => beta(dim, count),
        Command::CheckExtension { seed, window, trials } => {
            if window < 0 {
                return Err(Failure::Usage("window must be nonnegative".into()));
            }
            let c = check_extension(seed, window, trials);
            print_json(&json!(c))?;
            passed(c.passed, &c.detail)
        }
        Command::Sparseness { dim, k, cd, precision } => sparseness(dim, k, &cd, precision),
        Command::OracleCheck {
            trials,
            max_boxes,
            seed,
        } => {
            if !(1..=20).contains(&max_boxes) {
                return Err(Failure::Usage("max-boxes must be in 1..=20".into()));
            }
            let c = check_oracle(seed, trials, max_boxes);
            print_json(&json!(c))?;
            passed(c.passed, &c.detail)
        }
        Command::Suite { config, seed, out } => suite(config, seed, out),
        Command::Measure { boxes, mode, precision } => measure(&boxes, &mode, precision),
        Command::Family { dim, k, cd } => family(dim, k, &cd),
    }
}

fn passed(ok: bool, detail: &str) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(detail.to_string()))
    }
}

fn print_json(v: &serde_json::Value) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Outcome {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, v).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

fn resolve_cd(dim: u32, k: u64, cd: &str) -> Result<u64, Failure> {
    match cd.parse::<CdChoice>()? {
        CdChoice::Auto => Ok(auto_cd(dim, k)?),
        CdChoice::Fixed(c) => Ok(c),
    }
}

fn lowerbound(args: LowerboundArgs) -> Outcome {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    let overrides = [
        ("dim", args.dim.map(|v| v.to_string())),
        ("kmin", args.kmin.map(|v| v.to_string())),
        ("kmax", args.kmax.map(|v| v.to_string())),
        ("points", args.points.map(|v| v.to_string())),
        ("cd", args.cd),
        ("alpha", args.alpha),
        ("precision", args.precision.map(|v| v.to_string())),
        ("out", args.out.map(|p| p.display().to_string())),
        ("summary", args.summary.map(|p| p.display().to_string())),
    ];
    for (k, v) in overrides {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    cfg.validate()?;
    let sink: Box<dyn Write> = match &cfg.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout()),
    };
    let mut csv = CsvSink::new(sink, &cfg.alphas)?;
    let report = run_lowerbound(&cfg, |row: &LowerBoundRow| {
        if cfg.out.is_some() {
            eprintln!("k = {}: {} boxes, union {:.6}", row.k, row.family_size, row.union);
        }
        csv.push(row)
    })?;
    match &cfg.summary {
        Some(p) => write_json(p, &report.summary)?,
        None => {
            let text = serde_json::to_string_pretty(&report.summary).map_err(|e| Failure::Runtime(e.to_string()))?;
            eprintln!("{text}");
        }
    }
    Ok(())
}

fn coverage(dim: u32, window: i64) -> Outcome {
    let report = match theorem1_basis_with(dim, window, None) {
        Ok((_, r)) => r,
        Err(e @ Error::Coverage(_)) => return Err(Failure::Check(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    print_json(&json!({
        "dim": report.dim,
        "window": report.window,
        "index_lo": report.index_lo,
        "index_hi": report.index_hi,
        "targets": report.targets,
        "attained": report.attained,
        "antidiagonal_mismatches": report.antidiagonal_mismatches.len(),
        "monotone_window": report.monotone_window,
        "monotone_checked": report.monotone_checked,
        "monotone_ok": report.monotone_ok,
        "ok": report.ok,
    }))?;
    passed(report.ok, "coverage report not ok")
}

fn beta(dim: u32, count: u128) -> Outcome {
    let seq = BetaSequence::new(dim)?;
    let mut out = BufWriter::new(io::stdout().lock());
    for m in 0..count {
        let t = seq.concat(m)?;
        let cells: Vec<String> = t.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{m},{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn sparseness(dim: u32, k: u64, cd: &str, precision: u32) -> Outcome {
    let cd = resolve_cd(dim, k, cd)?;
    let fam = theorem2_family(dim, k, cd)?;
    let boxes = fam.boxes()?;
    let rep = sparseness_witness(&boxes, &WitnessOrder::LexDescending, MeasureMode::Certified, precision)?;
    print_json(&json!({
        "dim": dim,
        "k": k,
        "cd": cd,
        "family_size": boxes.len(),
        "union": rep.union.to_f64(),
        "union_error": rep.union.error_bound(),
        "sum_volumes": rep.sum_volumes.to_f64(),
        "c_min": rep.c_min.to_f64(),
        "argmin": boxes[rep.argmin].to_string(),
        "carleson": rep.carleson,
    }))
}

fn suite(config: Option<PathBuf>, seed: Option<u64>, out: Option<PathBuf>) -> Outcome {
    let mut cfg = match &config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = run_suite(&cfg);
    match &out {
        Some(p) => write_json(p, &report)?,
        None => print_json(&json!(report))?,
    }
    for c in &report.checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    passed(report.passed, "at least one check failed")
}

fn parse_boxes(text: &str) -> Result<Vec<AnchoredBox>, Failure> {
    let mut boxes = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let exps: Vec<RootExponent> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse())
            .collect::<Result<_, _>>()
            .map_err(|e: Error| Failure::Usage(format!("line {}: {e}", no + 1)))?;
        boxes.push(AnchoredBox::new(exps).map_err(|e| Failure::Usage(format!("line {}: {e}", no + 1)))?);
    }
    Ok(boxes)
}

fn measure(path: &Path, mode: &str, precision: u32) -> Outcome {
    let mode: MeasureMode = mode.parse()?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let boxes = parse_boxes(&text)?;
    let r = union_volume(&boxes, mode, precision)?;
    print_json(&json!({
        "mode": r.mode.to_string(),
        "boxes": r.boxes,
        "value": r.to_f64(),
        "exact": r.value.exact().map(|v| v.to_string()),
        "error_bound": r.error_bound,
    }))
}

fn family(dim: u32, k: u64, cd: &str) -> Outcome {
    let cd = resolve_cd(dim, k, cd)?;
    let fam = theorem2_family(dim, k, cd)?;
    let mut out = BufWriter::new(io::stdout().lock());
    let mut header = vec!["n".to_string(), "j".to_string()];
    header.extend((1..=dim).map(|i| format!("e{i}")));
    writeln!(out, "{}", header.join(","))?;
    for (m, b) in fam.members.iter().zip(fam.boxes()?) {
        let exps: Vec<String> = b.exps().iter().map(|e| e.to_string()).collect();
        writeln!(out, "{},{},{}", m.n, m.j, exps.join(","))?;
    }
    out.flush()?;
    Ok(())
}
