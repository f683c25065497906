//! Command-line frontend: reproducible batch runs over the partition, QV, TV
//! and integral machinery. Artifacts are CSV/JSON; every JSON artifact embeds
//! the resolved configuration and the library version, so identical configs
//! and seeds produce byte-identical output.

use crate::error::{PathError, Result};
use crate::integrals::{follmer_integral, ibp_residual_typical};
use crate::partitions::{drawupdown, epsilon_partition, lebesgue_1d, lebesgue_multi, Partition};
use crate::paths::{load_csv, synth_oscillator, synth_walk, SampledPath};
use crate::quadvar::{
    discrete_qv, discrete_qv_with_jump_threshold, partition_independence_study, qv_limit,
    IndependenceRow,
};
use crate::truncvar::{qv_via_tv, truncated_variation_fast, tv_integral_identity, tv_sandwich_check};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolved run configuration embedded into every JSON artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<i32>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub c_grid: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub seeds: Vec<u64>,
    pub delta_jump: f64,
    pub format: String,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.n_min, self.n_max) {
            if a > b {
                return Err(PathError::InvalidParameter(format!("empty level range {a}..{b}")));
            }
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(PathError::InvalidParameter("tolerance must be > 0".into()));
            }
        }
        if self.c_grid.iter().any(|c| !(*c > 0.0)) {
            return Err(PathError::InvalidParameter("c grid must be positive".into()));
        }
        if self.c_grid.windows(2).any(|w| w[0] <= w[1]) {
            return Err(PathError::InvalidParameter("c grid must be strictly decreasing".into()));
        }
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(name = "pathqv", version, about = "pathwise quadratic and truncated variation analytics")]
struct Cli {
    /// key=value config file; explicit flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, hide = true)]
    inject_fault: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic path and write it as CSV
    Synth(SynthArgs),
    /// Compute a stopping-time partition of a path
    Partition(PartitionArgs),
    /// Quadratic variation along Lebesgue partition levels with Cauchy report
    Qv(QvArgs),
    /// Truncated variation over a c grid with sandwich/identity residuals
    Tv(TvArgs),
    /// Riemann-sum integral along a Lebesgue ladder with diagnostics
    Integrate(IntegrateArgs),
    /// c*TV^c convergence study against a QV reference
    Converge(ConvergeArgs),
    /// Render a study JSON into plot-ready CSV
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// seeded simple random walk
    #[arg(long)]
    walk: bool,
    /// nested-oscillation fixture with unbounded c*TV^c
    #[arg(long)]
    oscillator: bool,
    #[arg(long)]
    steps: Option<usize>,
    /// walk step size
    #[arg(long = "h")]
    h: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// oscillator block count
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// lebesgue | drawdown | eps
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    level: Option<i32>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QvArgs {
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// inclusive level range, e.g. 3..10
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    delta_jump: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// also export the finest-level QV process as CSV
    #[arg(long)]
    qv_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TvArgs {
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// decreasing comma-separated c grid
    #[arg(long = "c")]
    c: Option<String>,
    /// optional level range for the QV reference
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    delta_jump: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// running TV^c CSV (single-c grids only)
    #[arg(long)]
    running_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    /// integrator path CSV
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// integrand path CSV (defaults to the integrator)
    #[arg(long)]
    integrand: Option<PathBuf>,
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// finest-level integral process CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// study seeded walks instead of an input file
    #[arg(long)]
    walk: bool,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long = "h")]
    h: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// seed range 0..31 or comma list (walk studies)
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long = "c")]
    c: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    delta_jump: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// plot-ready CSV with both study tables
    #[arg(long)]
    table_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// study JSON produced by `converge`
    #[arg(short, long)]
    input: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// key=value config file; `#` starts a comment.
#[derive(Default)]
struct FileConfig(BTreeMap<String, String>);

const CONFIG_KEYS: &[&str] = &[
    "input", "output", "steps", "h", "seed", "horizon", "n_max", "family", "level", "eps",
    "levels", "tol", "delta_jump", "c", "seeds", "integrand", "qv_csv", "running_csv", "csv",
    "table_csv", "generator",
];

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(PathError::InvalidParameter(format!(
                    "config line {}: expected key=value, got '{line}'",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(PathError::InvalidParameter(format!("config line {}: unknown key '{key}'", lineno + 1)));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Self(map))
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn fill<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| PathError::InvalidParameter(format!("config key '{key}': cannot parse '{raw}'"))),
        }
    }
}

fn parse_range_i32(spec: &str, what: &str) -> Result<(i32, i32)> {
    let (a, b) = spec
        .split_once("..")
        .ok_or_else(|| PathError::InvalidParameter(format!("{what}: expected a..b, got '{spec}'")))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo: i32 = a.trim().parse().map_err(|_| PathError::InvalidParameter(format!("{what}: bad bound '{a}'")))?;
    let hi: i32 = b.trim().parse().map_err(|_| PathError::InvalidParameter(format!("{what}: bad bound '{b}'")))?;
    if lo > hi {
        return Err(PathError::InvalidParameter(format!("{what}: empty range {lo}..{hi}")));
    }
    Ok((lo, hi))
}

fn parse_c_grid(spec: &str) -> Result<Vec<f64>> {
    let grid: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| PathError::InvalidParameter(format!("c grid: bad value '{s}'"))))
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        return Err(PathError::InvalidParameter("c grid is empty".into()));
    }
    Ok(grid)
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    if spec.contains("..") {
        let (lo, hi) = parse_range_i32(spec, "seeds")?;
        if lo < 0 {
            return Err(PathError::InvalidParameter("seeds must be nonnegative".into()));
        }
        return Ok((lo as u64..=hi as u64).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| PathError::InvalidParameter(format!("seeds: bad value '{s}'"))))
        .collect()
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| PathError::InvalidParameter(format!("missing required option --{flag}")))
}

fn load_path(input: &Path, horizon: Option<f64>) -> Result<SampledPath> {
    let file = fs::File::open(input)?;
    load_csv(file, horizon)
}

fn write_json<T: Serialize>(output: &Path, body: &T, config: &RunConfig) -> Result<()> {
    #[derive(Serialize)]
    struct Artifact<'a, T: Serialize> {
        #[serde(flatten)]
        body: &'a T,
        config: &'a RunConfig,
        version: &'static str,
    }
    let text = serde_json::to_string_pretty(&Artifact { body, config, version: VERSION })
        .map_err(|e| PathError::InvalidParameter(format!("serialization failed: {e}")))?;
    let mut file = fs::File::create(output)?;
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

/// Study table: truncated-variation estimates of the continuous QV against a
/// Lebesgue-ladder reference, plus the partition-independence table.
#[derive(Serialize, Deserialize)]
pub struct StudyBody {
    pub c: Vec<f64>,
    #[serde(rename = "estimate_T")]
    pub estimate_t: Vec<f64>,
    #[serde(rename = "reference_T")]
    pub reference_t: Option<f64>,
    pub abs_err: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warning: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub partition_table: Vec<IndependenceRow>,
}

fn study_tables_csv(study: &StudyBody, output: &Path) -> Result<()> {
    let mut file = fs::File::create(output)?;
    writeln!(file, "c,estimate_T,reference_T,abs_err")?;
    for (i, c) in study.c.iter().enumerate() {
        let reference = study.reference_t.map_or(String::from(""), |r| format!("{r}"));
        let err = study.abs_err.get(i).map_or(String::from(""), |e| format!("{e}"));
        writeln!(file, "{c},{},{reference},{err}", study.estimate_t[i])?;
    }
    if !study.partition_table.is_empty() {
        writeln!(file)?;
        writeln!(file, "partition,oscillation,sup_error")?;
        for row in &study.partition_table {
            writeln!(file, "{},{},{}", row.label, row.oscillation, row.sup_error)?;
        }
    }
    Ok(())
}

fn run_synth(args: SynthArgs, cfg: &FileConfig) -> Result<()> {
    let generator = if args.walk {
        "walk".to_string()
    } else if args.oscillator {
        "oscillator".to_string()
    } else {
        cfg.get("generator").map(str::to_string).ok_or_else(|| {
            PathError::InvalidParameter("choose a generator: --walk or --oscillator".into())
        })?
    };
    if args.walk && args.oscillator {
        return Err(PathError::InvalidParameter("--walk conflicts with --oscillator".into()));
    }
    let output = require(cfg.fill(args.output, "output")?, "output")?;
    let path = match generator.as_str() {
        "walk" => {
            let steps = require(cfg.fill(args.steps, "steps")?, "steps")?;
            let h = require(cfg.fill(args.h, "h")?, "h")?;
            let seed = cfg.fill(args.seed, "seed")?.unwrap_or(0);
            let horizon = cfg.fill(args.horizon, "horizon")?.unwrap_or(1.0);
            synth_walk(steps, horizon, h, seed)?
        }
        "oscillator" => {
            let n_max = require(cfg.fill(args.n_max, "n_max")?, "n-max")?;
            synth_oscillator(n_max)?
        }
        other => {
            return Err(PathError::InvalidParameter(format!("unknown generator '{other}'")));
        }
    };
    let file = fs::File::create(&output)?;
    path.write_csv(file)?;
    Ok(())
}

fn run_partition(args: PartitionArgs, cfg: &FileConfig) -> Result<()> {
    let input = require(cfg.fill(args.input, "input")?, "input")?;
    let output = require(cfg.fill(args.output, "output")?, "output")?;
    let family = require(cfg.fill(args.family, "family")?, "family")?;
    let path = load_path(&input, None)?;
    let partition = match family.as_str() {
        "lebesgue" => {
            let level = require(cfg.fill(args.level, "level")?, "level")?;
            lebesgue_multi(&path, level)?
        }
        "drawdown" => {
            let level = require(cfg.fill(args.level, "level")?, "level")?;
            drawupdown(&path, level)?.combined
        }
        "eps" => {
            let eps = require(cfg.fill(args.eps, "eps")?, "eps")?;
            epsilon_partition(&path, eps)?
        }
        other => return Err(PathError::InvalidParameter(format!("unknown partition family '{other}'"))),
    };
    let file = fs::File::create(&output)?;
    partition.write_csv(file)?;
    Ok(())
}

fn run_qv(args: QvArgs, cfg: &FileConfig) -> Result<()> {
    let input = require(cfg.fill(args.input, "input")?, "input")?;
    let output = require(cfg.fill(args.output, "output")?, "output")?;
    let levels = require(cfg.fill(args.levels, "levels")?, "levels")?;
    let (n_min, n_max) = parse_range_i32(&levels, "levels")?;
    let tol = cfg.fill(args.tol, "tol")?.unwrap_or(1e-9);
    let delta_jump = cfg.fill(args.delta_jump, "delta_jump")?.unwrap_or(0.0);
    let config = RunConfig {
        command: "qv".into(),
        input: Some(input.display().to_string()),
        output: Some(output.display().to_string()),
        n_min: Some(n_min),
        n_max: Some(n_max),
        c_grid: vec![],
        tol: Some(tol),
        seeds: vec![],
        delta_jump,
        format: "json".into(),
    };
    config.validate()?;
    let path = load_path(&input, None)?;
    let (_, report) = qv_limit(&path, n_min, n_max, tol)?;
    if let Some(csv_out) = cfg.fill(args.qv_csv, "qv_csv")? {
        let finest = lebesgue_multi(&path, n_max)?;
        let qv = discrete_qv_with_jump_threshold(&path, &finest, delta_jump);
        qv.write_csv(fs::File::create(csv_out)?)?;
    }
    write_json(&output, &report, &config)
}

#[derive(Serialize)]
struct TvBody {
    c: Vec<f64>,
    #[serde(rename = "estimate_T")]
    estimate_t: Vec<f64>,
    #[serde(rename = "reference_T")]
    reference_t: Option<f64>,
    abs_err: Vec<f64>,
    tv_total: Vec<f64>,
    sandwich_lower_gap: Vec<f64>,
    sandwich_upper_gap: Vec<f64>,
    identity_residual: Vec<f64>,
}

fn run_tv(args: TvArgs, cfg: &FileConfig) -> Result<()> {
    let input = require(cfg.fill(args.input, "input")?, "input")?;
    let output = require(cfg.fill(args.output, "output")?, "output")?;
    let c_grid = parse_c_grid(&require(cfg.fill(args.c, "c")?, "c")?)?;
    let levels = cfg.fill(args.levels, "levels")?;
    let tol = cfg.fill(args.tol, "tol")?.unwrap_or(1e-9);
    let delta_jump = cfg.fill(args.delta_jump, "delta_jump")?.unwrap_or(0.0);
    let range = levels.as_deref().map(|s| parse_range_i32(s, "levels")).transpose()?;
    let config = RunConfig {
        command: "tv".into(),
        input: Some(input.display().to_string()),
        output: Some(output.display().to_string()),
        n_min: range.map(|r| r.0),
        n_max: range.map(|r| r.1),
        c_grid: c_grid.clone(),
        tol: Some(tol),
        seeds: vec![],
        delta_jump,
        format: "json".into(),
    };
    config.validate()?;
    let path = load_path(&input, None)?;
    let reference_t = match range {
        Some((a, b)) => {
            let (qv, _) = qv_limit(&path, a, b, tol)?;
            let mut total = qv.entry(qv.len() - 1, 0, 0);
            // delta_jump = 0 filters nothing on a step path (see converge)
            if delta_jump > 0.0 {
                let jumps = crate::quadvar::jump_qv(&path, delta_jump);
                total -= jumps.entry(jumps.len() - 1, 0, 0);
            }
            Some(total)
        }
        None => None,
    };
    let mut body = TvBody {
        c: c_grid.clone(),
        estimate_t: vec![],
        reference_t,
        abs_err: vec![],
        tv_total: vec![],
        sandwich_lower_gap: vec![],
        sandwich_upper_gap: vec![],
        identity_residual: vec![],
    };
    for &c in &c_grid {
        let tv = truncated_variation_fast(&path, c)?;
        body.estimate_t.push(c * tv.total);
        body.tv_total.push(tv.total);
        let sandwich = tv_sandwich_check(&path, c)?;
        body.sandwich_lower_gap.push(sandwich.max_lower_violation);
        body.sandwich_upper_gap.push(sandwich.max_upper_violation);
        body.identity_residual.push(tv_integral_identity(&path, c)?.max_residual);
        if let Some(r) = reference_t {
            body.abs_err.push((c * tv.total - r).abs());
        }
    }
    if let Some(csv_out) = cfg.fill(args.running_csv, "running_csv")? {
        if c_grid.len() != 1 {
            return Err(PathError::InvalidParameter("--running-csv needs a single-c grid".into()));
        }
        let tv = truncated_variation_fast(&path, c_grid[0])?;
        tv.write_csv(path.times(), fs::File::create(csv_out)?)?;
    }
    write_json(&output, &body, &config)
}

#[derive(Serialize)]
struct IntegrateBody {
    sup_diffs: Vec<f64>,
    converged: bool,
    tol: f64,
    final_value: f64,
    ibp_sup_residual: f64,
}

fn run_integrate(args: IntegrateArgs, cfg: &FileConfig) -> Result<()> {
    let input = require(cfg.fill(args.input, "input")?, "input")?;
    let output = require(cfg.fill(args.output, "output")?, "output")?;
    let levels = require(cfg.fill(args.levels, "levels")?, "levels")?;
    let (n_min, n_max) = parse_range_i32(&levels, "levels")?;
    let tol = cfg.fill(args.tol, "tol")?.unwrap_or(1e-9);
    let integrand = cfg.fill(args.integrand, "integrand")?;
    let config = RunConfig {
        command: "integrate".into(),
        input: Some(input.display().to_string()),
        output: Some(output.display().to_string()),
        n_min: Some(n_min),
        n_max: Some(n_max),
        c_grid: vec![],
        tol: Some(tol),
        seeds: vec![],
        delta_jump: 0.0,
        format: "json".into(),
    };
    config.validate()?;
    let x = load_path(&input, None)?;
    let g = match &integrand {
        Some(p) => load_path(p, None)?,
        None => x.clone(),
    };
    // ladder merging the Lebesgue partitions of both paths, so it contains
    // the integrand's levels as the convergence statement requires
    let ladder: Vec<Partition> = (n_min..=n_max)
        .map(|n| {
            Ok(lebesgue_1d(&g, n)?.partition.merge(&lebesgue_1d(&x, n)?.partition))
        })
        .collect::<Result<_>>()?;
    let (processes, cauchy) = follmer_integral(&g, &x, &ladder, tol)?;
    let full = Partition::all_samples(&x);
    let qv = discrete_qv(&x, &full);
    let ibp = ibp_residual_typical(&x, &qv, 0, 0, &[full])?;
    let finest = processes.last().unwrap();
    if let Some(csv_out) = cfg.fill(args.csv, "csv")? {
        finest.write_csv(fs::File::create(csv_out)?)?;
    }
    let body = IntegrateBody {
        sup_diffs: cauchy.sup_diffs,
        converged: cauchy.converged,
        tol,
        final_value: finest.total(),
        ibp_sup_residual: ibp.sup_residual,
    };
    write_json(&output, &body, &config)
}

/// One study path: per-c trace estimates plus the QV reference trace.
fn study_single(
    path: &SampledPath,
    c_grid: &[f64],
    n_min: i32,
    n_max: i32,
    tol: f64,
    delta_jump: f64,
) -> Result<(Vec<f64>, f64, bool)> {
    let (qv, report) = qv_limit(path, n_min, n_max, tol)?;
    let d = path.dim();
    // the reference is the QV limit with jumps above delta_jump removed; for a
    // step path delta_jump = 0 must mean "treat every move as continuous", so
    // only a positive threshold filters anything
    let mut final_matrix = qv.matrix_at(qv.len() - 1).to_vec();
    if delta_jump > 0.0 {
        let jumps = crate::quadvar::jump_qv(path, delta_jump);
        for (m, j) in final_matrix.iter_mut().zip(jumps.matrix_at(jumps.len() - 1)) {
            *m -= j;
        }
    }
    let reference: f64 = (0..d).map(|i| final_matrix[i * d + i]).sum();
    let estimates = qv_via_tv(path, c_grid, None)?
        .iter()
        .map(|e| (0..d).map(|i| e.estimate_final[i * d + i]).sum())
        .collect();
    Ok((estimates, reference, report.converged))
}

fn run_converge(args: ConvergeArgs, cfg: &FileConfig) -> Result<()> {
    let output = require(cfg.fill(args.output, "output")?, "output")?;
    let c_grid = parse_c_grid(&require(cfg.fill(args.c, "c")?, "c")?)?;
    let levels = require(cfg.fill(args.levels, "levels")?, "levels")?;
    let (n_min, n_max) = parse_range_i32(&levels, "levels")?;
    let tol = cfg.fill(args.tol, "tol")?.unwrap_or(1e-9);
    let delta_jump = cfg.fill(args.delta_jump, "delta_jump")?.unwrap_or(0.0);
    let input = cfg.fill(args.input, "input")?;
    let seeds = match cfg.fill(args.seeds, "seeds")? {
        Some(spec) => parse_seeds(&spec)?,
        None => vec![],
    };
    let config = RunConfig {
        command: "converge".into(),
        input: input.as_ref().map(|p| p.display().to_string()),
        output: Some(output.display().to_string()),
        n_min: Some(n_min),
        n_max: Some(n_max),
        c_grid: c_grid.clone(),
        tol: Some(tol),
        seeds: seeds.clone(),
        delta_jump,
        format: "json".into(),
    };
    config.validate()?;

    let paths: Vec<SampledPath> = if args.walk {
        let steps = require(cfg.fill(args.steps, "steps")?, "steps")?;
        let h = require(cfg.fill(args.h, "h")?, "h")?;
        let horizon = cfg.fill(args.horizon, "horizon")?.unwrap_or(1.0);
        let seed_list = if seeds.is_empty() { vec![0] } else { seeds.clone() };
        seed_list
            .iter()
            .map(|&s| synth_walk(steps, horizon, h, s))
            .collect::<Result<_>>()?
    } else {
        let input = require(input, "input")?;
        vec![load_path(&input, None)?]
    };

    use rayon::prelude::*;
    let results: Vec<(Vec<f64>, f64, bool)> = paths
        .par_iter()
        .map(|p| study_single(p, &c_grid, n_min, n_max, tol, delta_jump))
        .collect::<Result<_>>()?;
    let count = results.len() as f64;
    let mut estimate_t = vec![0.0; c_grid.len()];
    let mut reference_t = 0.0;
    let mut all_converged = true;
    for (est, r, conv) in &results {
        for (a, e) in estimate_t.iter_mut().zip(est) {
            *a += e / count;
        }
        reference_t += r / count;
        all_converged &= conv;
    }
    let abs_err = estimate_t.iter().map(|e| (e - reference_t).abs()).collect();

    // partition-independence table on the first study path
    let probe = &paths[0];
    let full = Partition::all_samples(probe);
    let reference_qv = discrete_qv(probe, &full);
    let mut families: Vec<(String, Partition)> = Vec::new();
    for n in n_min..=n_max {
        families.push((format!("lebesgue n={n}"), lebesgue_multi(probe, n)?));
    }
    if probe.dim() == 1 {
        for n in n_min..=n_max.min(8) {
            families.push((format!("drawupdown n={n}"), drawupdown(probe, n)?.combined));
        }
        for n in n_min..=n_max {
            families.push((format!("eps 2^-{n}"), epsilon_partition(probe, 2f64.powi(-n))?));
        }
    }
    let partition_table = partition_independence_study(probe, &families, &reference_qv);

    let body = StudyBody {
        c: c_grid,
        estimate_t,
        reference_t: Some(reference_t),
        abs_err,
        warning: (!all_converged).then(|| "QV reference did not converge within the level range".to_string()),
        partition_table,
    };
    if let Some(csv_out) = cfg.fill(args.table_csv, "table_csv")? {
        study_tables_csv(&body, &csv_out)?;
    }
    write_json(&output, &body, &config)
}

fn run_report(args: ReportArgs, cfg: &FileConfig) -> Result<()> {
    let input = require(cfg.fill(args.input, "input")?, "input")?;
    let output = require(cfg.fill(args.output, "output")?, "output")?;
    let text = fs::read_to_string(&input)?;
    let study: StudyBody = serde_json::from_str(&text)
        .map_err(|e| PathError::InvalidParameter(format!("cannot parse study JSON: {e}")))?;
    study_tables_csv(&study, &output)
}

fn execute(cli: Cli) -> Result<()> {
    if let Ok(raw) = std::env::var("PATHQV_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|_| PathError::InvalidParameter(format!("PATHQV_THREADS: bad value '{raw}'")))?;
        if n == 0 {
            return Err(PathError::InvalidParameter("PATHQV_THREADS must be >= 1".into()));
        }
        // a later identical call is a no-op; ignore the already-initialized error
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Some(fault) = &cli.inject_fault {
        return Err(PathError::InvariantViolation(format!("injected fault: {fault}")));
    }
    let cfg = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Synth(args) => run_synth(args, &cfg),
        Command::Partition(args) => run_partition(args, &cfg),
        Command::Qv(args) => run_qv(args, &cfg),
        Command::Tv(args) => run_tv(args, &cfg),
        Command::Integrate(args) => run_integrate(args, &cfg),
        Command::Converge(args) => run_converge(args, &cfg),
        Command::Report(args) => run_report(args, &cfg),
    }
}

/// Parses `args` (including the program name) and runs the tool.
/// Exit codes: 0 success, 2 validation/input error, 3 internal invariant violation.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e @ PathError::InvariantViolation(_)) => {
            eprintln!("pathqv: {e}");
            eprintln!("pathqv: diagnostic: this indicates an internal bug; please report the full command line");
            3
        }
        Err(e) => {
            eprintln!("pathqv: {e}");
            2
        }
    }
}
