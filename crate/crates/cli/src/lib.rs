//! Commands behind the `mttd3r` binary.
//!
//! Every command is a plain function over parsed arguments, so the binary and
//! the tests drive the same code.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mttd3r::io::{
    cloud_preset_mask, import_image_stack, read_t3b_mask, read_t3b_tensor, write_t3b_mask,
    write_t3b_tensor, CloudPreset, ReportWriter,
};
use mttd3r::prelude::*;
use mttd3r::solver::ranks_from_energy;
use serde::Serialize;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] mttd3r::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use mttd3r::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => EXIT_IO,
            CliError::Core(e) => match e {
                E::NonFinite { .. } => EXIT_SOLVER,
                E::Io(_)
                | E::Csv(_)
                | E::BadMagic { .. }
                | E::Truncated { .. }
                | E::DimOverflow(_)
                | E::PayloadKind { .. }
                | E::TrailingBytes(_)
                | E::MaskByte(_)
                | E::Image(_) => EXIT_IO,
                _ => EXIT_CONFIG,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "mttd3r",
    version,
    about = "Low-MTT-rank tensor completion with smoothness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an observation mask.
    Mask(MaskArgs),
    /// Complete a partially observed tensor.
    Complete(CompleteArgs),
    /// Score a recovered tensor against the truth.
    Eval(EvalArgs),
    /// Run mask, complete and eval over datasets, sampling rates and seeds.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
#[group(skip)]
pub struct MaskSourceArgs {
    /// Observed-entry probability of a random mask.
    #[arg(
        long,
        requires = "seed",
        conflicts_with = "cloud",
        required_unless_present = "cloud"
    )]
    pub rate: Option<f64>,
    /// Seed of the random mask.
    #[arg(long, requires = "rate")]
    pub seed: Option<u64>,
    /// Cloud preset: case1, case2 or case3.
    #[arg(long)]
    pub cloud: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct MaskArgs {
    /// Dimensions as I1xI2xI3.
    #[arg(long)]
    pub dims: String,
    #[command(flatten)]
    pub source: MaskSourceArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Mode weights a1,a2,a3.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Smoothness weights w1,w2,w3.
    #[arg(long)]
    pub w: Option<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = mttd3r::solver::DEFAULT_RHO)]
    pub rho: f64,
    /// Rank pairs per mode: r11,r21;r12,r22;r13,r23.
    #[arg(long, conflicts_with = "energy", required_unless_present = "energy")]
    pub ranks: Option<String>,
    /// Pick ranks covering this fraction of the spectral energy of the observations.
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long, default_value_t = mttd3r::solver::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = mttd3r::solver::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Always take the projected tensor step, without the descent safeguard.
    #[arg(long)]
    pub plain_a_step: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompleteArgs {
    /// A .t3b tensor, or one or more .pgm/.ppm images stacked as bands.
    #[arg(long = "in", required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Observation mask (.t3b).
    #[arg(long)]
    pub mask: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-sweep objective and stopping statistic as CSV.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub recovered: Vec<PathBuf>,
    #[arg(long, required = true, num_args = 1..)]
    pub truth: Vec<PathBuf>,
    /// Row label; defaults to the file stem of the recovered tensor.
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Dataset: a .t3b tensor or a .pgm/.ppm image. Repeatable.
    #[arg(long = "data")]
    pub data: Vec<PathBuf>,
    #[arg(long, default_value = "0.05,0.10,0.15")]
    pub rates: String,
    #[arg(long, default_value = "0")]
    pub seeds: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Mask(a) => cmd_mask(&a),
        Command::Complete(a) => {
            let manifest = cmd_complete(&a)?;
            println!("{}", serde_json::to_string_pretty(&manifest)?);
            Ok(())
        }
        Command::Eval(a) => cmd_eval(&a).map(|_| ()),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_dims(s: &str) -> CliResult<[usize; 3]> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let bad = || {
        config_err(format!(
            "dims must look like I1xI2xI3 with positive sizes, got {s:?}"
        ))
    };
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|_| bad())?;
        if *o == 0 {
            return Err(bad());
        }
    }
    Ok(out)
}

pub fn parse_triple(name: &str, s: &str) -> CliResult<[f64; 3]> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| {
            config_err(format!(
                "--{name} must be three comma-separated numbers, got {s:?}"
            ))
        })?;
    <[f64; 3]>::try_from(vals)
        .map_err(|_| config_err(format!("--{name} needs exactly three values, got {s:?}")))
}

/// Parses `r11,r21;r12,r22;r13,r23`.
pub fn parse_ranks(s: &str) -> CliResult<MttRank> {
    let bad = || {
        config_err(format!(
            "--ranks must look like r11,r21;r12,r22;r13,r23, got {s:?}"
        ))
    };
    let pairs: Vec<(usize, usize)> = s
        .split(';')
        .map(|pair| {
            let (a, b) = pair.split_once(',').ok_or_else(bad)?;
            Ok((
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect::<CliResult<_>>()?;
    Ok(MttRank(
        <[(usize, usize); 3]>::try_from(pairs).map_err(|_| bad())?,
    ))
}

fn parse_list<T: std::str::FromStr>(name: &str, s: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|v| v.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| config_err(format!("--{name}: cannot parse {s:?}")))
}

fn is_image(p: &Path) -> bool {
    matches!(
        p.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("pgm" | "ppm")
    )
}

/// Loads a single `.t3b` tensor or a stack of netpbm images.
pub fn load_tensor(paths: &[PathBuf]) -> CliResult<Tensor3> {
    match paths {
        [] => Err(config_err("no input files")),
        [p] if !is_image(p) => Ok(read_t3b_tensor(p)?),
        _ if paths.iter().all(|p| is_image(p)) => Ok(import_image_stack(paths)?.0),
        _ => Err(config_err(
            "inputs must be one .t3b file or only .pgm/.ppm images",
        )),
    }
}

pub fn build_mask(dims: [usize; 3], source: &MaskSourceArgs) -> CliResult<ObservationMask> {
    match (source.rate, source.seed, &source.cloud) {
        (Some(p), Some(seed), None) => Ok(random_mask(dims, p, seed)?),
        (None, None, Some(preset)) => Ok(cloud_preset_mask(dims, preset.parse::<CloudPreset>()?)?),
        _ => Err(config_err(
            "give exactly one mask source: --rate with --seed, or --cloud",
        )),
    }
}

pub fn cmd_mask(args: &MaskArgs) -> CliResult<()> {
    let mask = build_mask(parse_dims(&args.dims)?, &args.source)?;
    write_t3b_mask(&args.out, &mask)?;
    Ok(())
}

/// Rank specification as resolved for a run.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigManifest {
    pub alpha: [f64; 3],
    pub w: [f64; 3],
    pub mu: f64,
    pub rho: f64,
    pub ranks: [(usize, usize); 3],
    pub energy: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub safeguard: bool,
}

/// Settings before ranks are resolved against data.
fn base_config(args: &SolverArgs) -> CliResult<SolverConfig> {
    let mut cfg = SolverConfig::new(MttRank([(1, 1); 3]));
    if let Some(a) = &args.alpha {
        cfg.alphas = parse_triple("alpha", a)?;
    }
    if let Some(w) = &args.w {
        cfg.smooth.w = parse_triple("w", w)?;
    }
    if let Some(mu) = args.mu {
        cfg.smooth.mu = mu;
    }
    cfg.rho = args.rho;
    cfg.tol = args.tol;
    cfg.max_iter = args.max_iter;
    cfg.monotone_a = !args.plain_a_step;
    if let Some(e) = args.energy {
        if !(e > 0.0 && e <= 1.0) {
            return Err(config_err(format!("--energy must lie in (0, 1], got {e}")));
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_config(
    args: &SolverArgs,
    m: &Tensor3,
    mask: &ObservationMask,
) -> CliResult<SolverConfig> {
    let mut cfg = base_config(args)?;
    cfg.ranks = match (&args.ranks, args.energy) {
        (Some(r), None) => parse_ranks(r)?,
        (None, Some(e)) => ranks_from_energy(m, mask, e)?,
        _ => return Err(config_err("give exactly one of --ranks or --energy")),
    };
    Ok(cfg)
}

fn config_manifest(cfg: &SolverConfig, energy: Option<f64>) -> ConfigManifest {
    ConfigManifest {
        alpha: cfg.alphas,
        w: cfg.smooth.w,
        mu: cfg.smooth.mu,
        rho: cfg.rho,
        ranks: cfg.ranks.0,
        energy,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        safeguard: cfg.monotone_a,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub input: Vec<PathBuf>,
    pub mask: PathBuf,
    pub config: ConfigManifest,
    pub out: PathBuf,
    pub history: Option<PathBuf>,
    pub iterations: usize,
    pub converged: bool,
    pub seconds: f64,
}

fn write_history(path: &Path, report: &SolveReport) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(File::create(path)?);
    w.write_record(["iteration", "objective", "step_sq", "stop_stat"])?;
    for k in 0..report.stop_stat_history.len() {
        let obj = report
            .objective_history
            .get(k + 1)
            .map(|v| format!("{v:e}"))
            .unwrap_or_default();
        w.write_record([
            (k + 1).to_string(),
            obj,
            format!("{:e}", report.step_sq_history[k]),
            format!("{:e}", report.stop_stat_history[k]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_complete(args: &CompleteArgs) -> CliResult<RunManifest> {
    let m = load_tensor(&args.input)?;
    let mask = read_t3b_mask(&args.mask)?;
    if mask.dims() != m.dims() {
        return Err(config_err(format!(
            "mask dims {:?} do not match input dims {:?}",
            mask.dims(),
            m.dims()
        )));
    }
    let cfg = resolve_config(&args.solver, &m, &mask)?;
    let report = solve(&m, &mask, &cfg)?;
    write_t3b_tensor(&args.out, &report.recovered)?;
    if let Some(h) = &args.history {
        write_history(h, &report)?;
    }
    Ok(RunManifest {
        command: "complete",
        input: args.input.clone(),
        mask: args.mask.clone(),
        config: config_manifest(&cfg, args.solver.energy),
        out: args.out.clone(),
        history: args.history.clone(),
        iterations: report.iterations,
        converged: report.converged,
        seconds: report.wall_time.as_secs_f64(),
    })
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn cmd_eval(args: &EvalArgs) -> CliResult<QualityReport> {
    let recovered = load_tensor(&args.recovered)?;
    let truth = load_tensor(&args.truth)?;
    let report = quality_report(&recovered, &truth)?;
    let label = args
        .label
        .clone()
        .unwrap_or_else(|| stem(&args.recovered[0]));
    let mut w = ReportWriter::new(File::create(&args.out)?)?;
    w.write_report(&label, &report, None)?;
    w.finish()?.flush()?;
    Ok(report)
}

/// Mean MPSNR, MSSIM and wall time of one dataset at one rate over all seeds.
fn bench_cell(
    truth: &Tensor3,
    rate: f64,
    seeds: &[u64],
    args: &SolverArgs,
) -> CliResult<(f64, f64, f64)> {
    let (mut p, mut s, mut t) = (0.0, 0.0, 0.0);
    for &seed in seeds {
        let start = Instant::now();
        let mask = random_mask(truth.dims(), rate, seed)?;
        let observed = mask.project(truth)?;
        let cfg = resolve_config(args, &observed, &mask)?;
        let rep = solve(&observed, &mask, &cfg)?;
        let q = quality_report(&rep.recovered, truth)?;
        t += start.elapsed().as_secs_f64();
        p += q.mpsnr;
        s += q.mssim;
    }
    let n = seeds.len() as f64;
    Ok((p / n, s / n, t / n))
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    let rates: Vec<f64> = parse_list("rates", &args.rates)?;
    let seeds: Vec<u64> = parse_list("seeds", &args.seeds)?;
    if seeds.is_empty() {
        return Err(config_err("--seeds must not be empty"));
    }
    base_config(&args.solver)?;
    let mut w = ReportWriter::new(File::create(&args.out)?)?;
    for path in &args.data {
        let truth = load_tensor(std::slice::from_ref(path));
        for &rate in &rates {
            let label = format!("{}_p{rate:.2}", stem(path));
            let cell = truth
                .as_ref()
                .map_err(|e| config_err(e.to_string()))
                .and_then(|t| bench_cell(t, rate, &seeds, &args.solver));
            match cell {
                Ok((p, s, t)) => w.write_summary(&label, p, s, Some(t))?,
                Err(e) => {
                    eprintln!("{label}: {e}");
                    w.write_failed(&label, None)?;
                }
            }
        }
    }
    w.finish()?.flush()?;
    Ok(())
}
