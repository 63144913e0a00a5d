//! Command-line definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::commands::{self, Ctx};
use crate::config;
use crate::error::{CliError, CliResult};
use crate::report::Output;

#[derive(Debug, Parser)]
#[command(name = "ornstein", version, about = "Numerical experiments on L1 estimates for differential operators")]
pub struct Cli {
    /// JSON file with the same keys as the flags (top level or per command).
    #[arg(long, global = true, env = "ORNSTEIN_CONFIG")]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "ORNSTEIN_THREADS")]
    pub threads: Option<usize>,
    /// Directory for reports, tables and witness fields.
    #[arg(long, global = true, env = "ORNSTEIN_OUT")]
    pub out: Option<PathBuf>,
    /// Replace existing output files.
    #[arg(long, global = true)]
    pub overwrite: bool,
    /// Do not print the JSON report.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pattern, parity, dependence and rank-one span of an operator file.
    Analyze(AnalyzeArgs),
    /// Ratio search across a grid schedule.
    Disprove(DisproveArgs),
    /// Upper estimates of the Bellman function.
    Bellman(BellmanArgs),
    /// Laminate construction and its statistics.
    Laminate(LaminateArgs),
    /// Separately convex linear programs.
    Sepconvex(SepconvexArgs),
    /// The four-dimensional harmonic example.
    R4check(R4Args),
    /// Martingale transform ratios.
    Martingale(MartingaleArgs),
    /// Lower bounds for c_p as p decreases to 1.
    CpScan(CpScanArgs),
    /// The acceptance checks.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    /// Operator file.
    pub ops: Option<PathBuf>,
    /// Sample points for the rank-one span (default |A| + 3).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, env = "ORNSTEIN_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DisproveArgs {
    pub ops: Option<PathBuf>,
    /// Base grid, `32` or `16x256`.
    #[arg(long, env = "ORNSTEIN_GRID")]
    pub grid: Option<String>,
    /// Number of resolutions (at least 3).
    #[arg(long)]
    pub levels: Option<usize>,
    /// Refine axis i by 2^{γ_i} per level, with γ the homogeneity pattern.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub anisotropic: Option<bool>,
    #[arg(long, env = "ORNSTEIN_BUDGET")]
    pub budget: Option<usize>,
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long, env = "ORNSTEIN_SEED")]
    pub seed: Option<u64>,
    /// `fd2`, `fd4`, `fd6`, `fd8` or `spectral`.
    #[arg(long, env = "ORNSTEIN_SCHEME")]
    pub scheme: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BellmanArgs {
    pub ops: Option<PathBuf>,
    /// Comma-separated point of E; omit to sample random points.
    #[arg(long, allow_hyphen_values = true)]
    pub e: Option<String>,
    /// Number of random points when `--e` is absent.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, env = "ORNSTEIN_GRID")]
    pub grid: Option<String>,
    #[arg(long, env = "ORNSTEIN_BUDGET")]
    pub budget: Option<usize>,
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, env = "ORNSTEIN_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "ORNSTEIN_SCHEME")]
    pub scheme: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LaminateArgs {
    pub ops: Option<PathBuf>,
    /// Frequency direction, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Parity reference multi-index (default: first derivative of A).
    #[arg(long)]
    pub alpha0: Option<String>,
    /// Target measure of the bad set.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Overrides the frequency scale derived from delta.
    #[arg(long)]
    pub t: Option<u64>,
    /// Overrides the hat margin derived from delta.
    #[arg(long)]
    pub delta_prime: Option<f64>,
    /// Grid; by default sized from the frequencies.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub points_per_period: Option<f64>,
    #[arg(long, env = "ORNSTEIN_SCHEME")]
    pub scheme: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SepconvexArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    /// Lattice points per axis on each sphere (odd).
    #[arg(long)]
    pub n: Option<usize>,
    /// Layers on each side of the unit sphere.
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub rho: Option<i64>,
    /// Homogeneity orders, comma-separated.
    #[arg(long)]
    pub p: Option<String>,
    /// Objective node in sphere units, e.g. `1,0` or `0.5,1`.
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
    /// Solve once per unit-sphere node.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub sweep: Option<bool>,
    /// Write the program in CPLEX LP format (first p only).
    #[arg(long)]
    pub lp_dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct R4Args {
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub h: Option<f64>,
    /// Smallest distance to the singular axis for sampled points.
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long, env = "ORNSTEIN_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MartingaleArgs {
    /// Multiplier period, repeatable; the first is α¹.
    #[arg(long = "alpha", allow_hyphen_values = true)]
    pub alphas: Option<Vec<String>>,
    /// Comma-separated depths.
    #[arg(long)]
    pub depths: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "ORNSTEIN_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CpScanArgs {
    pub ops: Option<PathBuf>,
    /// Decreasing exponents, comma-separated.
    #[arg(long)]
    pub p_list: Option<String>,
    #[arg(long, env = "ORNSTEIN_GRID")]
    pub grid: Option<String>,
    #[arg(long, env = "ORNSTEIN_BUDGET")]
    pub budget: Option<usize>,
    #[arg(long, env = "ORNSTEIN_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "ORNSTEIN_SCHEME")]
    pub scheme: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SuiteArgs {
    /// Exact and symbolic checks only.
    #[arg(long, conflicts_with = "full")]
    pub fast: bool,
    /// Every check (the default).
    #[arg(long)]
    pub full: bool,
    /// Only checks whose name contains this text.
    #[arg(long)]
    pub filter: Option<String>,
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let file = cli.config.as_deref().map(config::load).transpose()?;
    let ctx = Ctx { output: Output::new(cli.out.clone(), cli.overwrite), quiet: cli.quiet };
    let file = file.as_ref();
    match cli.command {
        Command::Analyze(a) => commands::analyze::run(config::merge(a, file, "analyze")?, &ctx),
        Command::Disprove(a) => commands::disprove::run(config::merge(a, file, "disprove")?, &ctx),
        Command::Bellman(a) => commands::bellman::run(config::merge(a, file, "bellman")?, &ctx),
        Command::Laminate(a) => commands::laminate::run(config::merge(a, file, "laminate")?, &ctx),
        Command::Sepconvex(a) => commands::sepconvex::run(config::merge(a, file, "sepconvex")?, &ctx),
        Command::R4check(a) => commands::r4check::run(config::merge(a, file, "r4check")?, &ctx),
        Command::Martingale(a) => commands::martingale::run(config::merge(a, file, "martingale")?, &ctx),
        Command::CpScan(a) => commands::cp_scan::run(config::merge(a, file, "cp-scan")?, &ctx),
        Command::Suite(a) => commands::suite::run(a, &ctx),
    }
}
