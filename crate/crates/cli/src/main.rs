//! `rdlab`: growth, norm brackets, witness ratios and the rapid decay checks
//! from the command line.
//!
//! Exit codes: 0 success, 1 verification failure (or cache mismatch),
//! 2 usage error, 3 budget exceeded.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rdlab_core::Error as CoreError;

#[derive(Parser, Debug)]
#[command(name = "rdlab", version, about = "Quantitative rapid decay for concrete groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sphere and ball sizes up to a radius.
    Growth(GrowthArgs),
    /// Operator-norm bracket for one element.
    Norm(NormArgs),
    /// Witness ratio series `‖χ‖_op / ‖χ‖_2` over a range of n.
    Ratio(RatioArgs),
    /// Log-log exponent fit of a ratio series.
    Fit(FitArgs),
    /// The `Z_r(α)` series and its ℓ² bounds.
    Zseries(ZseriesArgs),
    /// Full JSON report: growth, ratio series, fits and constants.
    Report(ReportArgs),
    /// Finite checks; exit code 1 when the expectation is not met.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Ball caches on disk.
    Cache {
        #[command(subcommand)]
        action: CacheCommand,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    Lemma1(Lemma1Args),
    Lemma2(Lemma2Args),
    Doubling(DoublingArgs),
    Heredity(HeredityArgs),
    Divergence(DivergenceArgs),
}

#[derive(Subcommand, Debug)]
enum CacheCommand {
    /// Enumerate `B_N` and write `<dir>/<group>_N<N>.ballcache`.
    Build(CacheArgs),
    /// Re-enumerate and compare with the cache on disk.
    Check(CacheArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceKind {
    /// Verdict on `C_s(n) = ratio(n)/(1+n)^s`.
    Constant,
    /// Partial sums of `|S_n| / (1+n)^{d̂}`.
    Sphere,
    /// The `Z_r(α)` contradiction chain for given s, t, α, β.
    Contradiction,
}

/// Inclusive range `a:b` (or a single `n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Range {
    pub lo: u32,
    pub hi: u32,
}

impl Range {
    pub fn values(&self) -> Vec<u32> {
        (self.lo..=self.hi).collect()
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad range bound {t:?}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(Range { lo, hi })
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Group descriptor: Z, Z^d, H3, F_r, C_m or products like Z^2xC3.
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Artifact path; a `<out>.manifest.json` is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, env = "RDLAB_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Element budget for ball enumeration and trace supports.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct NormOpts {
    /// auto, exact, trace or power.
    #[arg(long, default_value = "auto")]
    pub method: String,
    /// Squaring depth for the trace method.
    #[arg(long, default_value_t = 7)]
    pub depth: u32,
    /// Power-iteration steps.
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    /// Domain radius for power iteration.
    #[arg(long)]
    pub power_radius: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub radius: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct NormArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub norm: NormOpts,
    /// Element JSON file; otherwise `--witness` at `--radius` is used.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "ball")]
    pub witness: String,
    #[arg(long)]
    pub radius: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct RatioArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub norm: NormOpts,
    /// ball, sphere or aN(d).
    #[arg(long, default_value = "ball")]
    pub witness: String,
    #[arg(long, value_parser = parse_range)]
    pub range: Range,
}

#[derive(Args, Debug, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub norm: NormOpts,
    #[arg(long, default_value = "ball")]
    pub witness: String,
    /// Range of n for the series; also the fit window unless `--window` is given.
    #[arg(long, value_parser = parse_range)]
    pub range: Range,
    #[arg(long, value_parser = parse_range)]
    pub window: Option<Range>,
    #[arg(long, value_enum, default_value = "lower")]
    pub side: SideArg,
}

#[derive(Args, Debug, Serialize)]
pub struct ZseriesArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub k: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub norm: NormOpts,
    #[arg(long, value_parser = parse_range)]
    pub range: Range,
    /// Exponents for the constant series (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma1Args {
    #[command(flatten)]
    pub common: Common,
    /// Sweep all n, k with n + k ≤ radius.
    #[arg(long)]
    pub radius: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, value_enum, default_value = "pass")]
    pub expect: Expect,
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma2Args {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum, default_value = "pass")]
    pub expect: Expect,
}

#[derive(Args, Debug, Serialize)]
pub struct DoublingArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum, default_value = "pass")]
    pub expect: Expect,
}

#[derive(Args, Debug, Serialize)]
pub struct HeredityArgs {
    /// `--group` is the ambient group.
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub norm: NormOpts,
    /// Subgroup descriptor.
    #[arg(long)]
    pub sub: String,
    /// Generator image `GEN=IMAGE` in element-key syntax; repeat per generator.
    #[arg(long = "image")]
    pub images: Vec<String>,
    #[arg(long, value_parser = parse_range)]
    pub range: Range,
    /// Subgroup ball radius; defaults to one more than the largest n.
    #[arg(long)]
    pub sub_radius: Option<u32>,
    #[arg(long, value_enum, default_value = "pass")]
    pub expect: Expect,
}

#[derive(Args, Debug, Serialize)]
pub struct DivergenceArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub norm: NormOpts,
    #[arg(long, value_enum, default_value = "constant")]
    pub kind: DivergenceKind,
    #[arg(long, default_value = "ball")]
    pub witness: String,
    #[arg(long, value_parser = parse_range)]
    pub range: Option<Range>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub d_hat: Option<f64>,
    #[arg(long)]
    pub radius: Option<u32>,
    #[arg(long, value_enum, default_value = "pass")]
    pub expect: Expect,
}

#[derive(Args, Debug, Serialize)]
pub struct CacheArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub radius: u32,
}

/// A check whose outcome differed from `--expect`.
#[derive(Debug)]
pub struct VerificationFailure(pub String);

impl std::fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailure {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailure>().is_some() {
        return 1;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::BudgetExceeded { .. }) | Some(CoreError::Overflow(_)) => 3,
        Some(CoreError::DigestMismatch { .. })
        | Some(CoreError::CacheFormat(_))
        | Some(CoreError::DoublingFailed { .. }) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Growth(a) => commands::growth(a),
        Command::Norm(a) => commands::norm(a),
        Command::Ratio(a) => commands::ratio(a),
        Command::Fit(a) => commands::fit(a),
        Command::Zseries(a) => commands::zseries(a),
        Command::Report(a) => commands::report(a),
        Command::Verify { check } => match check {
            VerifyCommand::Lemma1(a) => commands::lemma1(a),
            VerifyCommand::Lemma2(a) => commands::lemma2(a),
            VerifyCommand::Doubling(a) => commands::doubling(a),
            VerifyCommand::Heredity(a) => commands::heredity(a),
            VerifyCommand::Divergence(a) => commands::divergence(a),
        },
        Command::Cache { action } => match action {
            CacheCommand::Build(a) => commands::cache_build(a),
            CacheCommand::Check(a) => commands::cache_check(a),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("rdlab: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
