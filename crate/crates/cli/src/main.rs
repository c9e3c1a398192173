use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

/// Farey arithmetic, tongue atlases and scaling experiments for critical
/// circle maps.
#[derive(Debug, Parser)]
#[command(name = "circlemap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Farey-tree data (code, neighbors, daughters, closest returns).
    Farey(FareyArgs),
    /// Build a tongue atlas.
    Tongues(TonguesArgs),
    /// Harmonic scalings and phase sums over a Farey domain.
    Scalings(ScalingsArgs),
    /// Passage lengths of the saddle-node funnel model.
    Saddle(SaddleArgs),
    /// Dimension estimates of the non-locked parameter set.
    Dimension(DimensionArgs),
    /// Hölder fit of the rotation number and zeta ratios.
    Holder(HolderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Family selector.
    #[arg(long, default_value = "sine-l")]
    family: String,
    /// Critical exponent (odd, >= 3).
    #[arg(long, default_value_t = 3)]
    l: u32,
    /// Parameter resolution of locking intervals.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Worker threads for atlas builds; 0 uses every core.
    #[arg(long, env = "CIRCLEMAP_JOBS", default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct FareyArgs {
    /// Every interior rational with denominator up to this.
    #[arg(long, conflicts_with_all = ["rational", "code"])]
    qmax: Option<u64>,
    /// A single rational `p/q`.
    #[arg(long, conflicts_with = "code")]
    rational: Option<String>,
    /// A single Farey code such as `LRRL`.
    #[arg(long)]
    code: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct TonguesArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Every rational with denominator up to this.
    #[arg(long, conflicts_with = "depth")]
    qmax: Option<u64>,
    /// Harmonic subdivision depth (instead of --qmax).
    #[arg(long)]
    depth: Option<usize>,
    /// Largest |n| of a harmonic pick.
    #[arg(long, default_value_t = 8)]
    cutoff: i64,
    /// Base Farey domain `a/b:c/d` of the harmonic generator.
    #[arg(long, default_value = "0/1:1/1")]
    domain: String,
    /// Deepest level whose endpoints get locking intervals.
    #[arg(long, default_value_t = 0)]
    locking_depth: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct AtlasArgs {
    /// Atlas file; built on the fly when absent.
    #[arg(long)]
    atlas: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Debug, Args)]
struct ScalingsArgs {
    #[command(flatten)]
    atlas: AtlasArgs,
    #[arg(long, default_value = "0/1:1/1")]
    domain: String,
    /// Rows run over n = -nmax..=nmax.
    #[arg(long, default_value_t = 24)]
    nmax: i64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct SaddleArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Comma-separated list of epsilons.
    #[arg(long, value_delimiter = ',', default_value = "1e-3,1e-4,1e-5,1e-6,1e-7")]
    eps: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Box,
    Cover,
    Frostman,
}

#[derive(Debug, Args)]
struct DimensionArgs {
    #[command(flatten)]
    atlas: AtlasArgs,
    #[arg(long, value_enum, default_value_t = Method::Box)]
    method: Method,
    /// Largest denominator whose tongues are removed (box counting).
    #[arg(long, default_value_t = 128)]
    qmax: u64,
    /// Box sizes; defaults to the powers 2^-8..2^-16 above the resolved scale.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Cell depth for the cover-sum and mass checks.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Largest |n| of a harmonic pick.
    #[arg(long, default_value_t = 8)]
    cutoff: i64,
    #[arg(long, default_value = "0/1:1/1")]
    domain: String,
    /// Exponent of the mass distribution check.
    #[arg(long, default_value_t = 0.30)]
    eta: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct HolderArgs {
    #[command(flatten)]
    atlas: AtlasArgs,
    /// Atlas denominator bound when building on the fly.
    #[arg(long, default_value_t = 128)]
    qmax: u64,
    /// Number of dyadic gaps.
    #[arg(long, default_value_t = 10)]
    scales: usize,
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Exponent of the zeta ratios.
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long, default_value = "0/1:1/1")]
    domain: String,
    #[arg(long, default_value_t = 16)]
    nmax: i64,
    #[command(flatten)]
    out: OutArgs,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use circlemap::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::ResolutionExceeded(_) | E::ScaleTooFine { .. } | E::DegenerateInterval(_)) => 3,
        Some(
            E::InvalidArgument(_)
            | E::InvalidRational(_)
            | E::OutsideUnitInterval(_)
            | E::NotFareyDomain { .. }
            | E::CodeTooLong { .. }
            | E::PickTooLarge { .. }
            | E::InvalidCriticalExponent(_)
            | E::UnknownFamily(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Farey(a) => commands::farey(a),
        Command::Tongues(a) => commands::tongues(a),
        Command::Scalings(a) => commands::scalings(a),
        Command::Saddle(a) => commands::saddle(a),
        Command::Dimension(a) => commands::dimension(a),
        Command::Holder(a) => commands::holder(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("circlemap: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
