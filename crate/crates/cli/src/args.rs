//! Command-line grammar. Every numeric flag is range-checked here, before
//! any file is read or any computation starts.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scalefit_core::cumulant::{DEFAULT_MAX_ORDER, MAX_ORDER};
use scalefit_core::scaling::{DEFAULT_WINDOW_WIDTH, MIN_FIT_POINTS};
use scalefit_core::synth::MIN_LENGTH_EXPONENT;
use scalefit_core::wavelet::WaveletFamily;

#[derive(Debug, Parser)]
#[command(
    name = "scalefit",
    version,
    about = "Synthesize self-similar and multifractal traces and estimate scale-dependent Hurst exponents",
    after_help = "Exit status: 0 success, 1 estimation or computation failure, 2 invalid usage or input.\n\
                  Set SCALEFIT_FIXED_CLOCK to an RFC 3339 timestamp to make every output byte-reproducible."
)]
pub struct Cli {
    /// Print extra diagnostics to standard error.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic trace and its metadata sidecar.
    Generate(GenerateArgs),
    /// Block-sum a trace over non-overlapping blocks of one size.
    Aggregate(AggregateArgs),
    /// Tabulate sample cumulants of the aggregated series at dyadic scales.
    Cumulants(CumulantArgs),
    /// Estimate the Hurst exponent of a trace.
    Hurst(HurstArgs),
    /// Sliding-window Hurst estimates and knee detection.
    Locality(LocalityArgs),
    /// Wavelet logscale diagram and its Hurst estimate.
    Wavelet(WaveletArgs),
    /// Write every analysis of a trace into one directory with a manifest.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Fractional Gaussian noise.
    Fgn,
    /// Conservative binomial cascade measure.
    Cascade,
    /// fGn modulated by a cascade.
    Multifractal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HurstMethod {
    /// Log-log slope of |cum_m X^(n)| against the block size n.
    Cumulant,
    /// Variance of block means against the block size.
    Variance,
    /// Weighted slope of the wavelet logscale diagram.
    Wavelet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LocalityMethod {
    Cumulant,
    Wavelet,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value_t = Model::Fgn)]
    pub model: Model,

    /// Hurst exponent of the fGn component, in (0, 1).
    #[arg(long, default_value_t = 0.7, value_parser = parse_hurst, allow_negative_numbers = true)]
    pub hurst: f64,

    /// Number of samples; a power of two, at least 16.
    #[arg(long, default_value_t = 65536, value_parser = parse_length)]
    pub length: usize,

    /// Marginal variance of the fGn increments.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive, allow_negative_numbers = true)]
    pub variance: f64,

    /// Cascade multiplier law W ~ Beta(a, a); larger a is closer to an even split.
    #[arg(long, default_value_t = 2.0, value_parser = parse_positive, allow_negative_numbers = true, conflicts_with = "equal_split")]
    pub shape: f64,

    /// Split every cascade cell exactly in half (the monofractal limit).
    #[arg(long)]
    pub equal_split: bool,

    /// Total mass of the cascade measure.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive, allow_negative_numbers = true)]
    pub mass: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Seed of the cascade stream in a multifractal trace [default: seed + 1].
    #[arg(long)]
    pub cascade_seed: Option<u64>,

    /// Trace CSV to write; metadata goes to <OUT>.meta.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub input: PathBuf,

    /// Block size n >= 1; trailing samples that do not fill a block are dropped.
    #[arg(long, value_parser = parse_scale)]
    pub scale: usize,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CumulantArgs {
    #[arg(long)]
    pub input: PathBuf,

    /// Highest cumulant order; higher orders need far more blocks to resolve.
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER, value_parser = parse_max_order)]
    pub max_order: u32,

    /// Comma-separated block sizes [default: 1, 2, 4, ... keeping >= 8 blocks].
    #[arg(long, value_delimiter = ',', value_parser = parse_scale)]
    pub scales: Option<Vec<usize>>,

    /// Write the table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Octave window for the log-log fits.
#[derive(Debug, Args, Clone, Copy)]
pub struct OctaveArgs {
    /// Finest octave log2 n of the fit [default: finest table scale].
    #[arg(long)]
    pub lo: Option<u32>,

    /// Coarsest octave of the fit [default: coarsest scale with >= 256 blocks].
    #[arg(long)]
    pub hi: Option<u32>,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct WaveletFlags {
    /// Wavelet family: haar or daubechies4.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<WaveletFamily>,

    /// Decomposition depth [default: log2 N - 3, keeping >= 8 coarse coefficients].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub levels: Option<u32>,
}

#[derive(Debug, Args)]
pub struct HurstArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = HurstMethod::Cumulant)]
    pub method: HurstMethod,

    /// Fit a single cumulant order instead of the whole H(m) spectrum.
    #[arg(long, value_parser = parse_order)]
    pub order: Option<u32>,

    /// Highest order of the H(m) spectrum [default: 4].
    #[arg(long, value_parser = parse_max_order)]
    pub max_order: Option<u32>,

    #[command(flatten)]
    pub octaves: OctaveArgs,

    #[command(flatten)]
    pub wavelet: WaveletFlags,

    /// First octave of the wavelet fit [default: 3, skipping the finest octaves].
    #[arg(long)]
    pub j1: Option<u32>,

    /// Last octave of the wavelet fit [default: levels - 1].
    #[arg(long)]
    pub j2: Option<u32>,

    /// Write the estimates as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LocalityArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = LocalityMethod::Cumulant)]
    pub method: LocalityMethod,

    /// Cumulant order of the curve [default: 2].
    #[arg(long, value_parser = parse_order)]
    pub order: Option<u32>,

    /// Octaves per sliding window; three is the fewest a line fit can use.
    #[arg(long, default_value_t = DEFAULT_WINDOW_WIDTH, value_parser = parse_window)]
    pub window: u32,

    /// Smallest relative SSE reduction of a two-segment fit reported as a knee.
    #[arg(long, default_value_t = 0.2, value_parser = parse_fraction, allow_negative_numbers = true)]
    pub knee_threshold: f64,

    #[command(flatten)]
    pub wavelet: WaveletFlags,

    /// Locality curve CSV to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WaveletArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[command(flatten)]
    pub wavelet: WaveletFlags,

    #[arg(long)]
    pub j1: Option<u32>,

    #[arg(long)]
    pub j2: Option<u32>,

    /// Write the logscale diagram as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub input: PathBuf,

    /// Directory to create or fill.
    #[arg(long)]
    pub out_dir: PathBuf,

    #[arg(long, default_value_t = DEFAULT_MAX_ORDER, value_parser = parse_max_order)]
    pub max_order: u32,

    #[arg(long, default_value_t = DEFAULT_WINDOW_WIDTH, value_parser = parse_window)]
    pub window: u32,

    #[arg(long, default_value_t = 0.2, value_parser = parse_fraction, allow_negative_numbers = true)]
    pub knee_threshold: f64,

    #[arg(long, default_value = "daubechies4", value_parser = parse_family)]
    pub family: WaveletFamily,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not finite"))
    }
}

fn parse_hurst(s: &str) -> Result<f64, String> {
    let h = parse_f64(s)?;
    if h > 0.0 && h < 1.0 {
        Ok(h)
    } else {
        Err(format!("{h} is outside the open interval (0, 1)"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be > 0"))
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn parse_length(s: &str) -> Result<usize, String> {
    let n: usize = s.trim().parse().map_err(|_| format!("{s:?} is not a length"))?;
    let min = 1usize << MIN_LENGTH_EXPONENT;
    if n.is_power_of_two() && n >= min {
        Ok(n)
    } else {
        Err(format!("{n} is not a power of two >= {min}"))
    }
}

fn parse_scale(s: &str) -> Result<usize, String> {
    let n: usize = s.trim().parse().map_err(|_| format!("{s:?} is not a block size"))?;
    if n >= 1 {
        Ok(n)
    } else {
        Err("block size must be >= 1".into())
    }
}

fn parse_order(s: &str) -> Result<u32, String> {
    let m: u32 = s.trim().parse().map_err(|_| format!("{s:?} is not an order"))?;
    if (1..=MAX_ORDER).contains(&m) {
        Ok(m)
    } else {
        Err(format!("{m} is outside 1..={MAX_ORDER}"))
    }
}

fn parse_max_order(s: &str) -> Result<u32, String> {
    let m = parse_order(s)?;
    if m >= 2 {
        Ok(m)
    } else {
        Err("the highest order must be >= 2".into())
    }
}

fn parse_window(s: &str) -> Result<u32, String> {
    let w: u32 = s.trim().parse().map_err(|_| format!("{s:?} is not a width"))?;
    if w as usize >= MIN_FIT_POINTS {
        Ok(w)
    } else {
        Err(format!("window width {w} is below the minimum width {MIN_FIT_POINTS}"))
    }
}

fn parse_family(s: &str) -> Result<WaveletFamily, String> {
    s.parse()
}
