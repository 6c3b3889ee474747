use std::path::PathBuf;

use cardwave::coefficients::DEFAULT_NODES;
use cardwave::CoefficientKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cardwave",
    version,
    about = "Orthonormal spline wavelets built from cardinal B-splines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Euler-Frobenius roots, decay exponent and asymptotic constants.
    Constants(ConstantsArgs),
    /// Coefficient table c, b, a or gamma over [-jmax, jmax].
    Coeffs(CoeffsArgs),
    /// Sample phi, psi or the B-spline on a grid.
    Eval(EvalArgs),
    /// Run the verification battery and write its report.
    Verify(VerifyArgs),
    /// Periodic discrete wavelet transform of a single-column CSV signal.
    Dwt(DwtArgs),
}

/// Options that select the coefficient tables.
#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    /// Spline order.
    #[arg(long)]
    pub m: u32,
    /// Tail tolerance of the coefficient tables.
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    /// Trapezoid nodes for the Fourier-coefficient quadrature.
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    /// Sum c by the binomial series, which allows eps below 1e-12.
    #[arg(long)]
    pub series: bool,
    /// Cache directory; defaults to $CARDWAVE_CACHE_DIR, then the system temp directory.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the table cache.
    #[arg(long, conflicts_with = "refresh_cache")]
    pub no_cache: bool,
    /// Rebuild the tables and overwrite any cached copy.
    #[arg(long)]
    pub refresh_cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    C,
    B,
    A,
    Gamma,
}

impl From<Kind> for CoefficientKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::C => CoefficientKind::C,
            Kind::B => CoefficientKind::B,
            Kind::A => CoefficientKind::A,
            Kind::Gamma => CoefficientKind::Gamma,
        }
    }
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Largest |j| written; defaults to the whole table.
    #[arg(long)]
    pub jmax: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Phi,
    Psi,
    Bspline,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    #[arg(long, value_enum)]
    pub which: Which,
    /// Grid start; defaults to the left end of the certified range (0 for the B-spline).
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    /// Grid end; defaults to the right end of the certified range (m for the B-spline).
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 1.0 / 32.0)]
    pub step: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Report path; the report goes to stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Analyze,
    Synthesize,
}

#[derive(Debug, Args)]
pub struct DwtArgs {
    #[command(flatten)]
    pub build: BuildArgs,
    /// Signal CSV for analysis, transform JSON for synthesis.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Direction::Analyze)]
    pub direction: Direction,
    /// Number of levels; required for analysis.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Filter truncation threshold.
    #[arg(long, default_value_t = 1e-9)]
    pub filter_eps: f64,
    /// Also synthesize and report the relative reconstruction error on stderr.
    #[arg(long)]
    pub round_trip: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
