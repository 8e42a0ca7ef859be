mod commands;
mod suites;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use simplex_lab::Error;

/// Sample, transform and verify quasi-Bernoulli and Dirichlet laws on the simplex.
#[derive(Debug, Parser)]
#[command(name = "simplex-lab", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed of the random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Stream id under the seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub stream: u64,

    /// Output format for sampled points.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw points from one of the supported laws.
    Sample(SampleArgs),
    /// Evaluate `E <f,X>^{-c}` in closed form and optionally by simulation.
    Tc(TcArgs),
    /// Print face weights of `B_k(a)` or dimension weights of `nu_{c,d}`.
    Weights(WeightsArgs),
    /// Run the affine Markov chain or its backward series.
    Chain(ChainArgs),
    /// Draw quasi-Bernoulli random probabilities on [0, 1].
    Process(ProcessArgs),
    /// Run a verification suite and print one JSON report per check.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Dirichlet,
    Bernoulli,
    QbMixture,
    QbEwens,
    FaceUniform,
    Nu,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub dist: Dist,

    /// Dirichlet parameters, comma separated or repeated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a: Vec<f64>,

    /// Order of the quasi-Bernoulli law, or face dimension for face-uniform.
    #[arg(long, conflicts_with = "c")]
    pub k: Option<u32>,

    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,

    /// Simplex dimension (number of coordinates minus one).
    #[arg(long)]
    pub d: Option<usize>,

    #[arg(short, long, default_value_t = 1000)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TcDist {
    Dirichlet,
    Qb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Compositions,
    Partitions,
    Both,
}

#[derive(Debug, Args)]
pub struct TcArgs {
    #[arg(long, value_enum)]
    pub dist: TcDist,

    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub a: Vec<f64>,

    #[arg(long, conflicts_with = "c")]
    pub k: Option<u32>,

    /// Exponent for the Dirichlet transform; defaults to the total mass.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,

    /// Evaluation vector, strictly positive.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub f: Vec<f64>,

    /// Closed-form route for `--dist qb`; defaults to compositions.
    #[arg(long, value_enum)]
    pub method: Option<Method>,

    /// Also estimate the transform from this many draws.
    #[arg(long)]
    pub mc: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "k")]
    pub a: Vec<f64>,

    #[arg(long, conflicts_with = "c", requires = "a")]
    pub k: Option<u32>,

    #[arg(long, allow_negative_numbers = true, requires = "d")]
    pub c: Option<f64>,

    #[arg(long, requires = "c")]
    pub d: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Mixture,
    Ewens,
}

impl From<Route> for simplex_lab::QbRoute {
    fn from(r: Route) -> Self {
        match r {
            Route::Mixture => simplex_lab::QbRoute::Mixture,
            Route::Ewens => simplex_lab::QbRoute::Ewens,
        }
    }
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub a: Vec<f64>,

    #[arg(long)]
    pub k: u32,

    #[arg(short, long, default_value_t = 1000)]
    pub n: usize,

    #[arg(long, default_value_t = simplex_lab::chain::DEFAULT_BURN_IN)]
    pub burn_in: usize,

    #[arg(long, default_value_t = simplex_lab::chain::DEFAULT_THIN)]
    pub thin: usize,

    /// Starting point; defaults to the barycenter.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,

    #[arg(long, value_enum, default_value = "mixture")]
    pub route: Route,

    /// Emit independent backward-series draws instead of a chain path.
    #[arg(long)]
    pub backward: bool,

    /// Truncation level of the backward series.
    #[arg(long, default_value_t = 1e-12, requires = "backward")]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    /// Total mass of the base measure.
    #[arg(long)]
    pub mass: f64,

    /// `uniform`, `beta:P,Q`, or `cdf:X0:Y0,X1:Y1,...` (piecewise-linear CDF knots).
    #[arg(long, default_value = "uniform")]
    pub base: String,

    #[arg(short, long)]
    pub k: u32,

    #[arg(short, long, default_value_t = 1000)]
    pub n: usize,

    /// Bin edges covering [0, 1]; emits binned probability vectors.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub bins: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Core,
    Transforms,
    Chain,
    Process,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,

    /// Sample size of the Monte Carlo checks.
    #[arg(short, long, default_value_t = 100_000)]
    pub n: usize,
}

/// A failure mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Nonexistence(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotAProbability { .. } => Failure::Nonexistence(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("SIMPLEX_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Usage(format!("SIMPLEX_LAB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| commands::run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Nonexistence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
