use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cyclofloc::pipeline::ColumnSelector;
use cyclofloc::Measure;

#[derive(Debug, Parser)]
#[command(name = "cyclofloc", version, about = "FLOC-based dependence analysis of heavy-tailed periodic time series")]
pub struct Cli {
    /// Worker threads for Monte Carlo loops (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Skip the on-disk calibration cache.
    #[arg(long, global = true)]
    pub no_cache: bool,

    /// Calibration cache directory (overrides CYCLOFLOC_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Simulate a periodic ARMA or i.p.d. stable trajectory.
    Simulate(SimulateArgs),
    /// Sample peFLOACVF / peFLOACF / peFLOPACF table.
    Measure(MeasureArgs),
    /// Portmanteau test for periodic white noise.
    Test(TestArgs),
    /// Identify seasonal PAR or PMA orders.
    Identify(IdentifyArgs),
    /// Identify, fit a PAR model and test its residuals.
    Fit(FitArgs),
    /// Monte Carlo power or order-identification grids.
    Replicate(ReplicateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimFamily {
    Par,
    Pma,
    Ipd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderFamily {
    Par,
    Pma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Figure {
    #[value(name = "power-par")]
    PowerPar,
    #[value(name = "power-pma")]
    PowerPma,
    #[value(name = "order-par")]
    OrderPar,
    #[value(name = "order-pma")]
    OrderPma,
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// Output file; a manifest is written next to it as <out>.manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct Input {
    /// Headed CSV with the observations.
    #[arg(long)]
    pub input: PathBuf,
    /// Column index (0-based) or header name; default `value` or the only column.
    #[arg(long, default_value = "auto", value_parser = parse_column)]
    pub column: ColumnSelector,
    /// Period T.
    #[arg(long = "T", visible_alias = "period")]
    pub period: usize,
    /// Log-transform and centre each season by its Huber location first.
    #[arg(long)]
    pub log_huber: bool,
}

fn parse_column(s: &str) -> Result<ColumnSelector, String> {
    s.parse().map_err(|e: std::convert::Infallible| e.to_string())
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "par", conflicts_with = "model")]
    pub family: SimFamily,
    /// Period T.
    #[arg(long = "T", visible_alias = "period", default_value_t = 2)]
    pub period: usize,
    /// AR coefficients, season-major: φ_1(1)..φ_p(1), φ_1(2)..; length T·p.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<f64>,
    /// MA coefficients, season-major; length T·q.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    /// Innovation scale: one value or one per season.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub sigma: Vec<f64>,
    #[arg(long, default_value_t = 1.7)]
    pub alpha: f64,
    /// Sample length NT (a multiple of T).
    #[arg(long, default_value_t = 1000)]
    pub nt: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Model JSON (`period`, `ar`, `ma`, `innovation`) instead of inline flags.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Discarded warm-up cycles (default 50T + 10(p+q) samples, rounded up to cycles).
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_parser = parse_measure, default_value = "pefloacf")]
    pub measure: Measure,
    /// Exponent A (default 1 for peflopacf, else 0.8).
    #[arg(long = "A")]
    pub a_exp: Option<f64>,
    /// Exponent B (default 0.6 for peflopacf, else 0.8).
    #[arg(long = "B")]
    pub b_exp: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub hmax: usize,
    /// Stability index; enables the moment check A + B < α and null bands.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Add i.i.d. null bands at this level (needs --alpha).
    #[arg(long, requires = "alpha")]
    pub d: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: cyclofloc::Error| e.to_string())
}

#[derive(Debug, Args, Serialize)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "A", default_value_t = 0.8)]
    pub a_exp: f64,
    #[arg(long = "B", default_value_t = 0.8)]
    pub b_exp: f64,
    #[arg(long, default_value_t = 3)]
    pub hmax: usize,
    /// Global significance level c.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[arg(long, default_value_t = 2000)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct IdentifyArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value = "par")]
    pub family: OrderFamily,
    #[arg(long)]
    pub alpha: f64,
    /// Exponent A (PMA only; PAR uses A = 1).
    #[arg(long = "A", default_value_t = 0.8)]
    pub a_exp: f64,
    /// Exponent B (default 0.6 for PAR, 0.8 for PMA).
    #[arg(long = "B")]
    pub b_exp: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub hmax: usize,
    #[arg(long, default_value_t = 0.99)]
    pub d: f64,
    #[arg(long, default_value_t = 2000)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub alpha: f64,
    /// Exponent B of the partial autocorrelation used to identify and fit.
    #[arg(long = "B", default_value_t = 0.6)]
    pub b_exp: f64,
    /// Largest lag examined during identification.
    #[arg(long, default_value_t = 10)]
    pub hmax: usize,
    #[arg(long, default_value_t = 0.99)]
    pub d: f64,
    /// Fixed seasonal orders p(1),..,p(T); skips identification.
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<usize>>,
    /// Exponents and lags of the residual portmanteau test.
    #[arg(long = "test-A", default_value_t = 0.8)]
    pub test_a: f64,
    #[arg(long = "test-B", default_value_t = 0.8)]
    pub test_b: f64,
    #[arg(long = "test-hmax", default_value_t = 3)]
    pub test_hmax: usize,
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[arg(long, default_value_t = 2000)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplicateArgs {
    #[arg(long, value_enum)]
    pub figure: Figure,
    #[arg(long, default_value_t = 1000)]
    pub nt: usize,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 2000)]
    pub m: usize,
    /// Coefficient values per axis (default -0.9,-0.7,..,0.9).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coefs: Vec<f64>,
    #[arg(long, default_value_t = 1.7)]
    pub alpha: f64,
    /// Override the figure's exponent A.
    #[arg(long = "A")]
    pub a_exp: Option<f64>,
    /// Override the figure's exponent B.
    #[arg(long = "B")]
    pub b_exp: Option<f64>,
    #[arg(long)]
    pub hmax: Option<usize>,
    /// Override c (power figures) or d (order figures).
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}
