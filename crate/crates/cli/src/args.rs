use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "recspec",
    version,
    about = "Recurrence spectra of expanding Markov interval maps",
    after_help = "A run can also be described in a TOML file: `recspec --config run.toml`."
)]
pub struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "recspec-out")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Validate the configuration and print the resolved plan without computing.
    #[arg(long, global = true)]
    pub dry_run: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Pressure of `-s log|Df|` on the map's shift, or of a potential file on any shift.
    Pressure(PressureArgs),
    /// Bowen dimension of the repeller.
    Dimension(DimensionArgs),
    /// Pressure on the survivor of a family of holes, `n = 1..=n_max`.
    Holes(HolesArgs),
    /// Build a point with prescribed lower and upper recurrence rates.
    Construct(ConstructArgs),
    /// Estimate recurrence rates of a point or a coding word.
    Recurrence(RecurrenceArgs),
    /// Rate and dimension experiments.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
    /// Exactness checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args, Debug, Serialize)]
pub struct MapArg {
    /// Preset name (doubling, cantor3, slopes24, golden, sine-doubling) or a TOML map file.
    #[arg(long, default_value = "doubling")]
    pub map: String,
}

#[derive(Args, Debug, Serialize)]
pub struct PressureArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Multiplier `s` of `-log|Df|`.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Block level of the derivative potential.
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    /// Adjacency-list shift file; with it the potential is zero unless `--potential` is given.
    #[arg(long)]
    pub shift: Option<PathBuf>,
    /// `block,value` CSV potential on `--shift`.
    #[arg(long, requires = "shift")]
    pub potential: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub map: MapArg,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HoleFamily {
    /// `[1^n]`.
    Ones,
    /// Long first returns to the base cylinder, `t >= n`.
    LongReturns,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HolePotential {
    /// Topological pressure.
    Zero,
    /// `-dim log|Df|`.
    Geometric,
}

#[derive(Args, Debug, Serialize)]
pub struct HolesArgs {
    #[command(flatten)]
    pub map: MapArg,
    #[arg(long, value_enum, default_value_t = HoleFamily::Ones)]
    pub family: HoleFamily,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = HolePotential::Zero)]
    pub potential: HolePotential,
}

#[derive(Args, Debug, Serialize)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Lower rate.
    #[arg(long)]
    pub alpha: f64,
    /// Upper rate; `inf` for an infinite upper rate.
    #[arg(long)]
    pub beta: f64,
    /// Return-time bound of the source.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Base symbols of the constructed word.
    #[arg(long, default_value_t = 1_000_000)]
    pub horizon: usize,
    /// Allowed gap between the sampled Birkhoff averages and their expected values.
    #[arg(long, default_value_t = 0.01)]
    pub birkhoff_tolerance: f64,
    /// First index of the inserted-block sequence.
    #[arg(long, default_value_t = 2)]
    pub n0: usize,
    /// Also write the coding word.
    #[arg(long)]
    pub save_word: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Geometric,
    Symbolic,
}

#[derive(Args, Debug, Serialize)]
pub struct RecurrenceArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Interval point, iterated forward.
    #[arg(long, group = "input")]
    pub point: Option<f64>,
    /// File holding a coding word (digits or letters, whitespace ignored).
    #[arg(long, group = "input")]
    pub word_file: Option<PathBuf>,
    /// Draw a word from the Bernoulli-type measure with these symbol weights.
    #[arg(long, group = "input", value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1_000_000)]
    pub horizon: usize,
    #[arg(long, value_enum, default_value_t = Route::Geometric)]
    pub route: Route,
    /// Radii `2^-j` for `j` in `j_min..=j_max` on the geometric route.
    #[arg(long, default_value_t = 5)]
    pub j_min: i32,
    #[arg(long, default_value_t = 16)]
    pub j_max: i32,
    /// Word lengths `k_min..=k_max` on the symbolic route.
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    #[arg(long, default_value_t = 20)]
    pub k_max: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumCommand {
    /// Recurrence rates at points sampled from a Bernoulli-type equilibrium state.
    Ae(AeArgs),
    /// Source dimensions on the survivors of long returns.
    Ladder(LadderArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct AeArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Symbol weights of the measure; default is the measure of maximal dimension
    /// (`-dim log|Df|`).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 5)]
    pub j_min: i32,
    #[arg(long, default_value_t = 16)]
    pub j_max: i32,
}

#[derive(Args, Debug, Serialize)]
pub struct LadderArgs {
    #[command(flatten)]
    pub map: MapArg,
    #[arg(long, default_value_t = 4)]
    pub n_min: usize,
    #[arg(long, default_value_t = 14)]
    pub n_max: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCommand {
    /// Randomized check of `R_k(g(w)) = l_k`.
    LemmaG(LemmaGArgs),
    /// Ball-cylinder inclusions and the recurrence sandwich on random points.
    Sandwich(SandwichArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct LemmaGArgs {
    /// Size of the source alphabet.
    #[arg(long, default_value_t = 3)]
    pub alphabet: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Letters of each constructed word.
    #[arg(long, default_value_t = 100_000)]
    pub horizon: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SandwichArgs {
    #[command(flatten)]
    pub map: MapArg,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, default_value_t = 14)]
    pub k_max: usize,
    #[arg(long, default_value_t = 400_000)]
    pub horizon: usize,
}
