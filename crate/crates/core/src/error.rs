use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symbol {symbol} is outside an alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: u32, alphabet_size: usize },

    #[error("invalid subshift: {0}")]
    InvalidSubshift(String),

    #[error("word {0} is not admissible")]
    InadmissibleWord(String),

    #[error("no symbol has two successors")]
    NoBranchingSymbol,

    #[error("subshift is not topologically mixing")]
    NotMixing,

    #[error("no return word below the requested bound")]
    EmptyAlphabet,

    #[error("surviving subshift has no admissible loop")]
    EmptySurvivor,

    #[error("infeasible rate targets: {0}")]
    InfeasibleTarget(String),

    #[error("sequence value overflows at index {index}")]
    Overflow { index: usize },

    #[error("horizon too short: needed {needed}, available {available}")]
    HorizonTooShort { needed: usize, available: usize },

    #[error("map is not expanding (inf |Df| = {min_slope})")]
    NotExpanding { min_slope: f64 },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("orbit hits a partition endpoint at step {step} (x = {point})")]
    BoundaryOrbit { step: usize, point: f64 },

    #[error("orbit leaves the repeller domain at step {step} (x = {point})")]
    Escaped { step: usize, point: f64 },

    #[error("cylinder mass {mass} is below tolerance")]
    ZeroMassCylinder { mass: f64 },

    #[error("source infeasible at n = {n}: equilibrium state gives no mass to the base cylinder")]
    SourceInfeasible { n: usize },

    #[error("Birkhoff averages missed tolerance after {attempts} attempts (best deviation {deviation})")]
    BirkhoffMiss { attempts: usize, deviation: f64 },

    #[error("potential is defined on a different subshift")]
    LevelMismatch,

    #[error("eigen-solver did not converge: {0}")]
    NotConverged(String),

    #[error("parse error: {0}")]
    Parse(String),
}
