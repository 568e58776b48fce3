//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid root system type {family}{rank}")]
    InvalidType { family: char, rank: usize },
    #[error("Weyl group of {family}{rank} has order {order}, above the enumeration cap {cap}")]
    WeylGroupTooLarge {
        family: char,
        rank: usize,
        order: u64,
        cap: u64,
    },
    #[error("weight multiset is not Weyl invariant")]
    NotWeylInvariant,
    #[error("Dynkin index mismatch between evaluation coroots: {0}")]
    DynkinMismatch(String),
    #[error("modulus must satisfy Im tau > 0, got {0}")]
    BadModulus(f64),
    #[error("invalid characteristic {0:?}")]
    BadCharacteristic(Vec<i64>),
    #[error("truncation radius {given} too small, need {required}")]
    TruncationTooSmall { given: usize, required: usize },
    #[error("numerical rank unstable across sample draws: {first} vs {second}")]
    RankUnstable { first: usize, second: usize },
    #[error("rank depends on threshold within [1e-10, 1e-6]: {0:?}")]
    ThresholdSensitive(Vec<usize>),
    #[error("too few sample points: {given} < {required}")]
    TooFewSamples { given: usize, required: usize },
    #[error("singular point: |denominator| = {0:e}")]
    SingularPoint(f64),
    #[error("weight is not a level-{level} dominant weight")]
    NotLevelWeight { level: u32 },
    #[error("unsupported group su({0}); need 2 <= n <= 4")]
    UnsupportedGroup(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("collocation grid {grid} too coarse for cutoff {cutoff}")]
    Aliasing { grid: usize, cutoff: usize },
    #[error("translation is not in the period lattice")]
    NotInLattice,
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("holonomies do not commute: defect {0:e}")]
    NonCommuting(f64),
    #[error("no spectral gap: {below} singular values below tol, gap ratio {ratio}")]
    NoSpectralGap { below: usize, ratio: f64 },
    #[error("index h0 - h1 = {0} is nonzero")]
    NonzeroIndex(i64),
    #[error("kernel present: smallest eigenvalue {0:e}")]
    KernelPresent(f64),
    #[error("near-zero eigenvalue {0:e} in truncated operator")]
    IllConditioned(f64),
    #[error("Richardson extrapolation unstable: {0}")]
    Inconclusive(String),
    #[error("grid resolution {points} per flux quantum below 8")]
    Resolution { points: f64 },
    #[error("degree vector must sum to zero")]
    DegreeSum,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
