use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("letter multiplicities differ: {0}")]
    UnequalMultiplicities(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("matching is not canonical (vertex set must be exactly 1..=rn)")]
    NonCanonicalMatching,
    #[error("permutation length {len} is not divisible by r = {r}")]
    LengthNotDivisibleByR { len: usize, r: usize },
    #[error("enumeration of {count} objects exceeds the cap of {cap}")]
    EnumerationTooLarge { count: String, cap: u64 },
    #[error("edges intersect")]
    EdgesIntersect,
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("uniformity r = {r} exceeds the cap of {cap}")]
    RTooLarge { r: usize, cap: usize },
    #[error("patterns have different uniformities ({0} vs {1})")]
    RMismatch(usize, usize),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("exhaustive check at r = {0} is outside the supported range 3..=5")]
    ExhaustionCapExceeded(usize),
    #[error("support of size {support} is too large for a full-support test (cap {cap})")]
    SupportTooLarge { support: String, cap: u64 },
    #[error("partition profile out of range: {0}")]
    ProfileOutOfRange(String),
    #[error("exact r-partite search unsupported: {0}")]
    ExactModeUnsupported(String),
    #[error("instance with {n} edges exceeds the exact solver cap of {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("solver requires r = {expected}, got r = {actual}")]
    WrongUniformity { expected: usize, actual: usize },
    #[error("matching is not r-partite")]
    NotRPartite,
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("block sizes sum to {actual}, expected {expected}")]
    SizesDontSum { expected: usize, actual: usize },
    #[error("exponent x = {x} must satisfy 0 <= x < r = {r}")]
    XOutOfRange { x: String, r: usize },
    #[error("pattern {0} is not collectable")]
    NotCollectable(String),
    #[error("patterns {0} and {1} are not harmonious")]
    NotHarmonious(String, String),
    #[error("vertex sets intersect")]
    VerticesIntersect,
    #[error("inconsistent parameters: {0}")]
    ParamsInconsistent(String),
    #[error("estimator unavailable: {0}")]
    EstimatorUnavailable(String),
    #[error("fit needs at least 3 distinct n, got {0}")]
    GridTooSmall(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
