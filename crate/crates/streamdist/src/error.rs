use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("hash argument {value} outside domain of size {domain}")]
    DomainOverflow { value: u64, domain: u64 },
    #[error("reversed range [{start}, {end})")]
    ReversedRange { start: u64, end: u64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("don't-care symbol at position {0}")]
    DontCare(usize),
    #[error("symbol {symbol} outside alphabet [1, {sigma}]")]
    SymbolOutOfRange { symbol: u32, sigma: u32 },
    #[error("level {level} outside [0, {max}]")]
    LevelOutOfRange { level: u32, max: u32 },
    #[error("index {index} outside [{low}, {high}]")]
    IndexOutOfRange { index: usize, low: usize, high: usize },
    #[error("operands come from different sketch families")]
    FamilyMismatch,
    #[error("run-length profiles differ")]
    ProfileMismatch,
    #[error("operation requires p > 0")]
    ZeroExponent,
    #[error("{got} samples requested, at least {min} required")]
    TooFewSamples { got: usize, min: usize },
    #[error("malformed encoding: {0}")]
    Malformed(String),
}

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;
