use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("inadmissible setup: {0}")]
    Inadmissible(String),
    #[error("inadmissible pair")]
    InadmissiblePair,
    #[error("degenerate direction")]
    DegenerateDirection,
    #[error("empty admissible range")]
    EmptyRange,
    #[error("pole at index {0}")]
    Pole(usize),
    #[error("no ancestor")]
    NoAncestor,
    #[error("no children below the finest level")]
    NoChildren,
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("non-integrable power")]
    NonIntegrablePower,
    #[error("use rescale first")]
    UseRescaleFirst,
    #[error("not a symmetric tuple")]
    NotSymmetric,
    #[error("use step2")]
    UseStep2,
    #[error("zero datum at index {0}")]
    ZeroDatum(usize),
    #[error("norm bound diverged")]
    NormBoundDiverged,
    #[error("interval outside the ambient range")]
    OutsideAmbient,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
