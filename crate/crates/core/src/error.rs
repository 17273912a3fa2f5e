use thiserror::Error;

use crate::join::JoinTrace;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum PklError {
    #[error("alphabet size must be in 2..={max}, got {0}", max = crate::MAX_ALPHABET)]
    InvalidAlphabet(u32),

    #[error("character {ch} at index {index} is outside the alphabet [0, {k})")]
    CharacterOutOfRange { index: usize, ch: u32, k: u32 },

    #[error("a necklace must contain at least one character")]
    EmptyNecklace,

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u32, right: u32 },

    #[error("string of length {len} is longer than the necklace ({necklace_len})")]
    StringTooLong { len: usize, necklace_len: usize },

    #[error("substring length {m} out of range 1..={max}")]
    LengthOutOfRange { m: usize, max: usize },

    #[error("join anchor {anchor} not found in the {side} necklace")]
    JoinAnchorNotFound { anchor: String, side: &'static str },

    #[error("cannot extend a run of character {ch}: {reason}")]
    InvalidExtension { ch: u32, reason: &'static str },

    #[error("input is not a P-sequence (m = {m}, string {string} occurs {count} times)")]
    NotBalanced { m: usize, string: String, count: u64 },

    #[error("construction failed: {reason}")]
    ConstructionFailure { reason: String, trace: JoinTrace },

    #[error("join check failed at join {index}: {reason}")]
    JoinCheckFailed { index: usize, reason: String },

    #[error("search space {k}^{l} exceeds the budget of {budget} states")]
    BudgetExceeded { k: u32, l: usize, budget: u64 },

    #[error("length must be at least 1")]
    ZeroLength,

    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = PklError> = std::result::Result<T, E>;
