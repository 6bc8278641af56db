use thiserror::Error;

/// Error type shared by every fallible operation in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Word text does not conform to the grammar. `offset` is a byte offset
    /// into the input.
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    /// Letter index too large for the strand count it is used with.
    #[error("letter index {index} needs at least {index} + 1 strands, word has {strands}")]
    IndexOutOfRange { index: u32, strands: u32 },

    /// Declared strand count below what the letters require.
    #[error("declared strand count {declared} is below the required {required}")]
    StrandCountTooSmall { declared: u32, required: u32 },

    /// Operation defined only for words without virtual letters.
    #[error("operation requires a classical word, found virtual letter at position {position}")]
    NonClassicalInput { position: usize },

    /// Operation defined only for pure (identity-permutation) words.
    #[error("operation requires a pure braid word, permutation moves strand {strand}")]
    NotPure { strand: u32 },

    /// Two objects that must agree in size do not.
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    /// A rewrite was requested at a position where its pattern does not match.
    #[error("move {what} does not apply at position {position}")]
    PatternMismatch { what: String, position: usize },

    /// A recorded trace failed to replay.
    #[error("replay failed at step {step}: {reason}")]
    ReplayFailed { step: usize, reason: String },

    /// A certificate failed validation.
    #[error("certificate invalid at step {step}: {reason}")]
    CertificateInvalid { step: usize, reason: String },

    /// Search ended without an answer inside the configured budget.
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),

    /// Caller-supplied argument outside the documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
