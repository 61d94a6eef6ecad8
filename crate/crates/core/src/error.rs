use std::fmt;
use std::io;

use thiserror::Error;

/// A value-level parse failure without positional context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormatError {
    message: String,
}

impl FormatError {
    pub fn new(message: impl Into<String>) -> Self {
        FormatError {
            message: message.into(),
        }
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for FormatError {}

/// One rejected line of a lexicon batch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineDiagnostic {
    /// 1-based index of the line within the batch.
    pub line: usize,
    /// 1-based column of the offending field.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for LineDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed lexicon line at column {column}: {message}")]
    Lexicon { column: usize, message: String },

    #[error("{} malformed lexicon line(s); first: {}", .0.len(), .0[0])]
    LexiconBatch(Vec<LineDiagnostic>),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error("lattice has {count} paths, more than the enumeration cap of {cap}")]
    PathCapExceeded { count: u128, cap: u128 },

    #[error("illegal transition {transition}: {reason}")]
    IllegalTransition { transition: String, reason: String },

    #[error("gold tree is not projective")]
    NonProjective,

    #[error("gold annotation: {0}")]
    Gold(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("model: {0}")]
    Model(String),

    #[error("model tagset hash {found:016x} does not match active tagset {expected:016x}")]
    TagsetMismatch { expected: u64, found: u64 },

    #[error("config: {0}")]
    Config(String),

    #[error("evaluation: {0}")]
    Evaluation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
