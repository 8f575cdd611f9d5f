use crate::transducer::StateId;

/// Errors raised by the transducer calculus.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("alphabet size must be at least 2, got {0}")]
    BadAlphabet(usize),

    #[error("letter {letter} outside alphabet of size {n}")]
    LetterOutOfRange { letter: usize, n: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid transducer: {0}")]
    Invalid(String),

    #[error("state {0} induces a constant map (single-point image)")]
    ConstantState(StateId),

    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("not synchronizing up to level {0}")]
    NotSynchronizing(usize),

    #[error("image of state {0} is not resolved as clopen")]
    NotClopen(StateId),

    #[error("not minimal: {0}")]
    NotMinimal(String),

    #[error("no inverse: {0}")]
    NoInverse(String),

    #[error("not closed under restriction: {0}")]
    NotClosed(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
