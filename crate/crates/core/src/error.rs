use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("presentation is inconsistent: {0}")]
    Inconsistent(String),

    #[error("generator index {index} out of range for {n} generators")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("element has {got} coordinates, expected {expected}")]
    BadElement { got: usize, expected: usize },

    #[error("{0}")]
    Precondition(String),

    #[error("not a group of maximal class: {0}")]
    NotMaximalClass(String),

    #[error("homomorphism check failed: {0}")]
    HomCheckFailed(String),

    /// Generator images that do not extend to an endomorphism. `theorem` is set when the
    /// calling driver expected every candidate to extend.
    #[error("derivation validation failed{}: {reason}", if *.theorem { " (theorem violation)" } else { "" })]
    ValidationFailed { reason: String, theorem: bool },

    #[error("caps exceeded: {0}")]
    Caps(String),

    #[error("group file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
