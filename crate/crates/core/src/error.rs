use crate::report::Violation;

/// Errors raised by constructors and computations.
///
/// A failed identity check is not an error: validators return a
/// [`Report`](crate::report::Report). Errors cover malformed input, violated
/// preconditions and exhausted resource bounds.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range for size {size}")]
    OutOfRange { index: usize, size: usize },

    #[error("precondition failed ({what}): {violation}")]
    Precondition { what: String, violation: Violation },

    #[error("postcondition failed ({what}): {violation}")]
    Postcondition { what: String, violation: Violation },

    #[error("map for semigroup element {element} is not invertible")]
    Singular { element: usize },

    #[error("map for semigroup element {element} is not nilpotent below bound {bound}")]
    NotNilpotent { element: usize, bound: usize },

    #[error("tensor for semigroup element {element} is not skew-symmetric")]
    NotSkewSymmetric { element: usize },

    #[error("degree-0 cochains require a unital semigroup")]
    NonUnitalSemigroup,

    #[error("cochain violates the independence constraint: {0}")]
    Independence(String),

    #[error("theta is not a coboundary witness for the order-1 term")]
    NotACoboundary,

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("unknown object '{0}'")]
    UnknownObject(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), message: message.into() }
    }

    pub(crate) fn precondition(what: &str, violation: Violation) -> Self {
        Error::Precondition { what: what.to_string(), violation }
    }

    pub(crate) fn postcondition(what: &str, violation: Violation) -> Self {
        Error::Postcondition { what: what.to_string(), violation }
    }
}
