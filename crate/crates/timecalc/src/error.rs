use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "unstable system: service tail rate {service} s/pkt exceeds arrival tail rate {arrival} s/pkt \
         (need lim (gamma(k) - lambda(k))/k <= 0)"
    )]
    Unstable { arrival: f64, service: f64 },

    #[error("divergent {0}")]
    Divergent(&'static str),

    #[error("wrong model kind: expected {expected}, found {found}")]
    WrongKind { expected: &'static str, found: &'static str },

    #[error("bounding function has no finite tail integral")]
    NotIntegrable,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("grid mismatch")]
    GridMismatch,

    #[error("too few samples: {got} < {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
