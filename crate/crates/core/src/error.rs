use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Bad argument or a point that does not belong to the space.
    InvalidInput(String),
    /// A policy or adversary broke the rules of the game.
    Protocol(String),
    /// Parameters outside the range a construction is defined for.
    Precondition(String),
    /// Offline value of zero with a non-empty release set.
    DegenerateInstance,
    /// Instance larger than a solver accepts.
    Capacity { limit: usize, got: usize },
    /// Name lookup failed in a registry.
    Unknown(String),
    /// A numeric routine failed to bracket or converge.
    Numeric(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Protocol(m) => write!(f, "protocol error: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::DegenerateInstance => write!(f, "offline value is zero but requests were released"),
            Error::Capacity { limit, got } => {
                write!(f, "instance has {got} requests, solver limit is {limit}")
            }
            Error::Unknown(m) => write!(f, "unknown name: {m}"),
            Error::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn protocol(msg: impl Into<String>) -> Error {
    Error::Protocol(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
