//! Error categories shared across the engine.
//!
//! The three variants map to the CLI exit-code contract: configuration
//! errors (2), mathematical consistency failures (3), and depth-cutoff
//! violations (4).

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad input: malformed files, non-dominant weights, unknown vertices.
    #[error("configuration error: {0}")]
    Config(String),

    /// An internal identity failed to hold; indicates a convention mismatch
    /// or a bug, never silently ignored.
    #[error("math consistency error: {0}")]
    Math(String),

    /// An operation would leave the computed depth cutoff.
    #[error("depth exceeded: {0}")]
    Depth(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Math(_) => 3,
            Error::Depth(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
