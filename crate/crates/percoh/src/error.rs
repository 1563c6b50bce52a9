//! Error taxonomy shared by the whole crate.
//!
//! The CLI maps these onto process exit codes: bad input documents exit 2,
//! mathematically unsupported situations exit 3, and a `member`/check command
//! whose asserted answer is false exits 1.

use thiserror::Error;

/// Everything that can go wrong below the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed session document or polynomial text.
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    /// Structurally valid input that violates a semantic rule
    /// (non-prime characteristic, differential that does not square to zero,
    /// perversity on undeclared points, and so on).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The quotient ring is not Cohen-Macaulay, so the dualizing machinery
    /// (and everything that depends on it) is unavailable.
    #[error("ring is not Cohen-Macaulay: {0}")]
    NotCohenMacaulay(String),

    /// The support of some cohomology module has a generic point that was not
    /// declared, witnessed by a ring element vanishing on every declared
    /// candidate but not lying in the radical of the annihilator.
    #[error("support has an undeclared generic point: {0}")]
    UndeclaredGenericPoint(String),

    /// A requested operation needs a perversity shape the input lacks
    /// (monotone/comonotone requirements).
    #[error("perversity unsupported for this operation: {0}")]
    UnsupportedPerversity(String),

    /// An internal certificate failed to verify. Carries enough context to
    /// reproduce; the engine never silently returns the offending object.
    #[error("internal certificate failed: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::Invalid(_) => 2,
            Error::NotCohenMacaulay(_)
            | Error::UndeclaredGenericPoint(_)
            | Error::UnsupportedPerversity(_) => 3,
            Error::Internal(_) => 3,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
