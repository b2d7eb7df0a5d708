use std::fmt;

/// Library-wide error type.
///
/// Every fallible operation in this crate reports one of these kinds. The
/// CLI maps them onto stable process exit codes (see [`Error::exit_code`]),
/// so the kind of a failure is part of the public contract, not just its
/// message text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A numeric argument is outside its legal domain (bad trim fraction,
    /// non-positive scale parameter, alpha outside (0, 1), ...).
    Parameter(String),
    /// Malformed text input: distribution spec strings, trim flags,
    /// format tags, or unparseable environment overrides.
    Parse(String),
    /// Input data is unusable: unreadable files, missing columns,
    /// non-numeric or non-finite cells, or too few usable rows.
    Data(String),
    /// The requested statistic exists only in degenerate form for this
    /// sample: zero retained variance, a non-positive variance-of-variance
    /// plug-in, or a trim window that leaves too few observations.
    Degenerate(String),
    /// A numerical routine failed to deliver the requested accuracy, or a
    /// population quantity is infinite/undefined for the requested setup.
    Numerical(String),
}

impl Error {
    /// Process exit code the CLI uses for this error kind.
    ///
    /// `2` = usage/parameter errors, `3` = data errors, `4` = numerical or
    /// degeneracy failures. `0` and `1` are reserved for success and panics.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Parameter(_) | Error::Parse(_) => 2,
            Error::Data(_) => 3,
            Error::Degenerate(_) | Error::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
            Error::Degenerate(msg) => write!(f, "degenerate statistic: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
