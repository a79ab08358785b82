use thiserror::Error;

/// Errors raised by model construction and queries.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A precondition of an operation does not hold.
    #[error("domain error: {0}")]
    Domain(String),
    /// A scenario, chain or point name is not in the model.
    #[error("unknown {kind} '{name}'{hint}")]
    Lookup { kind: &'static str, name: String, hint: String },
    /// The construct is valid but outside the decided fragment.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn lookup(kind: &'static str, name: impl Into<String>) -> Self {
        Error::Lookup { kind, name: name.into(), hint: String::new() }
    }

    /// Lookup failure that lists the valid names.
    pub fn lookup_among<S: AsRef<str>>(kind: &'static str, name: impl Into<String>, known: &[S]) -> Self {
        let known: Vec<&str> = known.iter().map(AsRef::as_ref).collect();
        Error::Lookup { kind, name: name.into(), hint: format!("; known: {}", known.join(", ")) }
    }
}
