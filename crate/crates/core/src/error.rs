use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every layer of the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cyclotomic order mismatch: {0} vs {1} (supply a common order)")]
    OrderMismatch(usize, usize),
    #[error("size limit exceeded in {what}: {size} > {cap}")]
    Size { what: String, size: u128, cap: u128 },
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("degenerate quadratic character: {0}")]
    Degenerate(String),
    #[error("ill-defined quadratic character: {0}")]
    IllDefined(String),
    #[error("value is not a scaled 8th root of unity: {0}")]
    NotWeilIndex(String),
    #[error("relation violated: {0}")]
    RelationViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn size(what: impl Into<String>, size: u128, cap: u128) -> Self {
        Error::Size {
            what: what.into(),
            size,
            cap,
        }
    }

    /// Prefix the message with the place or operation that produced it.
    pub fn context(self, ctx: &str) -> Self {
        match self {
            Error::Size { what, size, cap } => Error::Size {
                what: format!("{ctx}: {what}"),
                size,
                cap,
            },
            Error::Precision(m) => Error::Precision(format!("{ctx}: {m}")),
            Error::Degenerate(m) => Error::Degenerate(format!("{ctx}: {m}")),
            Error::IllDefined(m) => Error::IllDefined(format!("{ctx}: {m}")),
            Error::NotWeilIndex(m) => Error::NotWeilIndex(format!("{ctx}: {m}")),
            Error::RelationViolation(m) => Error::RelationViolation(format!("{ctx}: {m}")),
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::Unsupported(m) => Error::Unsupported(format!("{ctx}: {m}")),
            Error::Input(m) => Error::Input(format!("{ctx}: {m}")),
            e @ Error::OrderMismatch(..) => e,
        }
    }

    /// True for resource/precision failures (as opposed to bad input or a failed identity).
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Size { .. } | Error::Precision(_))
    }
}
