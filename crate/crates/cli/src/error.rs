use thiserror::Error;

/// Everything that makes the CLI exit with status 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("invalid command line: {0}")]
    Usage(String),

    #[error("schema error in `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("validation of `{field}` failed: {source}")]
    Validation {
        field: String,
        source: lagtrans_core::Error,
    },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("{0}")]
    Library(#[from] lagtrans_core::Error),
}

impl CliError {
    pub fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn validation(field: impl Into<String>, source: lagtrans_core::Error) -> Self {
        CliError::Validation {
            field: field.into(),
            source,
        }
    }

    /// Error category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "IoError",
            CliError::Usage(_) => "UsageError",
            CliError::Schema { .. } => "SchemaError",
            CliError::Validation { .. } => "ValidationError",
            CliError::UnknownName { .. } => "UnknownName",
            CliError::Library(_) => "LibraryError",
        }
    }

    /// Library variant name when one is involved, the category otherwise.
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Validation { source, .. } => source.name(),
            CliError::Library(e) => e.name(),
            other => other.kind(),
        }
    }

    /// Offending field, when the error is tied to one.
    pub fn field(&self) -> Option<&str> {
        match self {
            CliError::Schema { field, .. } | CliError::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}
