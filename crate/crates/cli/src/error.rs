use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid problem file: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Schema(String),
    #[error("{field}: {source}")]
    Field {
        field: String,
        #[source]
        source: mwrc_core::Error,
    },
    #[error(transparent)]
    Core(#[from] mwrc_core::Error),
    #[error("{0}")]
    Usage(String),
}
