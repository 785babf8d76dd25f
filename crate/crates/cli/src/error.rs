use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at line {line}, field `{field}`: {message}")]
    Config { line: usize, field: String, message: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Compute(#[from] toric_period::Error),
    #[error("cannot build worker pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}
