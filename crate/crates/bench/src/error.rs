use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Solver(#[from] bea_sat::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("report has no results")]
    EmptyResults,
    #[error("unknown report format '{0}' (expected table, csv or jsonl)")]
    UnknownFormat(String),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
