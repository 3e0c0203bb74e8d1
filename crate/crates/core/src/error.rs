use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: empty dataset")]
    EmptyDataset { path: PathBuf },

    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: row {row}, column `{column}`: {reason}")]
    BadCell {
        path: PathBuf,
        row: usize,
        column: String,
        reason: String,
    },

    #[error("{path}: row {row}: duplicate class name `{name}`")]
    DuplicateClass {
        path: PathBuf,
        row: usize,
        name: String,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("duplicate abscissa {0} in integration points")]
    DuplicateAbscissa(f64),

    #[error("K-test needs versions i < j < k, got {i}, {j}, {k} of {available}")]
    BadWindow {
        i: usize,
        j: usize,
        k: usize,
        available: usize,
    },

    #[error("project `{project}` has {versions} version(s); the K-test needs at least 3")]
    TooFewVersions { project: String, versions: usize },

    #[error("a community needs at least 2 projects, got {0}")]
    TooFewProjects(usize),

    #[error("no project in the community produced a defined prediction score")]
    NoBellwether,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
