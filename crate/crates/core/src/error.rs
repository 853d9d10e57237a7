use std::path::PathBuf;

use thiserror::Error;

use crate::grid::CellIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("header is missing mapped column `{column}` (canonical field `{field}`)")]
    MissingColumn { field: String, column: String },
    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },
    #[error("point ({lat}, {lon}) falls outside the grid (row {row}, col {col})")]
    OutOfGrid { lat: f64, lon: f64, row: i64, col: i64 },
    #[error("no quote available: {0}")]
    QuoteUnavailable(String),
    #[error("base price must be positive, got {0}")]
    InvalidBase(f64),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("weights sum to zero")]
    DegenerateWeights,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),
    #[error("series cannot be aligned: {0}")]
    Alignment(String),
    #[error("NDCG undefined: no positive gain")]
    UndefinedNdcg,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no overlapping areas between feature inputs and surge ground truth")]
    EmptyJoin,
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("unknown cell {0:?}")]
    UnknownCell(CellIndex),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
