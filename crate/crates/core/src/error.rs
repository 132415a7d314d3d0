use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("series dates must be strictly increasing; first offending row {row} ({date})")]
    SeriesOrder { row: usize, date: NaiveDate },

    #[error("wrong units: expected {expected}, found {found}")]
    Units { expected: String, found: String },

    #[error("domain error at pixel {index}: {message}")]
    Domain { index: usize, message: String },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("unsupported geometry type {0:?}; expected Polygon or MultiPolygon")]
    UnsupportedGeometry(String),

    #[error("coordinate reference error: {0}")]
    Crs(String),

    #[error("grid mismatch between {first} and {second}")]
    GridMismatch { first: String, second: String },

    #[error("no data for period {0}")]
    EmptyPeriod(String),

    #[error("empty mask: {0}")]
    EmptyMask(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("scene {reservoir_id} {date}: {source}")]
    Scene {
        reservoir_id: String,
        date: NaiveDate,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    /// True when the failure is caused by the caller's inputs rather than a
    /// fault inside the library. Drives the CLI's exit-code contract.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Io { source, .. } => matches!(
                source.kind(),
                std::io::ErrorKind::NotFound | std::io::ErrorKind::InvalidInput
            ),
            Error::Scene { source, .. } => source.is_input_error(),
            Error::Parse { .. }
            | Error::SeriesOrder { .. }
            | Error::Units { .. }
            | Error::Param(_)
            | Error::EmptyInput(_)
            | Error::UnsupportedGeometry(_)
            | Error::Crs(_)
            | Error::GridMismatch { .. }
            | Error::EmptyPeriod(_)
            | Error::EmptyMask(_)
            | Error::Shape(_) => true,
            Error::Domain { .. } | Error::DegenerateDistribution(_) => false,
        }
    }
}
