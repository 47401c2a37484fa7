use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed snapshot: {0}")]
    MalformedSnapshot(String),

    #[error("segment {segment}: bend angle {theta:.6} rad exceeds the segment limit s/d = {limit:.6} rad")]
    BendExceedsSegment {
        segment: usize,
        theta: f64,
        limit: f64,
    },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("plot data does not match plot kind {0}")]
    PlotData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
