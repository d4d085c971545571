use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports.
///
/// Variants split into validation failures (bad input) and numerical
/// failures (a computation that could not be completed); see
/// [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("line {line}: unknown event_kind `{kind}`")]
    UnknownEventKind { line: u64, kind: String },

    #[error("game {game_id}: clock runs backwards at line {line} ({from} -> {to})")]
    NonMonotoneClock {
        game_id: String,
        line: u64,
        from: u32,
        to: u32,
    },

    #[error("game {game_id}: {message}")]
    Lineup { game_id: String, message: String },

    #[error("game {game_id}: {message}")]
    InvalidGame { game_id: String, message: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("unknown coefficient `{0}`")]
    UnknownCoefficient(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("cholesky factorisation failed at iteration {iteration}")]
    Cholesky { iteration: usize },

    #[error("sampler diverged at iteration {iteration}: {what} is not finite")]
    Divergence { iteration: usize, what: &'static str },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("optimiser failed to converge: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of a numerical routine rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Cholesky { .. }
                | Error::Divergence { .. }
                | Error::Singular(_)
                | Error::NoConvergence(_)
        )
    }

    pub(crate) fn malformed(line: u64, message: impl Into<String>) -> Self {
        Error::MalformedRow {
            line,
            message: message.into(),
        }
    }
}
