use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed CSV, rule file, selector or JSON document. `line` and
    /// `column` are 1-based when present; line 0 is a header row.
    #[error("parse error{}: {message}", location(.line, .column))]
    Parse {
        line: Option<usize>,
        column: Option<usize>,
        message: String,
    },

    #[error("arity mismatch: expected {expected} attributes, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("no rules given")]
    NoRules,

    #[error("no leaf at path `{0}`")]
    LeafNotFound(String),

    #[error("nothing to hide at `{0}`: {1}")]
    NothingToHide(String, String),

    #[error("duplicate hiding request for `{0}`")]
    DuplicateRequest(String),

    #[error("no hiding requests given")]
    NoRequests,

    #[error("pending instance contradicts the tree at `{0}`")]
    ContradictoryPath(String),
}

impl Error {
    pub(crate) fn parse(line: Option<usize>, column: Option<usize>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

fn location(line: &Option<usize>, column: &Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at row {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}
