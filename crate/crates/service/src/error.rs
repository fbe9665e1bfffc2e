use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

/// Where a request went wrong: a CSV cell or a leaf path.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Location {
    Cell {
        #[serde(skip_serializing_if = "Option::is_none")]
        row: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        column: Option<usize>,
    },
    Path(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
}

#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
                location: None,
            },
        }
    }

    pub fn at(mut self, location: Location) -> Self {
        self.body.location = Some(location);
        self
    }

    pub fn no_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "session_not_found", format!("no session `{id}`"))
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_request", message)
    }

    /// A path in a hide request that does not parse against the schema.
    pub fn bad_path(path: &str, err: &treehide::Error) -> Self {
        Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "leaf_not_found",
            format!("`{path}`: {err}"),
        )
        .at(Location::Path(path.to_owned()))
    }
}

impl From<treehide::Error> for ApiError {
    fn from(err: treehide::Error) -> Self {
        use treehide::Error as E;
        let message = err.to_string();
        match err {
            E::Parse { line, column, .. } => {
                Self::new(StatusCode::BAD_REQUEST, "parse_error", message).at(Location::Cell { row: line, column })
            }
            E::Arity { .. } | E::Schema(_) => Self::new(StatusCode::BAD_REQUEST, "schema_error", message),
            E::EmptyDataset => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "empty_dataset", message),
            E::LeafNotFound(path) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "leaf_not_found", message).at(Location::Path(path))
            }
            E::NothingToHide(path, _) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "nothing_to_hide", message).at(Location::Path(path))
            }
            E::DuplicateRequest(path) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "duplicate_request", message).at(Location::Path(path))
            }
            E::ContradictoryPath(path) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "contradictory_path", message).at(Location::Path(path))
            }
            E::NoRequests | E::NoRules => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "no_requests", message),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
