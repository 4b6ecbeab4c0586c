use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph error: {0}")]
    Graph(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("pivot failure: {0}")]
    PivotFailure(String),
    #[error("matrix is not positive semidefinite: {0}")]
    NotPsd(String),
    #[error("structurally infeasible: {0}")]
    StructurallyInfeasible(String),
    #[error("unknown name: {0}")]
    Unknown(String),
    #[error(transparent)]
    Sdp(#[from] chordsos_sdp::SdpError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
