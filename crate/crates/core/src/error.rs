use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate pencil: all barycentric weights are zero")]
    DegeneratePencil,
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    #[error("curve degeneracy: {0}")]
    CurveDegenerate(String),
    #[error("conformal map: {0}")]
    Map(String),
    #[error("source placement: {0}")]
    Placement(String),
    #[error("non-finite matrix entry for source {source_index}, sample {sample_index}")]
    NonFiniteEntry { source_index: usize, sample_index: usize },
    #[error("series truncation did not converge: {0}")]
    Truncation(String),
    #[error("unknown curve spec: {0}")]
    UnknownCurve(String),
    /// Carries the cause in its message rather than as `source()`, so error
    /// chains print it once.
    #[error("stage {stage} ({name}) failed: {cause}")]
    Stage {
        stage: u8,
        name: &'static str,
        cause: Box<Error>,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
