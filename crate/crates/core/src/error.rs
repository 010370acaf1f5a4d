use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a complex: d∘d ≠ 0 at degree {0}")]
    NotAComplex(i32),
    #[error("invalid filtration: {0}")]
    Filtration(String),
    #[error("map does not preserve the {filtration} filtration (degree {degree}, index {index})")]
    NotFilteredMap { filtration: String, degree: i32, index: i32 },
    #[error("map does not commute with the differential at degree {0}")]
    NotChainMap(i32),
    #[error("invalid poset: {0}")]
    Poset(String),
    #[error("invalid sheaf: {0}")]
    Sheaf(String),
    #[error("invalid stratification: {0}")]
    Stratification(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("input is not a validated Hodge complex: {0}")]
    NotValidated(String),
    #[error("rational structure rejected: {0}")]
    Rationality(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
