use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field GF({p}^{k}): {reason}")]
    UnsupportedField { p: u32, k: u32, reason: &'static str },
    #[error("no embedding of GF({p}^{from}) into GF({p}^{to})")]
    NoEmbedding { p: u32, from: u32, to: u32 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("singular point: tangent space has dimension {0}")]
    Singular(usize),
    #[error("series expansion failed at order {order}: {reason}")]
    Expansion { order: usize, reason: String },
    #[error("division by a non-unit")]
    NonUnit,
    #[error("budget exceeded: {needed} candidates requested, {limit} allowed")]
    Budget { needed: u128, limit: u128 },
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
