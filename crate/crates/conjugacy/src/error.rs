use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("collection overflow: {0}")]
    CollectionOverflow(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("completion budget exceeded at {0} rules; partial system is not confluent")]
    CompletionBudgetExceeded(usize),
    #[error("rewriting system is not confluent")]
    NotConfluent,
    #[error("weighted feature undefined for zero-length word")]
    ZeroLength,
    #[error("feature recipe {recipe} unsupported for group {group}")]
    UnsupportedRecipe { recipe: String, group: String },
    #[error("target length {target} unreachable after {restarts} restarts")]
    TargetUnreachable { target: u64, restarts: u64 },
    #[error("non-conjugate filter exhausted after {0} attempts")]
    FilterExhausted(u64),
    #[error("pool exhausted: {0}")]
    PoolExhausted(String),
    #[error("empty dataset")]
    EmptyData,
    #[error("pattern size {p} exceeds feature dimension {dim}")]
    PatternTooLarge { p: usize, dim: usize },
    #[error("no restart produced S_o accuracy above {threshold} in {restarts} restarts (best {best})")]
    RestartBudgetExceeded { threshold: f64, restarts: u64, best: f64 },
    #[error("accuracy series too short for threshold detection ({0} points)")]
    SeriesTooShort(usize),
    #[error("refusing: {0}")]
    Refusal(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
