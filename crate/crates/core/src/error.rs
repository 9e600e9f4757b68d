use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("syntax error at line {line}, column {col}: {msg}")]
    SyntaxAt { line: usize, col: usize, msg: String },
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("pole encountered: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("mixed coefficient fields in one computation")]
    MixedField,
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("usage error: {0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
