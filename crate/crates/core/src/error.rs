use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("resource guard exceeded: {0}")]
    Resource(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("attack spec error: {0}")]
    AttackSpec(String),
    #[error("lemma hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
