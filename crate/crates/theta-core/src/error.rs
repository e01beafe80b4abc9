use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("scalar is not invertible: {0}")]
    NotInvertible(String),

    #[error("series order too low: need {need}, have {have}")]
    OrderTooLow { need: i64, have: i64 },

    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),

    #[error("underdetermined linear system: {0}")]
    NonUnique(String),

    #[error("truncation window exceeded: {0}")]
    Window(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
