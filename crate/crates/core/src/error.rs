use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("invalid natural isomorphism: {0}")]
    InvalidNaturalIso(String),
    #[error("invalid biset: {0}")]
    InvalidBiset(String),
    #[error("invalid biset morphism: {0}")]
    InvalidBisetMorphism(String),
    #[error("invalid 2-cell: {0}")]
    InvalidTwoCell(String),
    #[error("invalid coend problem: {0}")]
    InvalidCoend(String),
    #[error("invalid G-set data: {0}")]
    InvalidGSet(String),
    #[error("endpoint mismatch: {0}")]
    Mismatch(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("coend quotient is not well defined: {0}")]
    NotWellDefined(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
