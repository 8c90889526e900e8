use serde::Serialize;
use thiserror::Error;

use crate::derset::DerSetError;
use crate::mechanical::MechanicalError;
use crate::morphism::MorphismError;
use crate::name::NameError;
use crate::stream::StreamError;
use crate::words::WordsError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Name(#[from] NameError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    DerSet(#[from] DerSetError),
    #[error(transparent)]
    Words(#[from] WordsError),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Mechanical(#[from] MechanicalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Parse,
    Domain,
    Budget,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parse => 2,
            ErrorKind::Domain => 3,
            ErrorKind::Budget => 4,
            ErrorKind::Internal => 1,
        }
    }
}

fn stream_kind(e: &StreamError) -> ErrorKind {
    match e {
        StreamError::Budget { .. } => ErrorKind::Budget,
        _ => ErrorKind::Domain,
    }
}

fn name_kind(e: &NameError) -> ErrorKind {
    match e {
        NameError::Parse { .. } => ErrorKind::Parse,
        _ => ErrorKind::Domain,
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Name(e) => name_kind(e),
            Error::Morphism(_) => ErrorKind::Domain,
            Error::DerSet(e) => match e {
                DerSetError::Name(n) => name_kind(n),
                DerSetError::UnknownClass(_) => ErrorKind::Parse,
                DerSetError::NoRepetition { .. } => ErrorKind::Internal,
                _ => ErrorKind::Domain,
            },
            Error::Words(WordsError::Stream(s)) | Error::Stream(s) => stream_kind(s),
            Error::Words(_) => ErrorKind::Domain,
            Error::Mechanical(MechanicalError::Parse(_)) => ErrorKind::Parse,
            Error::Mechanical(_) => ErrorKind::Domain,
        }
    }
}
