use std::path::PathBuf;

use ttstar_core::kernel::ProofError;
use ttstar_core::oracle::OracleError;
use ttstar_core::semantics::{EvalError, ModelError};
use ttstar_core::signature::DeclError;
use ttstar_core::syntax::ParseError;
use ttstar_core::types::TypeError;

/// Everything the front end can fail with. `exit_code` maps each variant to
/// the command-line contract: 1 check failure, 2 input error, 3 budget.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}:{line}: {message}")]
    Input { file: String, line: usize, message: String },
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("type error: {0}")]
    Type(#[from] TypeError),
    #[error("declaration: {0}")]
    Decl(#[from] DeclError),
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("evaluation: {0}")]
    Eval(EvalError),
    #[error("check failed at {0}")]
    Check(#[from] ProofError),
    #[error("oracle: {0}")]
    Oracle(OracleError),
    #[error("{0}")]
    Failed(String),
}

impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Domain(m) => Error::Model(m),
            e => Error::Eval(e),
        }
    }
}

impl From<OracleError> for Error {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Eval(e) => e.into(),
            OracleError::Model(m) => Error::Model(m),
            OracleError::Type(t) => Error::Type(t),
            e => Error::Oracle(e),
        }
    }
}

impl Error {
    pub fn input(file: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Input {
            file: file.to_string(),
            line,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Check(_) | Error::Failed(_) | Error::Oracle(OracleError::NotFound(_)) => 1,
            Error::Eval(EvalError::Budget { .. } | EvalError::Depth { .. })
            | Error::Model(ModelError::TooLarge(_))
            | Error::Oracle(OracleError::Budget(_)) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
