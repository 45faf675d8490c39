use std::fmt;
use std::path::Path;

use chvenrich::corpus::CorpusError;
use chvenrich::embed::EmbedError;
use chvenrich::eval::EvalError;
use chvenrich::lexicon::LexiconError;
use chvenrich::query::QueryError;
use chvenrich::wordnet::WordNetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Input,
    Numeric,
    UnknownSeed,
}

impl Kind {
    pub fn code(self) -> i32 {
        match self {
            Kind::Config => 2,
            Kind::Input => 3,
            Kind::Numeric => 4,
            Kind::UnknownSeed => 5,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Kind::Config, message)
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(Kind::Input, message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::input(format!("{}: {e}", path.display()))
    }

    pub fn code(&self) -> i32 {
        self.kind.code()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<WordNetError> for CliError {
    fn from(e: WordNetError) -> Self {
        match e {
            WordNetError::Ic(_) => Self::new(Kind::Numeric, e.to_string()),
            _ => Self::input(e.to_string()),
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        let kind = match e {
            EmbedError::InvalidConfig(_) => Kind::Config,
            EmbedError::Diverged { .. } => Kind::Numeric,
            EmbedError::NotFound(_) => Kind::UnknownSeed,
            EmbedError::EmptyStream | EmbedError::EmptyMatrix | EmbedError::Io { .. } | EmbedError::Format(_) => Kind::Input,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        let kind = match e {
            QueryError::SeedNotFound(_) | QueryError::ZeroVector(_) => Kind::UnknownSeed,
            QueryError::InvalidN => Kind::Config,
            QueryError::DimensionMismatch(..) => Kind::Input,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        let kind = match e {
            EvalError::InvalidN => Kind::Config,
            EvalError::EmptyLexicon | EvalError::Point(_) => Kind::Input,
        };
        Self::new(kind, e.to_string())
    }
}
