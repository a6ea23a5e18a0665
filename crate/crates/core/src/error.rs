use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("zero valid records in {0}")]
    ZeroValidRecords(PathBuf),
    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),
    #[error("duplicate root term {0:?}")]
    DuplicateRoot(String),
    #[error("variant {variant:?} claimed by both {first:?} and {second:?}")]
    AmbiguousVariant {
        variant: String,
        first: String,
        second: String,
    },
    #[error("root list line {line} has no usable tokens")]
    EmptyRoot { line: usize },
    #[error("origin {origin} is after the earliest document ({earliest})")]
    OriginAfterEarliest {
        origin: chrono::NaiveDate,
        earliest: chrono::NaiveDate,
    },
    #[error("cannot periodize an empty document set")]
    NoDocuments,
    #[error("unknown period {0}")]
    UnknownPeriod(usize),
    #[error("term {0} absent from period")]
    TermAbsent(u32),
    #[error("period {period} too dense: more than {cap} cliques, try a higher edge threshold")]
    PeriodTooDense { period: usize, cap: usize },
    #[error("both term sets are empty")]
    EmptyTermSets,
    #[error("oracle cap exceeded: {groups} groups > {cap}")]
    OracleCap { groups: usize, cap: usize },
    #[error("lambda {0} outside [0, 1]")]
    Lambda(f64),
    #[error("empty branch in partition")]
    EmptyBranch,
    #[error("all branches span fewer than {0} periods, use a smaller min_periods")]
    AllBranchesFiltered(usize),
    #[error("projection has no branches")]
    EmptyProjection,
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed export: {0}")]
    Export(#[from] serde_json::Error),
    #[error("{0}")]
    Query(String),
}

impl Error {
    pub(crate) fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
