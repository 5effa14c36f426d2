use std::path::PathBuf;

use crate::model::{Guid, Predicate, SubClass};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("label must not be empty")]
    EmptyLabel,
    #[error("{0} is not an I/O activity sub-class")]
    NotAnActivity(SubClass),
    #[error("{0} is not an extensible sub-class")]
    NotExtensible(SubClass),
    #[error("node {guid} already registered as {existing}, refusing {incoming}")]
    NodeConflict {
        guid: Guid,
        existing: String,
        incoming: String,
    },
    #[error("unknown node {0}")]
    UnknownGuid(Guid),
    #[error("{predicate} does not accept {detail}")]
    DomainViolation { predicate: Predicate, detail: String },
    #[error("{0} requires a literal object")]
    LiteralExpected(Predicate),
    #[error("{0} requires a node object")]
    NodeExpected(Predicate),
    #[error("decimal literal must be finite")]
    NonFiniteDecimal,

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: undeclared prefix `{prefix}`")]
    UnknownPrefix { line: usize, prefix: String },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("config: {0}")]
    Config(String),
    #[error("session already ended")]
    SessionEnded,

    #[error("path `{0}` escapes the sandbox")]
    PathEscape(String),
    #[error("`{0}` not found")]
    NotFound(String),
    #[error("`{0}` already exists")]
    AlreadyExists(String),
    #[error("handle was opened {opened}, cannot {attempted}")]
    ModeMismatch {
        opened: &'static str,
        attempted: &'static str,
    },
    #[error("handle is closed")]
    Closed,
    #[error("parent of `{0}` does not exist")]
    MissingParent(String),
    #[error("`{path}` is a {actual}, not a {expected}")]
    KindMismatch {
        path: String,
        expected: SubClass,
        actual: SubClass,
    },
    #[error("{0}")]
    Unsupported(String),
    #[error("corrupt container {path}: {message}")]
    CorruptContainer { path: PathBuf, message: String },

    #[error("query syntax error at offset {pos}: {message}")]
    QuerySyntax { pos: usize, message: String },
    #[error("unsupported query feature: {0}")]
    UnsupportedFeature(String),
    #[error("variable ?{0} is not bound by any pattern")]
    UnboundVariable(String),
    #[error("{0} is not an entity")]
    NotAnEntity(Guid),
    #[error("durations not tracked")]
    DurationsNotTracked,
    #[error("no configuration named `{0}`")]
    UnknownConfiguration(String),
    #[error("highlighted element not in graph: {0}")]
    UnknownHighlight(String),
    #[error("invalid workload: {0}")]
    InvalidWorkload(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
