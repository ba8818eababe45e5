use thiserror::Error;

/// Errors raised while building languages, compiling tasks, training and reporting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty domain: the language declares no constants")]
    EmptyDomain,

    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },

    #[error("predicate `{name}` has arity {arity}; only arities 1 and 2 are supported")]
    UnsupportedArity { name: String, arity: usize },

    #[error("language must declare exactly one target predicate, found {0}")]
    TargetCount(usize),

    #[error("fact outside language: {0}")]
    FactOutsideLanguage(String),

    #[error("malformed clause: {0}")]
    MalformedClause(String),

    #[error("index exceeds memory budget: needs {needed} bytes, cap is {cap} bytes")]
    MemoryBudget { needed: u64, cap: u64 },

    #[error("weight store does not match the hypothesis space: {0}")]
    ShapeMismatch(String),

    #[error("diverged: non-finite loss at step {step}")]
    Diverged { step: usize },

    #[error("search space too large: {count} instantiations exceed the cap of {cap}")]
    SearchCap { count: u128, cap: u128 },

    #[error("unknown task `{0}`")]
    UnknownTask(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
