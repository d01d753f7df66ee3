use thiserror::Error;

use crate::engine::EngineKind;

/// All failure modes surfaced by the framework and its built-in engines.
#[derive(Error, Debug)]
pub enum Error {
    // dataset model
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("operator {op_name} failed: {message}")]
    OperatorError { op_name: String, message: String },
    #[error("unknown operator: {0}")]
    UnknownOperator(String),
    #[error("origin source unavailable: {0}")]
    SourceUnavailable(String),
    #[error("invalid record: {0}")]
    InvalidRecord(String),

    // engine registry / configuration
    #[error("duplicate engine {name} for kind {kind}")]
    DuplicateEngine { name: String, kind: EngineKind },
    #[error("missing slot: {0}")]
    MissingSlot(EngineKind),
    #[error("config syntax error at line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("unknown config section: {0}")]
    UnknownSection(String),
    #[error("unknown engine {name} for kind {kind}")]
    UnknownEngine { kind: EngineKind, name: String },
    #[error("engine {name} ({kind}) unavailable: {reason}")]
    EngineUnavailable {
        kind: EngineKind,
        name: String,
        reason: String,
    },

    // storage
    #[error("storage full")]
    StorageFull,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown dataset: {0}")]
    UnknownDataset(String),

    // control
    #[error("control engine busy")]
    Busy,
    #[error("unknown job token: {0}")]
    UnknownToken(u64),

    // output
    #[error("empty series for chart {0:?}")]
    EmptySeries(String),

    // compute tasks
    #[error("type mismatch in {task}: expected {expected} record, found {found}")]
    TypeMismatch {
        task: String,
        expected: String,
        found: String,
    },
    #[error("k too large: k={k} but only {n} observations")]
    KTooLarge { k: usize, n: usize },
    #[error("empty input for {0}")]
    EmptyInput(String),
    #[error("empty graph")]
    EmptyGraph,
    #[error("unknown generator kind: {0}")]
    UnknownKind(String),
    #[error("invalid parameter {key}: {message}")]
    InvalidParam { key: String, message: String },
    #[error("unknown parameter key: {0}")]
    UnknownParamKey(String),

    // pipeline
    #[error("duplicate pipe kind: {0}")]
    DuplicatePipeKind(String),
    #[error("pipe order violation: {0}")]
    OrderViolation(String),
    #[error("empty pipeline")]
    EmptyPipeline,
    #[error("cannot resolve task {task} in {kind} engine {engine}")]
    TaskResolutionError {
        kind: EngineKind,
        engine: String,
        task: String,
    },
    #[error("stage {stage} failed: {source}")]
    StageFailed {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
