//! The pluggable engine surface.
//!
//! Every engine declares exactly one of the five kinds and is registered
//! under a (kind, name) pair. Engine Writers implement one of the kind
//! traits plus a side-effect-free availability probe; the registry is frozen
//! after startup and shared read-only.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BigData, DatasetId, Record};

/// The five engine slots, in canonical binding order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EngineKind {
    Input,
    Storage,
    Computation,
    Control,
    Output,
}

impl EngineKind {
    pub const ALL: [EngineKind; 5] = [
        EngineKind::Input,
        EngineKind::Storage,
        EngineKind::Computation,
        EngineKind::Control,
        EngineKind::Output,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EngineKind::Input => "input",
            EngineKind::Storage => "storage",
            EngineKind::Computation => "computation",
            EngineKind::Control => "control",
            EngineKind::Output => "output",
        }
    }

    pub fn parse(s: &str) -> Option<EngineKind> {
        EngineKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Availability {
    Available,
    Unavailable(String),
}

impl Availability {
    pub fn is_available(&self) -> bool {
        matches!(self, Availability::Available)
    }
}

impl fmt::Display for Availability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Availability::Available => f.write_str("Available"),
            Availability::Unavailable(reason) => write!(f, "Unavailable ({reason})"),
        }
    }
}

/// Identity of a registered engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineDescriptor {
    pub name: String,
    pub kind: EngineKind,
    pub version: String,
}

impl EngineDescriptor {
    pub fn new(name: &str, kind: EngineKind, version: &str) -> Self {
        EngineDescriptor {
            name: name.to_string(),
            kind,
            version: version.to_string(),
        }
    }
}

pub type Params = BTreeMap<String, String>;

/// Common surface of every wrapped engine. `probe` must be side-effect-free
/// and repeatable for the same params.
pub trait Engine: Send + Sync {
    fn descriptor(&self) -> &EngineDescriptor;
    fn probe(&self, params: &Params) -> Availability;
}

pub trait InputEngine: Engine {
    fn read(&self, params: &Params) -> Result<BigData>;
}

/// Write receipt: how many records were committed and how long it took.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WriteReceipt {
    pub count: usize,
    pub elapsed_ms: f64,
}

pub trait StorageEngine: Engine {
    /// Opens (or creates) the store described by `params`.
    fn open(&self, params: &Params) -> Result<Box<dyn StoreHandle>>;
}

/// An open store. One writer at a time per dataset; committed data may be
/// read concurrently.
pub trait StoreHandle: Send {
    fn engine_name(&self) -> &str;
    fn write(&mut self, bd: &BigData) -> Result<WriteReceipt>;
    fn read(&self, id: DatasetId) -> Result<BigData>;
    fn record_count(&self, id: DatasetId) -> Option<usize>;
    fn dataset_ids(&self) -> Vec<DatasetId>;
    fn remove(&mut self, id: DatasetId) -> Result<()>;
}

pub trait ComputationEngine: Engine {
    fn resolves(&self, task: &str) -> bool;
    fn run(&self, task: &str, input: &BigData, params: &Params) -> Result<BigData>;
    fn task_names(&self) -> Vec<String>;
}

/// Job token handed out by `admit`; monotonically increasing.
pub type JobToken = u64;

pub trait ControlEngine: Engine {
    /// Admits a job. Blocking admits wait for the running job to release;
    /// non-blocking admits fail with `Busy` instead.
    fn admit(&self, job: &str, blocking: bool) -> Result<JobToken>;
    fn release(&self, token: JobToken) -> Result<()>;
}

pub trait OutputEngine: Engine {
    /// Renders the dataset into a self-contained document (text table, JSON,
    /// SVG, ...). Pure: identical input yields byte-identical output.
    fn emit(&self, bd: &BigData, params: &Params) -> Result<String>;
    /// File extension for emitted documents, without the dot.
    fn extension(&self) -> &'static str;
}

/// A registered engine, tagged by kind.
#[derive(Clone)]
pub enum EngineHandle {
    Input(Arc<dyn InputEngine>),
    Storage(Arc<dyn StorageEngine>),
    Computation(Arc<dyn ComputationEngine>),
    Control(Arc<dyn ControlEngine>),
    Output(Arc<dyn OutputEngine>),
}

impl EngineHandle {
    pub fn descriptor(&self) -> &EngineDescriptor {
        match self {
            EngineHandle::Input(e) => e.descriptor(),
            EngineHandle::Storage(e) => e.descriptor(),
            EngineHandle::Computation(e) => e.descriptor(),
            EngineHandle::Control(e) => e.descriptor(),
            EngineHandle::Output(e) => e.descriptor(),
        }
    }

    pub fn kind(&self) -> EngineKind {
        match self {
            EngineHandle::Input(_) => EngineKind::Input,
            EngineHandle::Storage(_) => EngineKind::Storage,
            EngineHandle::Computation(_) => EngineKind::Computation,
            EngineHandle::Control(_) => EngineKind::Control,
            EngineHandle::Output(_) => EngineKind::Output,
        }
    }

    pub fn probe(&self, params: &Params) -> Availability {
        match self {
            EngineHandle::Input(e) => e.probe(params),
            EngineHandle::Storage(e) => e.probe(params),
            EngineHandle::Computation(e) => e.probe(params),
            EngineHandle::Control(e) => e.probe(params),
            EngineHandle::Output(e) => e.probe(params),
        }
    }
}

/// (kind, name) → engine. Uniqueness is per kind: the same name may appear
/// under two different kinds.
#[derive(Clone, Default)]
pub struct EngineRegistry {
    engines: BTreeMap<(EngineKind, String), EngineHandle>,
}

impl EngineRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, handle: EngineHandle) -> Result<()> {
        let desc = handle.descriptor().clone();
        if desc.kind != handle.kind() {
            return Err(Error::InvalidParam {
                key: "kind".into(),
                message: format!(
                    "descriptor kind {} does not match wrapper kind {}",
                    desc.kind,
                    handle.kind()
                ),
            });
        }
        let slot = (desc.kind, desc.name.clone());
        if self.engines.contains_key(&slot) {
            return Err(Error::DuplicateEngine {
                name: desc.name,
                kind: desc.kind,
            });
        }
        self.engines.insert(slot, handle);
        Ok(())
    }

    pub fn lookup(&self, kind: EngineKind, name: &str) -> Option<&EngineHandle> {
        self.engines.get(&(kind, name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.engines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.engines.is_empty()
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &EngineDescriptor> {
        self.engines.values().map(|h| h.descriptor())
    }
}

/// Convenience for tasks that require a specific record shape.
pub fn expect_all<'a, F, T>(
    task: &str,
    expected: &str,
    records: &'a [Record],
    extract: F,
) -> Result<Vec<T>>
where
    F: Fn(&'a Record) -> Option<T>,
{
    records
        .iter()
        .map(|r| {
            extract(r).ok_or_else(|| Error::TypeMismatch {
                task: task.to_string(),
                expected: expected.to_string(),
                found: r.value.variant_tag().to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct NullInput {
        desc: EngineDescriptor,
    }

    impl Engine for NullInput {
        fn descriptor(&self) -> &EngineDescriptor {
            &self.desc
        }
        fn probe(&self, _: &Params) -> Availability {
            Availability::Available
        }
    }

    impl InputEngine for NullInput {
        fn read(&self, _: &Params) -> Result<BigData> {
            Ok(BigData::from_records(
                vec![],
                crate::model::LineageEntry::origin_generator("words", 0, 0),
            ))
        }
    }

    fn null_input(name: &str) -> EngineHandle {
        EngineHandle::Input(Arc::new(NullInput {
            desc: EngineDescriptor::new(name, EngineKind::Input, "test"),
        }))
    }

    #[test]
    fn register_and_lookup() {
        let mut reg = EngineRegistry::new();
        reg.register(null_input("memstore")).unwrap();
        assert_eq!(reg.len(), 1);
        assert!(reg.lookup(EngineKind::Input, "memstore").is_some());
        assert!(reg.lookup(EngineKind::Storage, "memstore").is_none());
    }

    #[test]
    fn duplicate_rejected() {
        let mut reg = EngineRegistry::new();
        reg.register(null_input("file")).unwrap();
        let err = reg.register(null_input("file")).unwrap_err();
        assert!(matches!(err, Error::DuplicateEngine { .. }));
    }
}
