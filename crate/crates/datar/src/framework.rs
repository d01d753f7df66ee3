//! The framework instance: owns the engine registry and the operator
//! registry. One instance per process is the intended deployment; both
//! registries are frozen once chains are being built.

use std::sync::Arc;

use crate::config::{self, ConfChain, DatarConfig};
use crate::engine::{EngineHandle, EngineRegistry};
use crate::engines;
use crate::error::Result;
use crate::model::{BigData, LineageEntry, OpRegistry};
use crate::tasks;

pub struct Datar {
    registry: EngineRegistry,
    ops: Arc<OpRegistry>,
}

impl Datar {
    /// A framework instance with every built-in engine and the four
    /// reference workloads registered.
    pub fn with_builtins() -> Self {
        let mut ops = OpRegistry::new();
        tasks::register_tasks(&mut ops);
        let ops = Arc::new(ops);
        let mut registry = EngineRegistry::new();
        engines::register_builtins(&mut registry, ops.clone())
            .expect("built-in registration cannot collide");
        Datar { registry, ops }
    }

    /// An empty instance for Engine Writers who want full control over the
    /// registry contents.
    pub fn empty() -> Self {
        Datar {
            registry: EngineRegistry::new(),
            ops: Arc::new(OpRegistry::new()),
        }
    }

    pub fn registry(&self) -> &EngineRegistry {
        &self.registry
    }

    /// Extension point: register an additional engine before building chains.
    pub fn register_engine(&mut self, handle: EngineHandle) -> Result<()> {
        self.registry.register(handle)
    }

    pub fn ops(&self) -> &Arc<OpRegistry> {
        &self.ops
    }

    pub fn build_chain(&self, config: &DatarConfig) -> Result<ConfChain> {
        config::build_chain(&self.registry, config)
    }

    /// Rebuilds a dataset from its recorded history using the instance's
    /// operator registry.
    pub fn replay(&self, lineage: &[LineageEntry]) -> Result<BigData> {
        crate::model::replay(lineage, &self.ops)
    }
}

impl Default for Datar {
    fn default() -> Self {
        Self::with_builtins()
    }
}
