//! Built-in computation engine: dispatches pipeline tasks to the operator
//! registry, so every execution is recorded as an Action in lineage and can
//! be replayed.

use std::sync::Arc;

use crate::engine::{
    Availability, ComputationEngine, Engine, EngineDescriptor, EngineKind, Params,
};
use crate::error::{Error, Result};
use crate::model::{BigData, OpRegistry};

pub struct BuiltinCompute {
    desc: EngineDescriptor,
    ops: Arc<OpRegistry>,
}

impl BuiltinCompute {
    pub fn new(ops: Arc<OpRegistry>) -> Self {
        BuiltinCompute {
            desc: EngineDescriptor::new("builtin", EngineKind::Computation, "1"),
            ops,
        }
    }
}

impl Engine for BuiltinCompute {
    fn descriptor(&self) -> &EngineDescriptor {
        &self.desc
    }

    fn probe(&self, _: &Params) -> Availability {
        Availability::Available
    }
}

impl ComputationEngine for BuiltinCompute {
    fn resolves(&self, task: &str) -> bool {
        self.ops.contains(task)
    }

    fn run(&self, task: &str, input: &BigData, params: &Params) -> Result<BigData> {
        let f = self
            .ops
            .get(task)
            .ok_or_else(|| Error::TaskResolutionError {
                kind: EngineKind::Computation,
                engine: self.desc.name.clone(),
                task: task.to_string(),
            })?
            .clone();
        input.apply_action(task, f.as_ref(), params.clone())
    }

    fn task_names(&self) -> Vec<String> {
        self.ops.names().map(str::to_string).collect()
    }
}
