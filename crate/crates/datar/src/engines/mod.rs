//! Reference implementations of all five engine kinds, so the framework is
//! fully operable with no external services.

pub mod compute;
pub mod control;
pub mod input;
pub mod output;
pub mod storage;

use std::sync::Arc;

use crate::engine::{EngineHandle, EngineRegistry};
use crate::error::Result;
use crate::model::OpRegistry;

/// Registers every built-in engine. Names: input `file`/`generator`,
/// storage `memstore`/`logstore`, computation `builtin`, control
/// `standalone`, output `table`/`json`/`svg`.
pub fn register_builtins(registry: &mut EngineRegistry, ops: Arc<OpRegistry>) -> Result<()> {
    registry.register(EngineHandle::Input(Arc::new(input::FileInput::new())))?;
    registry.register(EngineHandle::Input(Arc::new(input::GeneratorInput::new())))?;
    registry.register(EngineHandle::Storage(Arc::new(storage::MemStoreEngine::new())))?;
    registry.register(EngineHandle::Storage(Arc::new(storage::LogStoreEngine::new())))?;
    registry.register(EngineHandle::Computation(Arc::new(
        compute::BuiltinCompute::new(ops),
    )))?;
    registry.register(EngineHandle::Control(Arc::new(
        control::StandaloneControl::new(),
    )))?;
    registry.register(EngineHandle::Output(Arc::new(output::TableOutput::new())))?;
    registry.register(EngineHandle::Output(Arc::new(output::JsonOutput::new())))?;
    registry.register(EngineHandle::Output(Arc::new(output::SvgOutput::new())))?;
    Ok(())
}
