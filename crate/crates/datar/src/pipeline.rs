//! Pipe and Task composition into job pipelines, and the staged executor
//! with per-stage wall time and memory instrumentation.
//!
//! Stages run sequentially over the bound engine chain. When a StoragePipe
//! precedes the ComputationPipe, the computation input is read back from
//! the storage engine, so storage is an honest pipeline participant rather
//! than a bypassed side effect.

use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::ConfChain;
use crate::engine::{EngineKind, Params, StoreHandle};
use crate::error::{Error, Result};
use crate::model::BigData;

/// The executable unit within a pipe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub name: String,
    pub kind: EngineKind,
    pub params: Params,
}

impl Task {
    pub fn new(name: &str, kind: EngineKind) -> Self {
        Task {
            name: name.to_string(),
            kind,
            params: Params::new(),
        }
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }
}

/// A pipeline stage of one of the five kinds, holding at least one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pipe {
    pub kind: EngineKind,
    pub tasks: Vec<Task>,
}

impl Pipe {
    pub fn new(kind: EngineKind, tasks: Vec<Task>) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::EmptyPipeline);
        }
        for task in &tasks {
            if task.kind != kind {
                return Err(Error::OrderViolation(format!(
                    "task {} declares kind {} but sits in a {} pipe",
                    task.name, task.kind, kind
                )));
            }
        }
        Ok(Pipe { kind, tasks })
    }

    pub fn single(kind: EngineKind, task: Task) -> Result<Self> {
        Pipe::new(kind, vec![task])
    }
}

/// Ordered composition of pipes: at most one per kind; Control first when
/// present; Input before Storage before Computation before Output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobPipeline {
    pub name: String,
    pub pipes: Vec<Pipe>,
}

/// Validates pipe composition; no execution happens here.
pub fn connect(name: &str, pipes: Vec<Pipe>) -> Result<JobPipeline> {
    if pipes.is_empty() {
        return Err(Error::EmptyPipeline);
    }
    let mut seen: Vec<EngineKind> = Vec::new();
    for pipe in &pipes {
        if seen.contains(&pipe.kind) {
            return Err(Error::DuplicatePipeKind(pipe.kind.to_string()));
        }
        seen.push(pipe.kind);
    }
    let rank = |k: EngineKind| match k {
        EngineKind::Control => 0,
        EngineKind::Input => 1,
        EngineKind::Storage => 2,
        EngineKind::Computation => 3,
        EngineKind::Output => 4,
    };
    for pair in seen.windows(2) {
        if rank(pair[0]) >= rank(pair[1]) {
            return Err(Error::OrderViolation(format!(
                "{} pipe cannot follow {} pipe",
                pair[1], pair[0]
            )));
        }
    }
    Ok(JobPipeline {
        name: name.to_string(),
        pipes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub kind: String,
    /// Stage wall time in milliseconds.
    pub ms: f64,
    /// Used process memory in MB sampled at stage start.
    pub mem_mb: f64,
}

/// Per-stage instrumentation for one pipeline execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub job: String,
    pub size: usize,
    pub stages: Vec<StageReport>,
    /// Total wall time minus the sum of stage times, never negative.
    pub framework_ms: f64,
    #[serde(skip, default)]
    pub timestamp_secs: u64,
}

impl RunReport {
    pub fn stage(&self, kind: EngineKind) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.kind == kind.to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Used process memory in MB (resident set), sampled from the runtime.
pub fn sample_memory_mb() -> f64 {
    if let Ok(statm) = fs::read_to_string("/proc/self/statm") {
        if let Some(resident_pages) = statm
            .split_whitespace()
            .nth(1)
            .and_then(|v| v.parse::<f64>().ok())
        {
            return resident_pages * 4096.0 / (1024.0 * 1024.0);
        }
    }
    0.0
}

/// A completed pipeline execution: final dataset, instrumentation, and any
/// documents the output stage emitted.
#[derive(Debug)]
pub struct PipelineRun {
    pub data: BigData,
    pub report: RunReport,
    pub documents: Vec<String>,
}

fn merged_params(binding: &Params, task: &Params) -> Params {
    let mut params = binding.clone();
    for (k, v) in task {
        params.insert(k.clone(), v.clone());
    }
    params
}

/// Fail-fast resolution check: every task must be resolvable in the engine
/// bound to its slot before any stage runs.
fn validate_tasks(pipeline: &JobPipeline, chain: &ConfChain) -> Result<()> {
    for pipe in &pipeline.pipes {
        let engine_name = chain.binding(pipe.kind).descriptor.name.clone();
        for task in &pipe.tasks {
            let ok = match pipe.kind {
                EngineKind::Input => task.name == "read",
                EngineKind::Storage => task.name == "write",
                EngineKind::Control => task.name == "admit",
                EngineKind::Output => task.name == "emit",
                EngineKind::Computation => chain.computation().0.resolves(&task.name),
            };
            if !ok {
                return Err(Error::TaskResolutionError {
                    kind: pipe.kind,
                    engine: engine_name,
                    task: task.name.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Runs the pipeline stages sequentially over the chain. Control admission
/// brackets the whole run and is reported as a stage; any stage failure
/// aborts the run with the failing stage identified, and the control token
/// is released either way.
pub fn execute(pipeline: &JobPipeline, chain: &ConfChain) -> Result<PipelineRun> {
    validate_tasks(pipeline, chain)?;

    let total_start = Instant::now();
    let mut stages: Vec<StageReport> = Vec::new();

    let (control, _) = chain.control();
    let control_mem = sample_memory_mb();
    let control_start = Instant::now();
    let token = control.admit(&pipeline.name, true)?;
    stages.push(StageReport {
        kind: EngineKind::Control.to_string(),
        ms: control_start.elapsed().as_secs_f64() * 1e3,
        mem_mb: control_mem,
    });

    let result = run_stages(pipeline, chain, &mut stages);
    control.release(token)?;

    let (data, documents) = result?;
    let size = data.len();
    let total_ms = total_start.elapsed().as_secs_f64() * 1e3;
    let stage_sum: f64 = stages.iter().map(|s| s.ms).sum();
    let report = RunReport {
        job: pipeline.name.clone(),
        size,
        stages,
        framework_ms: (total_ms - stage_sum).max(0.0),
        timestamp_secs: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    Ok(PipelineRun {
        data,
        report,
        documents,
    })
}

fn run_stages(
    pipeline: &JobPipeline,
    chain: &ConfChain,
    stages: &mut Vec<StageReport>,
) -> Result<(BigData, Vec<String>)> {
    let mut current: Option<BigData> = None;
    let mut store: Option<Box<dyn StoreHandle>> = None;
    let mut documents = Vec::new();

    for pipe in &pipeline.pipes {
        if pipe.kind == EngineKind::Control {
            // already bracketed by the ambient admit/release
            continue;
        }
        let mem_mb = sample_memory_mb();
        let start = Instant::now();
        let stage_result = run_pipe(pipe, chain, &mut current, &mut store, &mut documents);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        stage_result.map_err(|e| Error::StageFailed {
            stage: pipe.kind.to_string(),
            source: Box::new(e),
        })?;
        stages.push(StageReport {
            kind: pipe.kind.to_string(),
            ms,
            mem_mb,
        });
    }

    let data = current.ok_or(Error::EmptyPipeline)?;
    Ok((data, documents))
}

fn run_pipe(
    pipe: &Pipe,
    chain: &ConfChain,
    current: &mut Option<BigData>,
    store: &mut Option<Box<dyn StoreHandle>>,
    documents: &mut Vec<String>,
) -> Result<()> {
    match pipe.kind {
        EngineKind::Input => {
            let (engine, binding_params) = chain.input();
            for task in &pipe.tasks {
                let params = merged_params(&binding_params, &task.params);
                *current = Some(engine.read(&params)?);
            }
        }
        EngineKind::Storage => {
            let (engine, binding_params) = chain.storage();
            let bd = current.as_ref().ok_or(Error::EmptyPipeline)?;
            for task in &pipe.tasks {
                let params = merged_params(&binding_params, &task.params);
                let mut handle = engine.open(&params)?;
                handle.write(bd)?;
                *store = Some(handle);
            }
        }
        EngineKind::Computation => {
            let (engine, _) = chain.computation();
            let mut bd = current.take().ok_or(Error::EmptyPipeline)?;
            // read the input back from the store when a storage stage ran;
            // keep the in-flight lineage so the result replays from origin
            if let Some(handle) = store.as_ref() {
                let stored = handle.read(bd.id)?;
                bd.records = stored.records;
            }
            for task in &pipe.tasks {
                bd = engine.run(&task.name, &bd, &task.params)?;
            }
            *current = Some(bd);
        }
        EngineKind::Output => {
            let (engine, binding_params) = chain.output();
            let bd = current.as_ref().ok_or(Error::EmptyPipeline)?;
            for task in &pipe.tasks {
                let params = merged_params(&binding_params, &task.params);
                let doc = engine.emit(bd, &params)?;
                if let Some(path) = params.get("path") {
                    if let Some(parent) = Path::new(path).parent() {
                        if !parent.as_os_str().is_empty() {
                            fs::create_dir_all(parent)?;
                        }
                    }
                    fs::write(path, &doc)?;
                }
                documents.push(doc);
            }
        }
        EngineKind::Control => unreachable!("control pipes are ambient"),
    }
    Ok(())
}

/// The canonical four-stage pipeline: read, store, compute one task, emit.
pub fn standard_pipeline(
    job: &str,
    input_params: Params,
    task_name: &str,
    task_params: Params,
    output_params: Params,
) -> Result<JobPipeline> {
    connect(
        job,
        vec![
            Pipe::single(
                EngineKind::Input,
                Task::new("read", EngineKind::Input).with_params(input_params),
            )?,
            Pipe::single(EngineKind::Storage, Task::new("write", EngineKind::Storage))?,
            Pipe::single(
                EngineKind::Computation,
                Task::new(task_name, EngineKind::Computation).with_params(task_params),
            )?,
            Pipe::single(
                EngineKind::Output,
                Task::new("emit", EngineKind::Output).with_params(output_params),
            )?,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input_pipe() -> Pipe {
        Pipe::single(EngineKind::Input, Task::new("read", EngineKind::Input)).unwrap()
    }

    fn pipe(kind: EngineKind, name: &str) -> Pipe {
        Pipe::single(kind, Task::new(name, kind)).unwrap()
    }

    #[test]
    fn canonical_template_connects() {
        let pipeline = connect(
            "wc",
            vec![
                input_pipe(),
                pipe(EngineKind::Storage, "write"),
                pipe(EngineKind::Computation, "wordcount"),
                pipe(EngineKind::Output, "emit"),
            ],
        )
        .unwrap();
        assert_eq!(pipeline.pipes.len(), 4);
    }

    #[test]
    fn order_violation() {
        let err = connect(
            "bad",
            vec![pipe(EngineKind::Computation, "wordcount"), input_pipe()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::OrderViolation(_)));
    }

    #[test]
    fn control_must_be_first() {
        let err = connect(
            "bad",
            vec![input_pipe(), pipe(EngineKind::Control, "admit")],
        )
        .unwrap_err();
        assert!(matches!(err, Error::OrderViolation(_)));
        connect(
            "good",
            vec![pipe(EngineKind::Control, "admit"), input_pipe()],
        )
        .unwrap();
    }

    #[test]
    fn duplicate_pipe_kind() {
        let err = connect("bad", vec![input_pipe(), input_pipe()]).unwrap_err();
        assert!(matches!(err, Error::DuplicatePipeKind(_)));
    }

    #[test]
    fn empty_pipeline_rejected() {
        assert!(matches!(connect("empty", vec![]), Err(Error::EmptyPipeline)));
        assert!(matches!(
            Pipe::new(EngineKind::Input, vec![]),
            Err(Error::EmptyPipeline)
        ));
    }

    #[test]
    fn task_kind_must_match_pipe_kind() {
        let err = Pipe::new(
            EngineKind::Input,
            vec![Task::new("write", EngineKind::Storage)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::OrderViolation(_)));
    }

    #[test]
    fn memory_sample_is_nonnegative_and_stable() {
        let a = sample_memory_mb();
        assert!(a >= 0.0);
        let b = sample_memory_mb();
        let hi = a.max(b).max(1.0);
        let lo = a.min(b).max(1.0);
        assert!(hi / lo < 1.1, "consecutive samples differ: {a} vs {b}");
    }

    #[test]
    fn memory_sample_sees_live_allocation() {
        let before = sample_memory_mb();
        let buf = vec![1u8; 100 * 1024 * 1024];
        let after = sample_memory_mb();
        assert!(buf.iter().all(|&b| b == 1));
        assert!(
            after - before >= 80.0,
            "100 MB allocation only moved the sample by {} MB",
            after - before
        );
    }
}
