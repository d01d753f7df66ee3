//! Command-line entry points: validate a config, run a workload pipeline,
//! run the benchmark suite, list the registry.
//!
//! Exit codes: 0 success, 1 validation error (bad config, unknown engine,
//! bad params), 2 runtime error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::{self, BenchPlan};
use crate::config::{self, ConfChain, DatarConfig};
use crate::engine::{EngineKind, Params};
use crate::error::Error;
use crate::framework::Datar;
use crate::model::Value;
use crate::pipeline::{self, PipelineRun};
use crate::tasks::{self, TASK_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Maps an error to its exit code: configuration and parameter problems are
/// validation failures, everything else is a runtime failure.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::MissingSlot(_)
        | Error::SyntaxError { .. }
        | Error::UnknownSection(_)
        | Error::UnknownEngine { .. }
        | Error::EngineUnavailable { .. }
        | Error::DuplicateEngine { .. }
        | Error::InvalidParam { .. }
        | Error::UnknownParamKey(_)
        | Error::UnknownKind(_)
        | Error::KTooLarge { .. }
        | Error::FileNotFound(_)
        | Error::TaskResolutionError { .. } => EXIT_VALIDATION,
        Error::StageFailed { source, .. } => exit_code_for(source),
        Error::OperatorError { .. } => EXIT_RUNTIME,
        _ => EXIT_RUNTIME,
    }
}

fn load_config(path: &Path) -> Result<DatarConfig, Error> {
    let text = fs::read_to_string(path)
        .map_err(|_| Error::FileNotFound(path.display().to_string()))?;
    config::parse_config(&text)
}

/// Storage engines need their directory to exist before the availability
/// probe; creating it is part of deployment, like starting a server.
fn prepare_storage_dir(config: &DatarConfig) {
    let params = config.slot_params(EngineKind::Storage);
    if config.engine_name(EngineKind::Storage) == "logstore" {
        let dir = params.get("dir").map(String::as_str).unwrap_or("bigdb");
        let _ = fs::create_dir_all(dir);
    }
}

/// `validate <config>`: parse, resolve and probe every slot, print one
/// status line per slot.
pub fn cmd_validate(config_path: &Path) -> i32 {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    prepare_storage_dir(&config);
    let datar = Datar::with_builtins();
    let mut ok = true;
    for kind in EngineKind::ALL {
        let name = config.engine_name(kind);
        match datar.registry().lookup(kind, name) {
            None => {
                println!("{kind}: {name} Unknown (not registered)");
                ok = false;
            }
            Some(handle) => {
                let status = handle.probe(&config.params_for(kind, name));
                if !status.is_available() {
                    ok = false;
                }
                println!("{kind}: {name} {status}");
            }
        }
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}

/// Options for `run <job>`.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub size: Option<usize>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub iterations: Option<usize>,
    pub damping: Option<f64>,
    pub out_dir: PathBuf,
}

fn task_params(job: &str, opts: &RunOptions) -> Result<Params, Error> {
    let mut params = Params::new();
    match job {
        "kmeans" => {
            params.insert("k".into(), opts.k.unwrap_or(3).to_string());
            params.insert(
                "iterations".into(),
                opts.iterations.unwrap_or(20).to_string(),
            );
            params.insert("seed".into(), opts.seed.unwrap_or(0).to_string());
        }
        "pagerank" => {
            params.insert("damping".into(), opts.damping.unwrap_or(0.85).to_string());
            params.insert(
                "iterations".into(),
                opts.iterations.unwrap_or(20).to_string(),
            );
        }
        _ => {}
    }
    Ok(params)
}

/// `run <job> --config <file>`: execute the canonical four-stage pipeline
/// and write the emitted document plus the run report under the output dir.
pub fn cmd_run(job: &str, config_path: &Path, opts: &RunOptions) -> i32 {
    match run_job(job, config_path, opts) {
        Ok((run, doc_path, report_path)) => {
            println!(
                "{job}: {} records in, {} records out",
                run.report.size,
                run.data.len()
            );
            println!("wrote {}", doc_path.display());
            println!("wrote {}", report_path.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            exit_code_for(&e)
        }
    }
}

pub fn run_job(
    job: &str,
    config_path: &Path,
    opts: &RunOptions,
) -> Result<(PipelineRun, PathBuf, PathBuf), Error> {
    if !TASK_NAMES.contains(&job) {
        return Err(Error::UnknownKind(job.to_string()));
    }
    let config = load_config(config_path)?;
    prepare_storage_dir(&config);
    let datar = Datar::with_builtins();
    let chain = datar.build_chain(&config)?;

    let input_params = match opts.size {
        Some(size) => {
            if job == "kmeans" {
                let k = opts.k.unwrap_or(3);
                if k > size {
                    return Err(Error::KTooLarge { k, n: size });
                }
            }
            let mut p = Params::new();
            p.insert("kind".into(), bench::input_kind_for(job).into());
            p.insert("size".into(), size.to_string());
            p.insert("seed".into(), opts.seed.unwrap_or(0).to_string());
            p
        }
        None => Params::new(),
    };
    // with --size the data comes from the seeded generator regardless of
    // the configured input engine
    let chain = if opts.size.is_some() && config.engine_name(EngineKind::Input) != "generator" {
        let mut slots = BTreeMap::new();
        for kind in EngineKind::ALL {
            slots.insert(kind, config.engine_name(kind).to_string());
        }
        slots.insert(EngineKind::Input, "generator".to_string());
        let mut generator_config = DatarConfig::new(slots)?;
        for kind in EngineKind::ALL.into_iter().skip(1) {
            let name = config.engine_name(kind).to_string();
            generator_config.set_params(kind, &name, config.params_for(kind, &name));
        }
        datar.build_chain(&generator_config)?
    } else {
        chain
    };

    let pipeline = pipeline::standard_pipeline(
        job,
        input_params,
        job,
        task_params(job, opts)?,
        Params::new(),
    )?;
    let run = pipeline::execute(&pipeline, &chain)?;

    fs::create_dir_all(&opts.out_dir)?;
    let (output_engine, output_params) = chain.output();
    let document = render_result_document(job, &run, &chain, &output_params)?;
    let doc_path = opts
        .out_dir
        .join(format!("{job}_result.{}", output_engine.extension()));
    fs::write(&doc_path, document)?;
    let report_path = opts.out_dir.join(format!("{job}_report.json"));
    fs::write(&report_path, run.report.to_json())?;
    Ok((run, doc_path, report_path))
}

/// The emitted document for the final dataset. K-means results rendered as
/// SVG are joined back with their input points so the chart shows the
/// clustered points rather than the raw assignment pairs.
fn render_result_document(
    job: &str,
    run: &PipelineRun,
    chain: &ConfChain,
    output_params: &Params,
) -> Result<String, Error> {
    let (output_engine, _) = chain.output();
    if job == "kmeans" && output_engine.extension() == "svg" {
        let datar = Datar::with_builtins();
        let input = datar.replay(&run.data.lineage[..run.data.lineage.len() - 1])?;
        let assignments: Vec<usize> = run
            .data
            .records
            .iter()
            .map(|r| match &r.value {
                Value::Pair(_, c) => *c as usize,
                _ => 0,
            })
            .collect();
        let result = tasks::KMeansResult {
            assignments,
            centroids: Vec::new(),
            wcss_per_iteration: Vec::new(),
        };
        let clustered = tasks::clustered_points(&input.records, &result)?;
        let chart = crate::engines::output::ChartSpec::from_records(job, &clustered)?;
        return Ok(crate::engines::output::emit_svg(&chart));
    }
    let mut params = output_params.clone();
    params.entry("title".into()).or_insert_with(|| job.to_string());
    output_engine.emit(&run.data, &params)
}

/// `bench --plan <file>`: run the plan over the bench chain and write the
/// JSON report and the rendered text table.
pub fn cmd_bench(plan_path: Option<&Path>, config_path: Option<&Path>, out_dir: &Path) -> i32 {
    match run_bench_cmd(plan_path, config_path, out_dir) {
        Ok(table) => {
            print!("{table}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Default bench setup: seeded generator input, durable per-tuple storage.
pub const BENCH_CONFIG: &str = "\
[datar]
input = generator
storage = logstore
computation = builtin
control = standalone
output = json

[storage.logstore]
dir = bigdb/
mode = pertuple
";

pub fn run_bench_cmd(
    plan_path: Option<&Path>,
    config_path: Option<&Path>,
    out_dir: &Path,
) -> Result<String, Error> {
    let plan: BenchPlan = match plan_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|_| Error::FileNotFound(path.display().to_string()))?;
            serde_json::from_str(&text).map_err(|e| Error::InvalidParam {
                key: "plan".into(),
                message: e.to_string(),
            })?
        }
        None => BenchPlan::default_plan(),
    };
    plan.validate()?;

    let config = match config_path {
        Some(path) => load_config(path)?,
        None => config::parse_config(BENCH_CONFIG).expect("bench config parses"),
    };
    prepare_storage_dir(&config);
    let datar = Datar::with_builtins();
    let chain = datar.build_chain(&config)?;

    let report = bench::run_bench(&plan, &chain)?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("bench_report.json"), report.to_json())?;
    let table = bench::render_bench_table(&report);
    fs::write(out_dir.join("bench_table.txt"), &table)?;
    Ok(table)
}

/// `list-engines`: print every registered engine plus the computation tasks.
pub fn cmd_list_engines() -> i32 {
    let datar = Datar::with_builtins();
    for desc in datar.registry().descriptors() {
        println!("{}: {} (v{})", desc.kind, desc.name, desc.version);
    }
    let mut task_names: Vec<&str> = datar.ops().names().collect();
    task_names.sort_unstable();
    println!("tasks: {}", task_names.join(", "));
    EXIT_OK
}
