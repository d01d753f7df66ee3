//! A unified big-data management framework built from five pluggable engine
//! kinds — input, storage, computation, control and output — chained by
//! configuration, with data storage at the center.
//!
//! A validated [`config::ConfChain`] binds one engine per kind; job
//! pipelines composed of typed pipes execute automatically over the chain
//! with per-stage wall time and memory instrumentation. Data flows as
//! [`model::BigData`], a lineage-tracked dataset: Action operators create
//! new datasets, Transformation operators update in place, and replaying
//! the recorded lineage from its origin reconstructs any dataset exactly.
//!
//! Built-in reference engines make the framework fully operable with no
//! external services: file and seeded-generator input, in-memory and
//! durable append-only-log storage, a computation engine running the four
//! reference workloads (word count, sort, k-means, PageRank), standalone
//! job control, and table/JSON/SVG output.
//!
//! Three extension surfaces, by user role:
//! - Engine Writers implement one of the engine traits in [`engine`] plus
//!   an availability probe, and register the wrapper in the registry.
//! - Framework Writers extend the pipeline machinery in [`pipeline`].
//! - App Writers compose pipelines over a configured chain — start from
//!   the `examples/` directory or the `datar` CLI.
//!
//! ```
//! use datar::config::parse_config;
//! use datar::engine::Params;
//! use datar::framework::Datar;
//! use datar::pipeline::{execute, standard_pipeline};
//!
//! let datar = Datar::with_builtins();
//! let config = parse_config(
//!     "[datar]\n\
//!      input = generator\n\
//!      storage = memstore\n\
//!      computation = builtin\n\
//!      control = standalone\n\
//!      output = json\n\
//!      \n\
//!      [input.generator]\n\
//!      kind = words\n\
//!      size = 100\n\
//!      seed = 7\n",
//! )?;
//! let chain = datar.build_chain(&config)?;
//! let pipeline = standard_pipeline(
//!     "wordcount", Params::new(), "wordcount", Params::new(), Params::new())?;
//! let run = execute(&pipeline, &chain)?;
//! assert_eq!(run.report.stages.len(), 5);
//! # Ok::<(), datar::error::Error>(())
//! ```

pub mod bench;
pub mod config;
pub mod engine;
pub mod engines;
pub mod error;
pub mod framework;
pub mod harness;
pub mod model;
pub mod pipeline;
pub mod tasks;

pub use config::{build_chain, parse_config, probe_all, serialize_config, ConfChain, DatarConfig};
pub use engine::{Availability, EngineDescriptor, EngineKind, EngineRegistry};
pub use error::{Error, Result};
pub use framework::Datar;
pub use model::{BigData, DatasetId, LineageEntry, OpRegistry, Record, RecordFormat, Value};
pub use pipeline::{connect, execute, JobPipeline, Pipe, RunReport, Task};
