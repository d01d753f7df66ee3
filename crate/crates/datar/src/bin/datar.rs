use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use datar::harness::{self, RunOptions};

#[derive(Parser)]
#[command(name = "datar", about = "Pluggable big-data management framework", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a config file, resolve and probe every engine slot
    Validate { config: PathBuf },
    /// Run one workload pipeline (wordcount, sort, kmeans, pagerank)
    Run {
        job: String,
        #[arg(long)]
        config: PathBuf,
        /// Generate this many input records instead of using the configured input
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Cluster count (kmeans)
        #[arg(long)]
        k: Option<usize>,
        /// Iteration count (kmeans, pagerank)
        #[arg(long)]
        iterations: Option<usize>,
        /// Damping factor (pagerank)
        #[arg(long)]
        damping: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the benchmark suite over a plan file
    Bench {
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the engine registry and the registered computation tasks
    ListEngines,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { config } => harness::cmd_validate(&config),
        Command::Run {
            job,
            config,
            size,
            seed,
            k,
            iterations,
            damping,
            out,
        } => harness::cmd_run(
            &job,
            &config,
            &RunOptions {
                size,
                seed,
                k,
                iterations,
                damping,
                out_dir: out,
            },
        ),
        Command::Bench { plan, config, out } => {
            harness::cmd_bench(plan.as_deref(), config.as_deref(), &out)
        }
        Command::ListEngines => harness::cmd_list_engines(),
    };
    ExitCode::from(code as u8)
}
