//! Runs a small benchmark plan over the in-memory chain and prints the
//! per-stage timing table.

use datar::bench::{render_bench_table, run_bench, BenchPlan};
use datar::config::parse_config;
use datar::framework::Datar;

fn main() -> datar::Result<()> {
    let datar = Datar::with_builtins();
    let config = parse_config(
        "[datar]\n\
         input = generator\n\
         storage = memstore\n\
         computation = builtin\n\
         control = standalone\n\
         output = json\n",
    )?;
    let chain = datar.build_chain(&config)?;

    let plan = BenchPlan {
        jobs: vec!["wordcount".into(), "sort".into(), "kmeans".into(), "pagerank".into()],
        sizes: vec![1_000, 10_000],
        repetitions: 2,
        seed: 42,
    };
    let report = run_bench(&plan, &chain)?;
    print!("{}", render_bench_table(&report));
    Ok(())
}
