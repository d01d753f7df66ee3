//! Counts word frequencies over generated input and prints the result as a
//! text table, plus the per-stage run report.

use datar::config::parse_config;
use datar::engine::Params;
use datar::framework::Datar;
use datar::pipeline::{execute, standard_pipeline};

fn main() -> datar::Result<()> {
    let datar = Datar::with_builtins();
    let config = parse_config(
        "[datar]\n\
         input = generator\n\
         storage = memstore\n\
         computation = builtin\n\
         control = standalone\n\
         output = table\n\
         \n\
         [input.generator]\n\
         kind = words\n\
         size = 1000\n\
         seed = 42\n",
    )?;
    let chain = datar.build_chain(&config)?;

    let pipeline =
        standard_pipeline("wordcount", Params::new(), "wordcount", Params::new(), Params::new())?;
    let run = execute(&pipeline, &chain)?;

    println!("{}", run.documents[0]);
    println!("{}", run.report.to_json());
    Ok(())
}
