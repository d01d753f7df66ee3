//! Sorts generated random strings and emits the result as JSON.

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
         output = json\n\
         \n\
         [input.generator]\n\
         kind = strings\n\
         size = 20\n\
         seed = 7\n",
    )?;
    let chain = datar.build_chain(&config)?;
    let pipeline = standard_pipeline("sort", Params::new(), "sort", Params::new(), Params::new())?;
    let run = execute(&pipeline, &chain)?;
    println!("{}", run.documents[0]);
    Ok(())
}
