//! Plugs a hand-written input engine into the framework: implement the
//! trait, register the wrapper, select it by name in the config.

use std::collections::BTreeMap;
use std::sync::Arc;

use datar::config::DatarConfig;
use datar::engine::{
    Availability, Engine, EngineDescriptor, EngineHandle, EngineKind, InputEngine, Params,
};
use datar::framework::Datar;
use datar::model::{BigData, LineageEntry, Record};
use datar::pipeline::{execute, standard_pipeline};

/// Yields one record per whitespace-separated token of a fixed sentence.
struct SentenceInput {
    desc: EngineDescriptor,
    sentence: &'static str,
}

impl SentenceInput {
    fn new(sentence: &'static str) -> Self {
        SentenceInput {
            desc: EngineDescriptor::new("sentence", EngineKind::Input, "1"),
            sentence,
        }
    }
}

impl Engine for SentenceInput {
    fn descriptor(&self) -> &EngineDescriptor {
        &self.desc
    }

    fn probe(&self, _: &Params) -> Availability {
        Availability::Available
    }
}

impl InputEngine for SentenceInput {
    fn read(&self, _: &Params) -> datar::Result<BigData> {
        let records: Vec<Record> = self.sentence.split_whitespace().map(Record::text).collect();
        // not reconstructible from outside this process, so the origin
        // points at the engine itself
        Ok(BigData::from_records(
            records,
            LineageEntry::origin_store("sentence", "fixed"),
        ))
    }
}

fn main() -> datar::Result<()> {
    let mut datar = Datar::with_builtins();
    datar.register_engine(EngineHandle::Input(Arc::new(SentenceInput::new(
        "to be or not to be that is the question",
    ))))?;

    let mut slots = BTreeMap::new();
    slots.insert(EngineKind::Input, "sentence".to_string());
    slots.insert(EngineKind::Storage, "memstore".to_string());
    slots.insert(EngineKind::Computation, "builtin".to_string());
    slots.insert(EngineKind::Control, "standalone".to_string());
    slots.insert(EngineKind::Output, "table".to_string());
    let config = DatarConfig::new(slots)?;

    let chain = datar.build_chain(&config)?;
    let pipeline =
        standard_pipeline("wordcount", Params::new(), "wordcount", Params::new(), Params::new())?;
    let run = execute(&pipeline, &chain)?;
    println!("{}", run.documents[0]);
    Ok(())
}
