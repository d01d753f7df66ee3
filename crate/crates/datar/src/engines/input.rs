//! Input engines: file reader and seeded random data generator.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{
    Availability, Engine, EngineDescriptor, EngineKind, InputEngine, Params,
};
use crate::error::{Error, Result};
use crate::model::{self, BigData, LineageEntry, Record, RecordFormat, Value};

/// Fixed 1,000-word lexicon the word generator draws from.
pub fn lexicon() -> Vec<&'static str> {
    static WORDS: &str = include_str!("../../data/lexicon.txt");
    WORDS.lines().collect()
}

/// Reads a file on disk into the dataset model (params: `path`, `format`).
pub struct FileInput {
    desc: EngineDescriptor,
}

impl FileInput {
    pub fn new() -> Self {
        FileInput {
            desc: EngineDescriptor::new("file", EngineKind::Input, "1"),
        }
    }
}

impl Default for FileInput {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine for FileInput {
    fn descriptor(&self) -> &EngineDescriptor {
        &self.desc
    }

    fn probe(&self, params: &Params) -> Availability {
        match params.get("path") {
            None => Availability::Unavailable("missing `path` param".into()),
            Some(path) if Path::new(path).is_file() => Availability::Available,
            Some(path) => Availability::Unavailable(format!("file not readable: {path}")),
        }
    }
}

impl InputEngine for FileInput {
    fn read(&self, params: &Params) -> Result<BigData> {
        let path = params.get("path").ok_or_else(|| Error::InvalidParam {
            key: "path".into(),
            message: "file input requires a path".into(),
        })?;
        let format = RecordFormat::parse(params.get("format").map(String::as_str).unwrap_or("lines"))?;
        model::from_file(path, format)
    }
}

/// Seeded random dataset generator (params: `kind`, `size`, `seed`).
/// Output is fully determined by the three params, and the origin lineage
/// entry records them, so generated datasets replay exactly.
pub struct GeneratorInput {
    desc: EngineDescriptor,
}

impl GeneratorInput {
    pub fn new() -> Self {
        GeneratorInput {
            desc: EngineDescriptor::new("generator", EngineKind::Input, "1"),
        }
    }
}

impl Default for GeneratorInput {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine for GeneratorInput {
    fn descriptor(&self) -> &EngineDescriptor {
        &self.desc
    }

    fn probe(&self, _: &Params) -> Availability {
        Availability::Available
    }
}

impl InputEngine for GeneratorInput {
    fn read(&self, params: &Params) -> Result<BigData> {
        let kind = params.get("kind").map(String::as_str).unwrap_or("words");
        let size: usize = parse_param(params, "size", 1000)?;
        let seed: u64 = parse_param(params, "seed", 0)?;
        generate(kind, size, seed)
    }
}

fn parse_param<T: std::str::FromStr>(params: &Params, key: &str, default: T) -> Result<T> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| Error::InvalidParam {
            key: key.to_string(),
            message: format!("cannot parse {v:?}"),
        }),
    }
}

/// Number of pages in the generated edge universe (`page0`..`page999`).
pub const PAGE_UNIVERSE: usize = 1000;

pub fn generate(kind: &str, size: usize, seed: u64) -> Result<BigData> {
    let records = generate_records(kind, size, seed)?;
    Ok(BigData::from_records(
        records,
        LineageEntry::origin_generator(kind, size, seed),
    ))
}

pub fn generate_records(kind: &str, size: usize, seed: u64) -> Result<Vec<Record>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(size);
    match kind {
        "words" => {
            let lex = lexicon();
            for _ in 0..size {
                records.push(Record::text(lex[rng.gen_range(0..lex.len())]));
            }
        }
        "strings" => {
            for _ in 0..size {
                let s: String = (0..8)
                    .map(|_| char::from(b'a' + rng.gen_range(0..26u8)))
                    .collect();
                records.push(Record::text(s));
            }
        }
        "points" => {
            for i in 0..size {
                let x = rng.gen_range(0.0..1000.0);
                let y = rng.gen_range(0.0..1000.0);
                records.push(Record::new(i.to_string(), Value::Point { x, y })?);
            }
        }
        "edges" => {
            for _ in 0..size {
                let src = format!("page{}", rng.gen_range(0..PAGE_UNIVERSE));
                let dst = format!("page{}", rng.gen_range(0..PAGE_UNIVERSE));
                records.push(Record::new(
                    format!("{src}->{dst}"),
                    Value::Edge { src, dst },
                )?);
            }
        }
        other => return Err(Error::UnknownKind(other.to_string())),
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicon_has_1000_distinct_words() {
        let lex = lexicon();
        assert_eq!(lex.len(), 1000);
        let mut dedup = lex.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), 1000);
    }

    #[test]
    fn generator_is_deterministic() {
        for kind in ["words", "strings", "points", "edges"] {
            let a = generate_records(kind, 1000, 42).unwrap();
            let b = generate_records(kind, 1000, 42).unwrap();
            assert_eq!(a, b, "kind {kind}");
            let c = generate_records(kind, 1000, 43).unwrap();
            assert_ne!(a, c, "kind {kind} ignores seed");
        }
    }

    #[test]
    fn edge_universe_is_bounded() {
        let records = generate_records("edges", 1000, 7).unwrap();
        assert_eq!(records.len(), 1000);
        for r in &records {
            let Value::Edge { src, dst } = &r.value else {
                panic!("non-edge record");
            };
            for page in [src, dst] {
                let idx: usize = page.strip_prefix("page").unwrap().parse().unwrap();
                assert!(idx < PAGE_UNIVERSE);
            }
        }
    }

    #[test]
    fn empty_generation() {
        let bd = generate("points", 0, 99).unwrap();
        assert!(bd.is_empty());
        assert_eq!(bd.lineage.len(), 1);
    }

    #[test]
    fn unknown_kind() {
        assert!(matches!(
            generate("moods", 10, 0).unwrap_err(),
            Error::UnknownKind(_)
        ));
    }

    #[test]
    fn file_probe_reflects_path() {
        let engine = FileInput::new();
        let mut params = Params::new();
        assert!(!engine.probe(&params).is_available());
        params.insert("path".into(), "/no/such/file".into());
        assert!(!engine.probe(&params).is_available());
        let f = tempfile::NamedTempFile::new().unwrap();
        params.insert("path".into(), f.path().display().to_string());
        assert!(engine.probe(&params).is_available());
    }
}
