//! Storage engines: an in-memory store and a durable append-only log store.
//!
//! Both support two commit modes. PerTuple commits every record
//! individually, reproducing the dominant per-insert cost profile of a
//! remote document store; Batch commits a dataset in one shot.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde_json::json;

use crate::engine::{
    Availability, Engine, EngineDescriptor, EngineKind, Params, StorageEngine, StoreHandle,
    WriteReceipt,
};
use crate::error::{Error, Result};
use crate::model::{BigData, DatasetId, LineageEntry, Record, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StorageMode {
    #[default]
    PerTuple,
    Batch,
}

impl StorageMode {
    pub fn from_params(params: &Params) -> Result<Self> {
        match params.get("mode").map(String::as_str) {
            None | Some("pertuple") => Ok(StorageMode::PerTuple),
            Some("batch") => Ok(StorageMode::Batch),
            Some(other) => Err(Error::InvalidParam {
                key: "mode".into(),
                message: format!("unknown storage mode {other:?}"),
            }),
        }
    }
}

/// Bit-exact log framing: 4-byte little-endian length, then the record as
/// UTF-8 JSON `{"k":...,"t":<variant tag>,"v":...}`, no padding.
pub fn encode_frame(record: &Record) -> Vec<u8> {
    let v = match &record.value {
        Value::Text(s) => json!(s),
        Value::Number(n) => json!(n),
        Value::Point { x, y } => json!([x, y]),
        Value::Edge { src, dst } => json!([src, dst]),
        Value::Pair(s, n) => json!([s, n]),
    };
    let body = json!({"k": record.key, "t": record.value.variant_tag(), "v": v}).to_string();
    let bytes = body.as_bytes();
    let mut frame = Vec::with_capacity(4 + bytes.len());
    frame.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    frame.extend_from_slice(bytes);
    frame
}

pub fn decode_frames(data: &[u8]) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    let mut pos = 0usize;
    while pos < data.len() {
        if pos + 4 > data.len() {
            return Err(Error::InvalidRecord("truncated frame length".into()));
        }
        let len = u32::from_le_bytes(data[pos..pos + 4].try_into().unwrap()) as usize;
        pos += 4;
        if pos + len > data.len() {
            return Err(Error::InvalidRecord("truncated frame body".into()));
        }
        let body: serde_json::Value = serde_json::from_slice(&data[pos..pos + len])
            .map_err(|e| Error::InvalidRecord(format!("bad frame json: {e}")))?;
        pos += len;
        records.push(decode_record(&body)?);
    }
    Ok(records)
}

fn decode_record(body: &serde_json::Value) -> Result<Record> {
    let bad = |m: &str| Error::InvalidRecord(format!("bad frame: {m}"));
    let key = body["k"].as_str().ok_or_else(|| bad("missing key"))?;
    let tag = body["t"].as_str().ok_or_else(|| bad("missing tag"))?;
    let v = &body["v"];
    let value = match tag {
        "text" => Value::Text(v.as_str().ok_or_else(|| bad("text value"))?.to_string()),
        "number" => Value::Number(v.as_f64().ok_or_else(|| bad("number value"))?),
        "point" => Value::Point {
            x: v[0].as_f64().ok_or_else(|| bad("point x"))?,
            y: v[1].as_f64().ok_or_else(|| bad("point y"))?,
        },
        "edge" => Value::Edge {
            src: v[0].as_str().ok_or_else(|| bad("edge src"))?.to_string(),
            dst: v[1].as_str().ok_or_else(|| bad("edge dst"))?.to_string(),
        },
        "pair" => Value::Pair(
            v[0].as_str().ok_or_else(|| bad("pair name"))?.to_string(),
            v[1].as_i64().ok_or_else(|| bad("pair count"))?,
        ),
        other => return Err(bad(&format!("unknown tag {other:?}"))),
    };
    Record::new(key, value)
}

#[derive(Clone)]
struct StoredDataset {
    records: Vec<Record>,
    lineage: Vec<LineageEntry>,
}

/// In-memory store shared by every handle opened from the same engine
/// instance. Optional `capacity` param caps the total stored record count.
pub struct MemStoreEngine {
    desc: EngineDescriptor,
    data: Arc<Mutex<HashMap<DatasetId, StoredDataset>>>,
}

impl MemStoreEngine {
    pub fn new() -> Self {
        MemStoreEngine {
            desc: EngineDescriptor::new("memstore", EngineKind::Storage, "1"),
            data: Arc::new(Mutex::new(HashMap::new())),
        }
    }
}

impl Default for MemStoreEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine for MemStoreEngine {
    fn descriptor(&self) -> &EngineDescriptor {
        &self.desc
    }

    fn probe(&self, params: &Params) -> Availability {
        match StorageMode::from_params(params) {
            Ok(_) => Availability::Available,
            Err(e) => Availability::Unavailable(e.to_string()),
        }
    }
}

impl StorageEngine for MemStoreEngine {
    fn open(&self, params: &Params) -> Result<Box<dyn StoreHandle>> {
        let mode = StorageMode::from_params(params)?;
        let capacity = match params.get("capacity") {
            None => usize::MAX,
            Some(v) => v.parse().map_err(|_| Error::InvalidParam {
                key: "capacity".into(),
                message: format!("cannot parse {v:?}"),
            })?,
        };
        Ok(Box::new(MemStoreHandle {
            data: self.data.clone(),
            mode,
            capacity,
        }))
    }
}

pub struct MemStoreHandle {
    data: Arc<Mutex<HashMap<DatasetId, StoredDataset>>>,
    mode: StorageMode,
    capacity: usize,
}

impl StoreHandle for MemStoreHandle {
    fn engine_name(&self) -> &str {
        "memstore"
    }

    fn write(&mut self, bd: &BigData) -> Result<WriteReceipt> {
        let start = Instant::now();
        let mut data = self.data.lock().expect("memstore poisoned");
        let existing: usize = data
            .iter()
            .filter(|(id, _)| **id != bd.id)
            .map(|(_, d)| d.records.len())
            .sum();
        if existing + bd.records.len() > self.capacity {
            return Err(Error::StorageFull);
        }
        let entry = data.entry(bd.id).or_insert_with(|| StoredDataset {
            records: Vec::new(),
            lineage: bd.lineage.clone(),
        });
        entry.records.clear();
        entry.lineage = bd.lineage.clone();
        match self.mode {
            StorageMode::PerTuple => {
                for record in &bd.records {
                    entry.records.push(record.clone());
                }
            }
            StorageMode::Batch => entry.records.extend_from_slice(&bd.records),
        }
        Ok(WriteReceipt {
            count: bd.records.len(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    fn read(&self, id: DatasetId) -> Result<BigData> {
        let data = self.data.lock().expect("memstore poisoned");
        let stored = data
            .get(&id)
            .ok_or_else(|| Error::UnknownDataset(id.to_string()))?;
        Ok(BigData {
            id,
            records: stored.records.clone(),
            lineage: stored.lineage.clone(),
            partitions: 1,
        })
    }

    fn record_count(&self, id: DatasetId) -> Option<usize> {
        self.data
            .lock()
            .expect("memstore poisoned")
            .get(&id)
            .map(|d| d.records.len())
    }

    fn dataset_ids(&self) -> Vec<DatasetId> {
        let mut ids: Vec<_> = self
            .data
            .lock()
            .expect("memstore poisoned")
            .keys()
            .copied()
            .collect();
        ids.sort();
        ids
    }

    fn remove(&mut self, id: DatasetId) -> Result<()> {
        self.data
            .lock()
            .expect("memstore poisoned")
            .remove(&id)
            .map(|_| ())
            .ok_or_else(|| Error::UnknownDataset(id.to_string()))
    }
}

/// Durable store: one append-only log file per dataset under
/// `<dir>/<dataset_id>.log`, plus a lineage sidecar so read-back datasets
/// keep their replayable history. The offset index is rebuilt on open.
pub struct LogStoreEngine {
    desc: EngineDescriptor,
}

impl LogStoreEngine {
    pub fn new() -> Self {
        LogStoreEngine {
            desc: EngineDescriptor::new("logstore", EngineKind::Storage, "1"),
        }
    }
}

impl Default for LogStoreEngine {
    fn default() -> Self {
        Self::new()
    }
}

fn logstore_dir(params: &Params) -> PathBuf {
    PathBuf::from(params.get("dir").map(String::as_str).unwrap_or("bigdb"))
}

impl Engine for LogStoreEngine {
    fn descriptor(&self) -> &EngineDescriptor {
        &self.desc
    }

    fn probe(&self, params: &Params) -> Availability {
        if let Err(e) = StorageMode::from_params(params) {
            return Availability::Unavailable(e.to_string());
        }
        let dir = logstore_dir(params);
        match fs::metadata(&dir) {
            Ok(meta) if !meta.is_dir() => {
                Availability::Unavailable(format!("{} is not a directory", dir.display()))
            }
            Ok(meta) if meta.permissions().readonly() => {
                Availability::Unavailable(format!("directory not writable: {}", dir.display()))
            }
            Ok(_) => Availability::Available,
            Err(_) => Availability::Unavailable(format!("directory missing: {}", dir.display())),
        }
    }
}

impl StorageEngine for LogStoreEngine {
    fn open(&self, params: &Params) -> Result<Box<dyn StoreHandle>> {
        let mode = StorageMode::from_params(params)?;
        let dir = logstore_dir(params);
        fs::create_dir_all(&dir)?;
        let index = rebuild_index(&dir)?;
        Ok(Box::new(LogStoreHandle { dir, mode, index }))
    }
}

/// Per-dataset index entry: frame byte offsets within the log file.
struct LogIndexEntry {
    offsets: Vec<u64>,
}

fn rebuild_index(dir: &Path) -> Result<HashMap<DatasetId, LogIndexEntry>> {
    let mut index = HashMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(stem) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(id_str) = stem.strip_suffix(".log") else {
            continue;
        };
        let Some(id) = id_str.strip_prefix("ds").and_then(|s| s.parse().ok()) else {
            continue;
        };
        let data = fs::read(&path)?;
        let mut offsets = Vec::new();
        let mut pos = 0usize;
        while pos + 4 <= data.len() {
            offsets.push(pos as u64);
            let len = u32::from_le_bytes(data[pos..pos + 4].try_into().unwrap()) as usize;
            pos += 4 + len;
        }
        index.insert(DatasetId(id), LogIndexEntry { offsets });
    }
    Ok(index)
}

pub struct LogStoreHandle {
    dir: PathBuf,
    mode: StorageMode,
    index: HashMap<DatasetId, LogIndexEntry>,
}

impl LogStoreHandle {
    fn log_path(&self, id: DatasetId) -> PathBuf {
        self.dir.join(format!("{id}.log"))
    }

    fn lineage_path(&self, id: DatasetId) -> PathBuf {
        self.dir.join(format!("{id}.lineage.json"))
    }
}

impl StoreHandle for LogStoreHandle {
    fn engine_name(&self) -> &str {
        "logstore"
    }

    fn write(&mut self, bd: &BigData) -> Result<WriteReceipt> {
        let start = Instant::now();
        let mut file = fs::File::create(self.log_path(bd.id))?;
        let mut offsets = Vec::with_capacity(bd.records.len());
        let mut pos = 0u64;
        match self.mode {
            StorageMode::PerTuple => {
                // one write + flush per record: an honest per-tuple commit
                for record in &bd.records {
                    let frame = encode_frame(record);
                    offsets.push(pos);
                    file.write_all(&frame)?;
                    file.flush()?;
                    pos += frame.len() as u64;
                }
            }
            StorageMode::Batch => {
                let mut buf = Vec::new();
                for record in &bd.records {
                    offsets.push(pos);
                    let frame = encode_frame(record);
                    pos += frame.len() as u64;
                    buf.extend_from_slice(&frame);
                }
                file.write_all(&buf)?;
                file.flush()?;
            }
        }
        fs::write(
            self.lineage_path(bd.id),
            serde_json::to_vec(&bd.lineage).expect("lineage serializes"),
        )?;
        self.index.insert(bd.id, LogIndexEntry { offsets });
        Ok(WriteReceipt {
            count: bd.records.len(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    fn read(&self, id: DatasetId) -> Result<BigData> {
        if !self.index.contains_key(&id) {
            return Err(Error::UnknownDataset(id.to_string()));
        }
        let data = fs::read(self.log_path(id))?;
        let records = decode_frames(&data)?;
        let lineage = match fs::read(self.lineage_path(id)) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| Error::InvalidRecord(format!("bad lineage sidecar: {e}")))?,
            Err(_) => vec![LineageEntry::origin_store("logstore", &id.to_string())],
        };
        Ok(BigData {
            id,
            records,
            lineage,
            partitions: 1,
        })
    }

    fn record_count(&self, id: DatasetId) -> Option<usize> {
        self.index.get(&id).map(|e| e.offsets.len())
    }

    fn dataset_ids(&self) -> Vec<DatasetId> {
        let mut ids: Vec<_> = self.index.keys().copied().collect();
        ids.sort();
        ids
    }

    fn remove(&mut self, id: DatasetId) -> Result<()> {
        if self.index.remove(&id).is_none() {
            return Err(Error::UnknownDataset(id.to_string()));
        }
        let _ = fs::remove_file(self.log_path(id));
        let _ = fs::remove_file(self.lineage_path(id));
        Ok(())
    }
}
