//! The dataset abstraction flowing between pipeline stages.
//!
//! A [`BigData`] is an ordered sequence of [`Record`]s plus the lineage that
//! produced it. Action operators create a new dataset; Transformation
//! operators update the current one in place. Replaying the lineage from its
//! origin entry reconstructs the records exactly, which is what makes the
//! model fault tolerant: any dataset can be rebuilt from its origin source
//! and the operator registry alone.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

static NEXT_DATASET_ID: AtomicU64 = AtomicU64::new(1);

/// Unique dataset identifier within one framework instance (one process).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DatasetId(pub u64);

impl DatasetId {
    pub fn fresh() -> Self {
        DatasetId(NEXT_DATASET_ID.fetch_add(1, Ordering::Relaxed))
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ds{}", self.0)
    }
}

/// The closed set of value shapes the reference workloads need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Text(String),
    Number(f64),
    Point { x: f64, y: f64 },
    Edge { src: String, dst: String },
    Pair(String, i64),
}

impl Value {
    pub fn variant_tag(&self) -> &'static str {
        match self {
            Value::Text(_) => "text",
            Value::Number(_) => "number",
            Value::Point { .. } => "point",
            Value::Edge { .. } => "edge",
            Value::Pair(..) => "pair",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub key: String,
    pub value: Value,
}

impl Record {
    /// Checked constructor enforcing the record invariants.
    pub fn new(key: impl Into<String>, value: Value) -> Result<Self> {
        let key = key.into();
        if key.is_empty() {
            return Err(Error::InvalidRecord("empty record key".into()));
        }
        match &value {
            Value::Point { x, y } if !x.is_finite() || !y.is_finite() => {
                return Err(Error::InvalidRecord(format!(
                    "non-finite point coordinates ({x}, {y})"
                )));
            }
            Value::Edge { src, dst } if src.is_empty() || dst.is_empty() => {
                return Err(Error::InvalidRecord("edge with empty endpoint".into()));
            }
            _ => {}
        }
        Ok(Record { key, value })
    }

    pub fn text(s: impl Into<String>) -> Self {
        let s = s.into();
        Record {
            key: s.clone(),
            value: Value::Text(s),
        }
    }
}

/// File formats understood by the file input engine and `from_file`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Lines,
    Edges,
    Points,
}

impl RecordFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lines" => Ok(RecordFormat::Lines),
            "edges" => Ok(RecordFormat::Edges),
            "points" => Ok(RecordFormat::Points),
            other => Err(Error::InvalidParam {
                key: "format".into(),
                message: format!("unknown format {other:?}"),
            }),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RecordFormat::Lines => "lines",
            RecordFormat::Edges => "edges",
            RecordFormat::Points => "points",
        }
    }
}

impl fmt::Display for RecordFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpKind {
    Origin,
    Action,
    Transformation,
}

/// One step in a dataset's history. Origin entries carry everything needed
/// to rebuild the source (file path + format, or generator kind/size/seed);
/// operator entries carry the operator name and its full parameter map so
/// replay needs no captured state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineageEntry {
    pub op_kind: OpKind,
    pub op_name: String,
    pub params: BTreeMap<String, String>,
    pub parent_ids: Vec<DatasetId>,
}

impl LineageEntry {
    pub fn origin_file(path: &str, format: RecordFormat) -> Self {
        let mut params = BTreeMap::new();
        params.insert("source".into(), "file".into());
        params.insert("path".into(), path.into());
        params.insert("format".into(), format.as_str().into());
        LineageEntry {
            op_kind: OpKind::Origin,
            op_name: "origin".into(),
            params,
            parent_ids: vec![],
        }
    }

    pub fn origin_generator(kind: &str, size: usize, seed: u64) -> Self {
        let mut params = BTreeMap::new();
        params.insert("source".into(), "generator".into());
        params.insert("kind".into(), kind.into());
        params.insert("size".into(), size.to_string());
        params.insert("seed".into(), seed.to_string());
        LineageEntry {
            op_kind: OpKind::Origin,
            op_name: "origin".into(),
            params,
            parent_ids: vec![],
        }
    }

    pub fn origin_store(engine: &str, dataset: &str) -> Self {
        let mut params = BTreeMap::new();
        params.insert("source".into(), "store".into());
        params.insert("engine".into(), engine.into());
        params.insert("dataset".into(), dataset.into());
        LineageEntry {
            op_kind: OpKind::Origin,
            op_name: "origin".into(),
            params,
            parent_ids: vec![],
        }
    }
}

/// Operator implementations take the input records and the stringly-typed
/// parameter map recorded in lineage, and produce the output records.
pub type OpFn = dyn Fn(&[Record], &BTreeMap<String, String>) -> Result<Vec<Record>> + Send + Sync;

/// Name → operator map. Frozen after startup and shared read-only.
#[derive(Clone, Default)]
pub struct OpRegistry {
    ops: BTreeMap<String, Arc<OpFn>>,
}

impl OpRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<F>(&mut self, name: &str, f: F)
    where
        F: Fn(&[Record], &BTreeMap<String, String>) -> Result<Vec<Record>> + Send + Sync + 'static,
    {
        self.ops.insert(name.to_string(), Arc::new(f));
    }

    pub fn get(&self, name: &str) -> Option<&Arc<OpFn>> {
        self.ops.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.ops.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ops.keys().map(String::as_str)
    }
}

impl fmt::Debug for OpRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpRegistry")
            .field("ops", &self.ops.keys().collect::<Vec<_>>())
            .finish()
    }
}

/// Lineage-tracked dataset handle; the unit flowing between pipes.
#[derive(Debug, Clone, PartialEq)]
pub struct BigData {
    pub id: DatasetId,
    pub records: Vec<Record>,
    pub lineage: Vec<LineageEntry>,
    /// Logical partition count; records are assigned round-robin.
    pub partitions: usize,
}

impl BigData {
    pub fn from_records(records: Vec<Record>, origin: LineageEntry) -> Self {
        debug_assert_eq!(origin.op_kind, OpKind::Origin);
        BigData {
            id: DatasetId::fresh(),
            records,
            lineage: vec![origin],
            partitions: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Round-robin partition index of the record at `index`.
    pub fn partition_of(&self, index: usize) -> usize {
        index % self.partitions.max(1)
    }

    /// Updates the records in place, keeping the same dataset identity, and
    /// appends a Transformation entry to the lineage.
    pub fn apply_transformation(
        &mut self,
        op_name: &str,
        f: &OpFn,
        params: BTreeMap<String, String>,
    ) -> Result<()> {
        let out = f(&self.records, &params).map_err(|e| wrap_op_err(op_name, e))?;
        self.records = out;
        self.lineage.push(LineageEntry {
            op_kind: OpKind::Transformation,
            op_name: op_name.to_string(),
            params,
            parent_ids: vec![],
        });
        Ok(())
    }

    /// Produces a new dataset with a fresh identity; the parent is untouched.
    /// The child's lineage is the parent's history plus the Action entry.
    pub fn apply_action(
        &self,
        op_name: &str,
        f: &OpFn,
        params: BTreeMap<String, String>,
    ) -> Result<BigData> {
        let out = f(&self.records, &params).map_err(|e| wrap_op_err(op_name, e))?;
        let mut lineage = self.lineage.clone();
        lineage.push(LineageEntry {
            op_kind: OpKind::Action,
            op_name: op_name.to_string(),
            params,
            parent_ids: vec![self.id],
        });
        Ok(BigData {
            id: DatasetId::fresh(),
            records: out,
            lineage,
            partitions: self.partitions,
        })
    }
}

fn wrap_op_err(op_name: &str, e: Error) -> Error {
    match e {
        e @ Error::OperatorError { .. } => e,
        other => Error::OperatorError {
            op_name: op_name.to_string(),
            message: other.to_string(),
        },
    }
}

/// Parses a file into a dataset, one record per line.
pub fn from_file(path: impl AsRef<Path>, format: RecordFormat) -> Result<BigData> {
    let path = path.as_ref();
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.display().to_string()));
        }
        Err(e) => return Err(e.into()),
    };
    let records = parse_records(&text, format)?;
    Ok(BigData::from_records(
        records,
        LineageEntry::origin_file(&path.display().to_string(), format),
    ))
}

/// Parses record text in one of the three line-oriented formats.
pub fn parse_records(text: &str, format: RecordFormat) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let record = match format {
            RecordFormat::Lines => Record::text(line),
            RecordFormat::Edges => parse_edge_line(line, lineno)?,
            RecordFormat::Points => parse_point_line(line, lineno)?,
        };
        records.push(record);
    }
    Ok(records)
}

fn parse_edge_line(line: &str, lineno: usize) -> Result<Record> {
    let (src, dst) = line.split_once(" -> ").ok_or_else(|| Error::ParseError {
        line: lineno,
        message: format!("edge line not matching \"A -> B\": {line:?}"),
    })?;
    if src.is_empty() || dst.is_empty() || src.contains(' ') || dst.contains(' ') {
        return Err(Error::ParseError {
            line: lineno,
            message: format!("edge line not matching \"A -> B\": {line:?}"),
        });
    }
    Record::new(
        format!("{src}->{dst}"),
        Value::Edge {
            src: src.to_string(),
            dst: dst.to_string(),
        },
    )
    .map_err(|e| Error::ParseError {
        line: lineno,
        message: e.to_string(),
    })
}

fn parse_point_line(line: &str, lineno: usize) -> Result<Record> {
    let bad = || Error::ParseError {
        line: lineno,
        message: format!("point line not two finite numbers: {line:?}"),
    };
    let (xs, ys) = line.split_once(',').ok_or_else(bad)?;
    let x: f64 = xs.trim().parse().map_err(|_| bad())?;
    let y: f64 = ys.trim().parse().map_err(|_| bad())?;
    if !x.is_finite() || !y.is_finite() {
        return Err(bad());
    }
    Record::new(line.to_string(), Value::Point { x, y }).map_err(|e| Error::ParseError {
        line: lineno,
        message: e.to_string(),
    })
}

/// Writes records back out in the given line format. Inverse of `from_file`
/// for datasets whose records match the format.
pub fn write_to_file(bd: &BigData, path: impl AsRef<Path>, format: RecordFormat) -> Result<()> {
    let mut out = fs::File::create(path.as_ref())?;
    for record in &bd.records {
        let line = render_record_line(record, format)?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn render_record_line(record: &Record, format: RecordFormat) -> Result<String> {
    match (format, &record.value) {
        (RecordFormat::Lines, Value::Text(s)) => Ok(s.clone()),
        (RecordFormat::Edges, Value::Edge { src, dst }) => Ok(format!("{src} -> {dst}")),
        (RecordFormat::Points, Value::Point { x, y }) => Ok(format!("{x},{y}")),
        (f, v) => Err(Error::InvalidRecord(format!(
            "cannot render {} record in {f} format",
            v.variant_tag()
        ))),
    }
}

/// Rebuilds a dataset by re-executing its recorded history from the origin.
pub fn replay(lineage: &[LineageEntry], ops: &OpRegistry) -> Result<BigData> {
    let origin = lineage.first().ok_or_else(|| {
        Error::SourceUnavailable("empty lineage has no origin entry".to_string())
    })?;
    if origin.op_kind != OpKind::Origin {
        return Err(Error::SourceUnavailable(
            "lineage does not start with an origin entry".to_string(),
        ));
    }
    let mut bd = rebuild_origin(origin)?;
    for entry in &lineage[1..] {
        let f = ops
            .get(&entry.op_name)
            .ok_or_else(|| Error::UnknownOperator(entry.op_name.clone()))?
            .clone();
        match entry.op_kind {
            OpKind::Transformation => {
                bd.apply_transformation(&entry.op_name, f.as_ref(), entry.params.clone())?
            }
            OpKind::Action => bd = bd.apply_action(&entry.op_name, f.as_ref(), entry.params.clone())?,
            OpKind::Origin => {
                return Err(Error::SourceUnavailable(
                    "origin entry in the middle of a lineage".to_string(),
                ));
            }
        }
    }
    Ok(bd)
}

fn rebuild_origin(origin: &LineageEntry) -> Result<BigData> {
    let source = origin.params.get("source").map(String::as_str);
    match source {
        Some("file") => {
            let path = origin
                .params
                .get("path")
                .ok_or_else(|| Error::SourceUnavailable("file origin without path".into()))?;
            let format = RecordFormat::parse(
                origin.params.get("format").map(String::as_str).unwrap_or(""),
            )
            .map_err(|_| Error::SourceUnavailable(format!("file origin with bad format: {path}")))?;
            match from_file(path, format) {
                Ok(mut bd) => {
                    bd.lineage = vec![origin.clone()];
                    Ok(bd)
                }
                Err(Error::FileNotFound(p)) => Err(Error::SourceUnavailable(p)),
                Err(e) => Err(e),
            }
        }
        Some("generator") => {
            let kind = origin
                .params
                .get("kind")
                .ok_or_else(|| Error::SourceUnavailable("generator origin without kind".into()))?;
            let size: usize = origin
                .params
                .get("size")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::SourceUnavailable("generator origin without size".into()))?;
            let seed: u64 = origin
                .params
                .get("seed")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::SourceUnavailable("generator origin without seed".into()))?;
            let records = crate::engines::input::generate_records(kind, size, seed)?;
            let mut bd = BigData::from_records(records, origin.clone());
            bd.lineage = vec![origin.clone()];
            Ok(bd)
        }
        Some(other) => Err(Error::SourceUnavailable(format!(
            "origin source {other:?} is not reconstructible"
        ))),
        None => Err(Error::SourceUnavailable(
            "origin entry without source description".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uppercase(records: &[Record], _: &BTreeMap<String, String>) -> Result<Vec<Record>> {
        records
            .iter()
            .map(|r| match &r.value {
                Value::Text(s) => Ok(Record::text(s.to_uppercase())),
                _ => Err(Error::InvalidRecord("expected text".into())),
            })
            .collect()
    }

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn from_file_lines_matches_corpus() {
        let f = write_temp("Spark\nYARN\nSpark\nSpark\nSpark\n");
        let bd = from_file(f.path(), RecordFormat::Lines).unwrap();
        assert_eq!(bd.len(), 5);
        assert_eq!(bd.lineage.len(), 1);
        assert_eq!(bd.records[0].value, Value::Text("Spark".into()));
        assert_eq!(bd.records[1].value, Value::Text("YARN".into()));
    }

    #[test]
    fn from_file_empty() {
        let f = write_temp("");
        let bd = from_file(f.path(), RecordFormat::Lines).unwrap();
        assert_eq!(bd.len(), 0);
        assert_eq!(bd.lineage.len(), 1);
    }

    #[test]
    fn from_file_edges() {
        let f = write_temp("A -> B\nB -> A\n");
        let bd = from_file(f.path(), RecordFormat::Edges).unwrap();
        assert_eq!(bd.len(), 2);
        assert_eq!(
            bd.records[0].value,
            Value::Edge {
                src: "A".into(),
                dst: "B".into()
            }
        );
        assert_eq!(
            bd.records[1].value,
            Value::Edge {
                src: "B".into(),
                dst: "A".into()
            }
        );
    }

    #[test]
    fn from_file_missing() {
        let err = from_file("/no/such/file", RecordFormat::Lines).unwrap_err();
        assert!(matches!(err, Error::FileNotFound(_)));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_records("A -> B\nnot an edge\n", RecordFormat::Edges).unwrap_err();
        match err {
            Error::ParseError { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected: {other}"),
        }
        let err = parse_records("0,0\n1,notanumber\n", RecordFormat::Points).unwrap_err();
        match err {
            Error::ParseError { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn transformation_keeps_identity_and_grows_lineage() {
        let f = write_temp("a\nb\n");
        let mut bd = from_file(f.path(), RecordFormat::Lines).unwrap();
        let id = bd.id;
        bd.apply_transformation("uppercase", &uppercase, BTreeMap::new())
            .unwrap();
        assert_eq!(bd.id, id);
        assert_eq!(bd.records[0].value, Value::Text("A".into()));
        assert_eq!(bd.records[1].value, Value::Text("B".into()));
        assert_eq!(bd.lineage.len(), 2);
    }

    #[test]
    fn identity_transform_grows_lineage_only() {
        let f = write_temp("x\ny\n");
        let mut bd = from_file(f.path(), RecordFormat::Lines).unwrap();
        let before = bd.records.clone();
        bd.apply_transformation("identity", &|r, _| Ok(r.to_vec()), BTreeMap::new())
            .unwrap();
        assert_eq!(bd.records, before);
        assert_eq!(bd.lineage.len(), 2);
    }

    #[test]
    fn filter_nonempty() {
        let records = vec![Record::text("x"), Record::text(""), Record::text("y")];
        let mut bd = BigData::from_records(records, LineageEntry::origin_generator("words", 3, 0));
        bd.apply_transformation(
            "filter-nonempty",
            &|r, _| {
                Ok(r.iter()
                    .filter(|rec| !matches!(&rec.value, Value::Text(s) if s.is_empty()))
                    .cloned()
                    .collect())
            },
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(bd.len(), 2);
        assert_eq!(bd.records[0].value, Value::Text("x".into()));
        assert_eq!(bd.records[1].value, Value::Text("y".into()));
    }

    #[test]
    fn action_preserves_parent() {
        let f = write_temp("Spark\nYARN\nSpark\nSpark\nSpark\n");
        let parent = from_file(f.path(), RecordFormat::Lines).unwrap();
        let parent_records = parent.records.clone();
        let parent_lineage = parent.lineage.clone();
        let child = parent
            .apply_action("uppercase", &uppercase, BTreeMap::new())
            .unwrap();
        assert_ne!(child.id, parent.id);
        assert_eq!(parent.records, parent_records);
        assert_eq!(parent.lineage, parent_lineage);
        assert_eq!(child.lineage.len(), 2);
        assert_eq!(child.lineage[1].parent_ids, vec![parent.id]);
    }

    #[test]
    fn action_on_empty() {
        let bd = BigData::from_records(vec![], LineageEntry::origin_generator("words", 0, 1));
        let child = bd
            .apply_action("identity", &|r, _| Ok(r.to_vec()), BTreeMap::new())
            .unwrap();
        assert!(child.is_empty());
        assert_eq!(child.lineage.len(), 2);
    }

    #[test]
    fn chained_actions_have_distinct_ids() {
        let f = write_temp("a\n");
        let a = from_file(f.path(), RecordFormat::Lines).unwrap();
        let b = a
            .apply_action("identity", &|r, _| Ok(r.to_vec()), BTreeMap::new())
            .unwrap();
        let c = b
            .apply_action("identity", &|r, _| Ok(r.to_vec()), BTreeMap::new())
            .unwrap();
        assert!(a.id != b.id && b.id != c.id && a.id != c.id);
        assert_eq!(b.lineage[1].parent_ids, vec![a.id]);
        assert_eq!(c.lineage[2].parent_ids, vec![b.id]);
    }

    #[test]
    fn replay_file_and_transform() {
        let f = write_temp("a\nb\n");
        let mut bd = from_file(f.path(), RecordFormat::Lines).unwrap();
        bd.apply_transformation("uppercase", &uppercase, BTreeMap::new())
            .unwrap();
        let mut ops = OpRegistry::new();
        ops.register("uppercase", uppercase);
        let replayed = replay(&bd.lineage, &ops).unwrap();
        assert_eq!(replayed.records, bd.records);
    }

    #[test]
    fn replay_missing_file() {
        let lineage = vec![LineageEntry::origin_file(
            "/definitely/not/here.txt",
            RecordFormat::Lines,
        )];
        let err = replay(&lineage, &OpRegistry::new()).unwrap_err();
        assert!(matches!(err, Error::SourceUnavailable(_)));
    }

    #[test]
    fn replay_unknown_operator() {
        let f = write_temp("a\n");
        let mut bd = from_file(f.path(), RecordFormat::Lines).unwrap();
        bd.apply_transformation("uppercase", &uppercase, BTreeMap::new())
            .unwrap();
        let err = replay(&bd.lineage, &OpRegistry::new()).unwrap_err();
        assert!(matches!(err, Error::UnknownOperator(ref n) if n == "uppercase"));
    }

    #[test]
    fn file_round_trip_all_formats() {
        let cases = [
            ("one\ntwo\nthree\n", RecordFormat::Lines),
            ("A -> B\nB -> C\n", RecordFormat::Edges),
            ("0,0\n1.5,-2.25\n", RecordFormat::Points),
        ];
        for (text, format) in cases {
            let f = write_temp(text);
            let bd = from_file(f.path(), format).unwrap();
            let out = tempfile::NamedTempFile::new().unwrap();
            write_to_file(&bd, out.path(), format).unwrap();
            let back = from_file(out.path(), format).unwrap();
            assert_eq!(back.records, bd.records, "{format} round trip");
        }
    }

    #[test]
    fn record_invariants_enforced() {
        assert!(Record::new("", Value::Number(1.0)).is_err());
        assert!(Record::new("p", Value::Point { x: f64::NAN, y: 0.0 }).is_err());
        assert!(Record::new(
            "e",
            Value::Edge {
                src: String::new(),
                dst: "b".into()
            }
        )
        .is_err());
    }
}
