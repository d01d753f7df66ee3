//! The four reference workloads: word count, string sort, k-means
//! clustering and PageRank. Each is a pure function over records plus a
//! registration hook so the operators are replayable from lineage.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::expect_all;
use crate::error::{Error, Result};
use crate::model::{OpRegistry, Record, Value};

/// Counts occurrences of each distinct word; output is one `Pair(word,
/// count)` per word, sorted by word ascending.
pub fn word_count(records: &[Record]) -> Result<Vec<Record>> {
    let words = expect_all("wordcount", "text", records, |r| match &r.value {
        Value::Text(s) => Some(s.as_str()),
        _ => None,
    })?;
    let mut counts: BTreeMap<&str, i64> = BTreeMap::new();
    for w in words {
        *counts.entry(w).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(word, count)| Record::new(word, Value::Pair(word.to_string(), count)))
        .collect()
}

/// Stable byte-wise sort of text records.
pub fn sort_strings(records: &[Record]) -> Result<Vec<Record>> {
    // type check up front; the sort itself moves whole records
    expect_all("sort", "text", records, |r| match &r.value {
        Value::Text(s) => Some(s.as_str()),
        _ => None,
    })?;
    let mut out = records.to_vec();
    out.sort_by(|a, b| {
        let (Value::Text(x), Value::Text(y)) = (&a.value, &b.value) else {
            unreachable!("checked above");
        };
        x.as_bytes().cmp(y.as_bytes())
    });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansParams {
    pub k: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl KMeansParams {
    pub fn new(k: usize, iterations: usize, seed: u64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParam {
                key: "k".into(),
                message: "k must be at least 1".into(),
            });
        }
        if iterations < 1 {
            return Err(Error::InvalidParam {
                key: "iterations".into(),
                message: "iterations must be at least 1".into(),
            });
        }
        Ok(KMeansParams { k, iterations, seed })
    }

    pub fn from_map(params: &BTreeMap<String, String>) -> Result<Self> {
        let mut k = 3usize;
        let mut iterations = 20usize;
        let mut seed = 0u64;
        for (key, value) in params {
            match key.as_str() {
                "k" => k = parse_num(key, value)?,
                "iterations" => iterations = parse_num(key, value)?,
                "seed" => seed = parse_num(key, value)?,
                other => return Err(Error::UnknownParamKey(other.to_string())),
            }
        }
        KMeansParams::new(k, iterations, seed)
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    /// Cluster index per input point, parallel to the input order.
    pub assignments: Vec<usize>,
    pub centroids: Vec<(f64, f64)>,
    /// Within-cluster sum of squares after each completed iteration.
    pub wcss_per_iteration: Vec<f64>,
}

impl KMeansResult {
    /// Assignment dataset records: one `Pair(point-index, cluster-id)` each.
    pub fn assignment_records(&self) -> Vec<Record> {
        self.assignments
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                Record::new(i.to_string(), Value::Pair(i.to_string(), c as i64))
                    .expect("index keys are non-empty")
            })
            .collect()
    }

    pub fn wcss(&self) -> f64 {
        *self.wcss_per_iteration.last().unwrap_or(&0.0)
    }
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Lloyd's algorithm with seeded initialization: centroids start as a
/// uniform sample of k distinct input points; ties go to the lowest cluster
/// index; an empty cluster retains its previous centroid. Runs exactly
/// `iterations` rounds unless the assignments stop changing earlier.
pub fn kmeans(records: &[Record], params: KMeansParams) -> Result<KMeansResult> {
    let points = expect_all("kmeans", "point", records, |r| match r.value {
        Value::Point { x, y } => Some((x, y)),
        _ => None,
    })?;
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyInput("kmeans".into()));
    }
    if params.k > n {
        return Err(Error::KTooLarge { k: params.k, n });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut init = rand::seq::index::sample(&mut rng, n, params.k).into_vec();
    init.sort_unstable();
    let mut centroids: Vec<(f64, f64)> = init.iter().map(|&i| points[i]).collect();

    let mut assignments = vec![0usize; n];
    let mut wcss_per_iteration = Vec::with_capacity(params.iterations);

    for iter in 0..params.iterations {
        let mut changed = false;
        for (i, &p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = dist2(p, centroids[0]);
            for (c, &centroid) in centroids.iter().enumerate().skip(1) {
                let d = dist2(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignments[i] != best {
                assignments[i] = best;
                changed = true;
            }
        }

        let mut sums = vec![(0.0f64, 0.0f64, 0usize); params.k];
        for (i, &p) in points.iter().enumerate() {
            let s = &mut sums[assignments[i]];
            s.0 += p.0;
            s.1 += p.1;
            s.2 += 1;
        }
        for (c, &(sx, sy, count)) in sums.iter().enumerate() {
            if count > 0 {
                centroids[c] = (sx / count as f64, sy / count as f64);
            }
        }

        let wcss: f64 = points
            .iter()
            .enumerate()
            .map(|(i, &p)| dist2(p, centroids[assignments[i]]))
            .sum();
        wcss_per_iteration.push(wcss);

        if !changed && iter > 0 {
            break;
        }
    }

    Ok(KMeansResult {
        assignments,
        centroids,
        wcss_per_iteration,
    })
}

/// Clustered-point records for charting: key = cluster id, value = point.
pub fn clustered_points(records: &[Record], result: &KMeansResult) -> Result<Vec<Record>> {
    let points = expect_all("kmeans", "point", records, |r| match r.value {
        Value::Point { x, y } => Some((x, y)),
        _ => None,
    })?;
    points
        .iter()
        .zip(&result.assignments)
        .map(|(&(x, y), &c)| Record::new(c.to_string(), Value::Point { x, y }))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    pub damping: f64,
    pub iterations: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            iterations: 20,
        }
    }
}

impl PageRankParams {
    pub fn new(damping: f64, iterations: usize) -> Result<Self> {
        if !(damping > 0.0 && damping < 1.0) {
            return Err(Error::InvalidParam {
                key: "damping".into(),
                message: format!("damping must be in (0,1), got {damping}"),
            });
        }
        if iterations < 1 {
            return Err(Error::InvalidParam {
                key: "iterations".into(),
                message: "iterations must be at least 1".into(),
            });
        }
        Ok(PageRankParams { damping, iterations })
    }

    pub fn from_map(params: &BTreeMap<String, String>) -> Result<Self> {
        let mut damping = 0.85f64;
        let mut iterations = 20usize;
        for (key, value) in params {
            match key.as_str() {
                "damping" => damping = parse_num(key, value)?,
                "iterations" => iterations = parse_num(key, value)?,
                other => return Err(Error::UnknownParamKey(other.to_string())),
            }
        }
        PageRankParams::new(damping, iterations)
    }
}

#[derive(Debug, Clone)]
pub struct PageRankResult {
    /// Page names, sorted ascending; `raw_scores` is parallel to this.
    pub pages: Vec<String>,
    pub raw_scores: Vec<f64>,
    /// Sum of raw scores after each iteration (mass conservation check).
    pub iteration_sums: Vec<f64>,
}

impl PageRankResult {
    /// Display records: the raw probability ×1000, rounded to 3 decimals.
    pub fn score_records(&self) -> Vec<Record> {
        self.pages
            .iter()
            .zip(&self.raw_scores)
            .map(|(page, &raw)| {
                let scaled = (raw * 1000.0 * 1000.0).round() / 1000.0;
                Record::new(page.clone(), Value::Number(scaled))
                    .expect("page names are non-empty")
            })
            .collect()
    }
}

/// Power iteration with uniform redistribution of dangling mass:
/// r'(v) = (1-d)/N + d * (Σ r(u)/outdeg(u) + dangling/N).
/// Isolated pages may be declared with text records naming them.
pub fn pagerank(records: &[Record], params: PageRankParams) -> Result<PageRankResult> {
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut pages: Vec<String> = Vec::new();
    for r in records {
        match &r.value {
            Value::Edge { src, dst } => {
                edges.push((src.clone(), dst.clone()));
                pages.push(src.clone());
                pages.push(dst.clone());
            }
            Value::Text(name) => pages.push(name.clone()),
            other => {
                return Err(Error::TypeMismatch {
                    task: "pagerank".into(),
                    expected: "edge".into(),
                    found: other.variant_tag().to_string(),
                });
            }
        }
    }
    pages.sort();
    pages.dedup();
    if pages.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = pages.len();
    let index: BTreeMap<&str, usize> = pages
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_str(), i))
        .collect();

    let mut out_degree = vec![0usize; n];
    let mut in_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (src, dst) in &edges {
        let s = index[src.as_str()];
        let d = index[dst.as_str()];
        out_degree[s] += 1;
        in_edges[d].push(s);
    }

    let damping = params.damping;
    let mut scores = vec![1.0 / n as f64; n];
    let mut iteration_sums = Vec::with_capacity(params.iterations);
    for _ in 0..params.iterations {
        let dangling: f64 = (0..n)
            .filter(|&i| out_degree[i] == 0)
            .map(|i| scores[i])
            .sum();
        let base = (1.0 - damping) / n as f64 + damping * dangling / n as f64;
        let mut next = vec![base; n];
        for v in 0..n {
            for &u in &in_edges[v] {
                next[v] += damping * scores[u] / out_degree[u] as f64;
            }
        }
        scores = next;
        iteration_sums.push(scores.iter().sum());
    }

    Ok(PageRankResult {
        pages,
        raw_scores: scores,
        iteration_sums,
    })
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::InvalidParam {
        key: key.to_string(),
        message: format!("cannot parse {value:?}"),
    })
}

fn reject_params(task: &str, params: &BTreeMap<String, String>) -> Result<()> {
    if let Some(key) = params.keys().next() {
        return Err(Error::OperatorError {
            op_name: task.to_string(),
            message: Error::UnknownParamKey(key.clone()).to_string(),
        });
    }
    Ok(())
}

/// Registers the four workloads in an operator registry so that lineage
/// entries naming them can be replayed.
pub fn register_tasks(ops: &mut OpRegistry) {
    ops.register("wordcount", |records, params| {
        reject_params("wordcount", params)?;
        word_count(records)
    });
    ops.register("sort", |records, params| {
        reject_params("sort", params)?;
        sort_strings(records)
    });
    ops.register("kmeans", |records, params| {
        let p = KMeansParams::from_map(params)?;
        Ok(kmeans(records, p)?.assignment_records())
    });
    ops.register("pagerank", |records, params| {
        let p = PageRankParams::from_map(params)?;
        Ok(pagerank(records, p)?.score_records())
    });
}

pub const TASK_NAMES: [&str; 4] = ["wordcount", "sort", "kmeans", "pagerank"];
