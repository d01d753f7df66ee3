//! Benchmark harness: runs the four workloads over ascending data sizes,
//! averages per-stage times and memory over repetitions, and renders the
//! results as JSON and as a text table (storage and computation in seconds,
//! the other stages in milliseconds).

use serde::{Deserialize, Serialize};

use crate::config::ConfChain;
use crate::engine::Params;
use crate::error::{Error, Result};
use crate::pipeline::{self, RunReport, StageReport};
use crate::tasks::TASK_NAMES;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchPlan {
    pub jobs: Vec<String>,
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
}

impl BenchPlan {
    pub fn validate(&self) -> Result<()> {
        for job in &self.jobs {
            if !TASK_NAMES.contains(&job.as_str()) {
                return Err(Error::UnknownKind(job.clone()));
            }
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParam {
                key: "sizes".into(),
                message: "sizes must be strictly ascending".into(),
            });
        }
        if self.sizes.is_empty() {
            return Err(Error::InvalidParam {
                key: "sizes".into(),
                message: "at least one size required".into(),
            });
        }
        if self.repetitions < 1 {
            return Err(Error::InvalidParam {
                key: "repetitions".into(),
                message: "repetitions must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// Desk-scale default: all four jobs at 1K/10K/100K, three repetitions.
    pub fn default_plan() -> Self {
        BenchPlan {
            jobs: TASK_NAMES.iter().map(|s| s.to_string()).collect(),
            sizes: vec![1_000, 10_000, 100_000],
            repetitions: 3,
            seed: 42,
        }
    }
}

/// One (job, size) cell: stage times and memory averaged over exactly
/// `repetitions` runs, with the raw per-run reports retained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub job: String,
    pub size: usize,
    pub stages: Vec<StageReport>,
    pub framework_ms: f64,
    pub mem_mb_at_stage: Vec<f64>,
    pub repetitions: usize,
    pub runs: Vec<RunReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub plan: BenchPlan,
    pub cells: Vec<BenchCell>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bench report serializes")
    }

    pub fn cell(&self, job: &str, size: usize) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.job == job && c.size == size)
    }
}

/// Generator record kind feeding each workload.
pub fn input_kind_for(job: &str) -> &'static str {
    match job {
        "wordcount" => "words",
        "sort" => "strings",
        "kmeans" => "points",
        "pagerank" => "edges",
        _ => "words",
    }
}

/// Default task params for bench runs: k-means k=100 over 20 iterations,
/// PageRank at damping 0.85 over 20 iterations.
pub fn bench_task_params(job: &str, seed: u64) -> Params {
    let mut params = Params::new();
    match job {
        "kmeans" => {
            params.insert("k".into(), "100".into());
            params.insert("iterations".into(), "20".into());
            params.insert("seed".into(), seed.to_string());
        }
        "pagerank" => {
            params.insert("damping".into(), "0.85".into());
            params.insert("iterations".into(), "20".into());
        }
        _ => {}
    }
    params
}

fn generator_params(job: &str, size: usize, seed: u64) -> Params {
    let mut params = Params::new();
    params.insert("kind".into(), input_kind_for(job).into());
    params.insert("size".into(), size.to_string());
    params.insert("seed".into(), seed.to_string());
    params
}

/// Runs every (job, size) cell strictly sequentially. A failing cell is
/// recorded and the bench continues with the remaining cells.
pub fn run_bench(plan: &BenchPlan, chain: &ConfChain) -> Result<BenchReport> {
    plan.validate()?;
    let mut cells = Vec::new();
    for job in &plan.jobs {
        for &size in &plan.sizes {
            cells.push(run_cell(job, size, plan, chain));
        }
    }
    Ok(BenchReport {
        plan: plan.clone(),
        cells,
    })
}

fn run_cell(job: &str, size: usize, plan: &BenchPlan, chain: &ConfChain) -> BenchCell {
    let mut runs: Vec<RunReport> = Vec::with_capacity(plan.repetitions);
    for _ in 0..plan.repetitions {
        let pipeline = match pipeline::standard_pipeline(
            job,
            generator_params(job, size, plan.seed),
            job,
            bench_task_params(job, plan.seed),
            Params::new(),
        ) {
            Ok(p) => p,
            Err(e) => return failed_cell(job, size, plan.repetitions, e),
        };
        match pipeline::execute(&pipeline, chain) {
            Ok(run) => runs.push(run.report),
            Err(e) => return failed_cell(job, size, plan.repetitions, e),
        }
    }
    average_cell(job, size, runs)
}

fn failed_cell(job: &str, size: usize, repetitions: usize, error: Error) -> BenchCell {
    BenchCell {
        job: job.to_string(),
        size,
        stages: Vec::new(),
        framework_ms: 0.0,
        mem_mb_at_stage: Vec::new(),
        repetitions,
        runs: Vec::new(),
        error: Some(error.to_string()),
    }
}

fn average_cell(job: &str, size: usize, runs: Vec<RunReport>) -> BenchCell {
    let n = runs.len() as f64;
    let stage_count = runs[0].stages.len();
    let mut stages = Vec::with_capacity(stage_count);
    for i in 0..stage_count {
        stages.push(StageReport {
            kind: runs[0].stages[i].kind.clone(),
            ms: runs.iter().map(|r| r.stages[i].ms).sum::<f64>() / n,
            mem_mb: runs.iter().map(|r| r.stages[i].mem_mb).sum::<f64>() / n,
        });
    }
    let framework_ms = runs.iter().map(|r| r.framework_ms).sum::<f64>() / n;
    let mem_mb_at_stage = stages.iter().map(|s| s.mem_mb).collect();
    BenchCell {
        job: job.to_string(),
        size,
        stages,
        framework_ms,
        mem_mb_at_stage,
        repetitions: runs.len(),
        runs,
        error: None,
    }
}

fn human_size(size: usize) -> String {
    if size % 1_000_000 == 0 && size > 0 {
        format!("{}M", size / 1_000_000)
    } else if size % 1_000 == 0 && size > 0 {
        format!("{}K", size / 1_000)
    } else {
        size.to_string()
    }
}

fn render_stage_time(kind: &str, ms: f64) -> String {
    // storage and computation in seconds, the rest in milliseconds
    if kind == "storage" || kind == "computation" {
        format!("{:.3} (s)", ms / 1e3)
    } else {
        format!("{:.0}", ms)
    }
}

/// Text table per job: one row per stage plus the framework row, one
/// column per data size.
pub fn render_bench_table(report: &BenchReport) -> String {
    const ROWS: [(&str, &str); 6] = [
        ("control", "Control"),
        ("input", "Input"),
        ("storage", "Storage"),
        ("computation", "Computation"),
        ("output", "Output"),
        ("framework", "Framework"),
    ];
    let mut out = String::new();
    for job in &report.plan.jobs {
        out.push_str(&format!("{job}\n"));
        let mut grid: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["Data Size".to_string()];
        header.extend(report.plan.sizes.iter().map(|&s| human_size(s)));
        grid.push(header);
        for (stage_kind, label) in ROWS {
            let mut row = vec![label.to_string()];
            for &size in &report.plan.sizes {
                let cell = report.cell(job, size);
                let text = match cell {
                    Some(c) if c.error.is_none() => {
                        if stage_kind == "framework" {
                            format!("{:.0}", c.framework_ms)
                        } else {
                            c.stages
                                .iter()
                                .find(|s| s.kind == stage_kind)
                                .map(|s| render_stage_time(stage_kind, s.ms))
                                .unwrap_or_else(|| "-".to_string())
                        }
                    }
                    Some(c) => c.error.clone().unwrap_or_else(|| "error".into()),
                    None => "-".to_string(),
                };
                row.push(text);
            }
            grid.push(row);
        }
        let widths: Vec<usize> = (0..grid[0].len())
            .map(|c| grid.iter().map(|row| row[c].len()).max().unwrap_or(0))
            .collect();
        for row in grid {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_validation() {
        let mut plan = BenchPlan::default_plan();
        plan.validate().unwrap();
        plan.sizes = vec![1000, 1000];
        assert!(plan.validate().is_err());
        plan.sizes = vec![1000, 10000];
        plan.repetitions = 0;
        assert!(plan.validate().is_err());
        plan.repetitions = 1;
        plan.jobs = vec!["tsp".into()];
        assert!(plan.validate().is_err());
    }

    #[test]
    fn table_rendering_shape() {
        let plan = BenchPlan {
            jobs: vec!["wordcount".into()],
            sizes: vec![1000],
            repetitions: 1,
            seed: 1,
        };
        let cell = average_cell(
            "wordcount",
            1000,
            vec![RunReport {
                job: "wordcount".into(),
                size: 1000,
                stages: ["control", "input", "storage", "computation", "output"]
                    .iter()
                    .map(|k| StageReport {
                        kind: k.to_string(),
                        ms: 12.0,
                        mem_mb: 5.0,
                    })
                    .collect(),
                framework_ms: 3.0,
                timestamp_secs: 0,
            }],
        );
        let report = BenchReport {
            plan,
            cells: vec![cell],
        };
        let table = render_bench_table(&report);
        assert!(table.contains("wordcount"));
        assert!(table.contains("Data Size"));
        assert!(table.contains("1K"));
        assert!(table.contains("Storage"));
        assert!(table.contains("0.012 (s)"));
        assert!(table.contains("Framework"));
    }
}
