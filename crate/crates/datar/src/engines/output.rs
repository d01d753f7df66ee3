//! Output engines: text table, JSON document and standalone SVG charts.
//! All three are pure functions of the dataset: identical input yields
//! byte-identical output.

use std::fmt::Write as _;

use crate::engine::{Availability, Engine, EngineDescriptor, EngineKind, OutputEngine, Params};
use crate::error::{Error, Result};
use crate::model::{BigData, Record, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Bar,
    Scatter,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    /// (label, numeric value) per bar.
    Bars(Vec<(String, f64)>),
    /// (x, y, cluster-id) per point.
    Points(Vec<(f64, f64, String)>),
}

/// What the SVG engine draws. Non-empty, finite values only.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub title: String,
    pub series: Series,
}

impl ChartSpec {
    pub fn bars(title: &str, bars: Vec<(String, f64)>) -> Result<Self> {
        if bars.is_empty() {
            return Err(Error::EmptySeries(title.to_string()));
        }
        if bars.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidRecord("non-finite bar value".into()));
        }
        Ok(ChartSpec {
            kind: ChartKind::Bar,
            title: title.to_string(),
            series: Series::Bars(bars),
        })
    }

    pub fn scatter(title: &str, points: Vec<(f64, f64, String)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySeries(title.to_string()));
        }
        if points.iter().any(|(x, y, _)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidRecord("non-finite point".into()));
        }
        Ok(ChartSpec {
            kind: ChartKind::Scatter,
            title: title.to_string(),
            series: Series::Points(points),
        })
    }

    /// Derives a chart from dataset records: pair/number records become a
    /// bar chart, point records a scatter keyed by record key (cluster id).
    pub fn from_records(title: &str, records: &[Record]) -> Result<Self> {
        let mut bars = Vec::new();
        let mut points = Vec::new();
        for r in records {
            match &r.value {
                Value::Pair(label, count) => bars.push((label.clone(), *count as f64)),
                Value::Number(n) => bars.push((r.key.clone(), *n)),
                Value::Point { x, y } => points.push((*x, *y, r.key.clone())),
                other => {
                    return Err(Error::InvalidRecord(format!(
                        "cannot chart {} record",
                        other.variant_tag()
                    )));
                }
            }
        }
        match (bars.is_empty(), points.is_empty()) {
            (false, true) => ChartSpec::bars(title, bars),
            (true, false) => ChartSpec::scatter(title, points),
            _ => Err(Error::EmptySeries(title.to_string())),
        }
    }
}

fn render_value(value: &Value) -> String {
    match value {
        Value::Text(s) => s.clone(),
        Value::Number(n) => format!("{n}"),
        Value::Point { x, y } => format!("({x}, {y})"),
        Value::Edge { src, dst } => format!("{src} -> {dst}"),
        Value::Pair(s, n) => format!("({s}, {n})"),
    }
}

/// Fixed-width key/value text table.
pub fn emit_table(bd: &BigData) -> String {
    let rows: Vec<(String, String)> = bd
        .records
        .iter()
        .map(|r| (r.key.clone(), render_value(&r.value)))
        .collect();
    let key_width = rows
        .iter()
        .map(|(k, _)| k.len())
        .chain(std::iter::once("key".len()))
        .max()
        .unwrap_or(3);
    let mut out = String::new();
    let _ = writeln!(out, "{:<key_width$}  value", "key");
    let _ = writeln!(out, "{:<key_width$}  -----", "-".repeat(key_width.min(3)));
    for (key, value) in rows {
        let _ = writeln!(out, "{key:<key_width$}  {value}");
    }
    out
}

fn json_value(value: &Value) -> serde_json::Value {
    use serde_json::json;
    match value {
        Value::Text(s) => json!(s),
        Value::Number(n) => json!(n),
        Value::Point { x, y } => json!([x, y]),
        Value::Edge { src, dst } => json!([src, dst]),
        Value::Pair(s, n) => json!([s, n]),
    }
}

/// JSON array of `{key, value}` objects, 2-space indent.
pub fn emit_json(bd: &BigData) -> String {
    let rows: Vec<serde_json::Value> = bd
        .records
        .iter()
        .map(|r| serde_json::json!({"key": r.key, "value": json_value(&r.value)}))
        .collect();
    serde_json::to_string_pretty(&rows).expect("json rows serialize")
}

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Self-contained SVG document, fixed 800×600 viewport, inline styles.
pub fn emit_svg(chart: &ChartSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r##"  <rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r#"  <text x="{}" y="30" font-family="sans-serif" font-size="18" text-anchor="middle">{}</text>"#,
        SVG_WIDTH / 2.0,
        xml_escape(&chart.title)
    );
    match &chart.series {
        Series::Bars(bars) => render_bars(&mut out, bars),
        Series::Points(points) => render_points(&mut out, points),
    }
    let _ = writeln!(out, "</svg>");
    out
}

fn render_bars(out: &mut String, bars: &[(String, f64)]) {
    let plot_w = SVG_WIDTH - 2.0 * MARGIN;
    let plot_h = SVG_HEIGHT - 2.0 * MARGIN;
    let max = bars.iter().map(|(_, v)| *v).fold(0.0f64, f64::max).max(1e-12);
    let slot = plot_w / bars.len() as f64;
    let bar_w = slot * 0.8;
    for (i, (label, value)) in bars.iter().enumerate() {
        let h = (value / max) * plot_h;
        let x = MARGIN + i as f64 * slot + slot * 0.1;
        let y = SVG_HEIGHT - MARGIN - h;
        let _ = writeln!(
            out,
            r#"  <rect x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{h:.2}" fill="{}"/>"#,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            x + bar_w / 2.0,
            SVG_HEIGHT - MARGIN + 16.0,
            xml_escape(label)
        );
        let _ = writeln!(
            out,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            x + bar_w / 2.0,
            y - 4.0,
            value
        );
    }
}

fn render_points(out: &mut String, points: &[(f64, f64, String)]) {
    let plot_w = SVG_WIDTH - 2.0 * MARGIN;
    let plot_h = SVG_HEIGHT - 2.0 * MARGIN;
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y, _) in points {
        min_x = min_x.min(*x);
        max_x = max_x.max(*x);
        min_y = min_y.min(*y);
        max_y = max_y.max(*y);
    }
    let span_x = (max_x - min_x).max(1e-12);
    let span_y = (max_y - min_y).max(1e-12);
    let mut clusters: Vec<&str> = points.iter().map(|(_, _, c)| c.as_str()).collect();
    clusters.sort_unstable();
    clusters.dedup();
    for (x, y, cluster) in points {
        let px = MARGIN + (x - min_x) / span_x * plot_w;
        let py = SVG_HEIGHT - MARGIN - (y - min_y) / span_y * plot_h;
        let color_idx = clusters.binary_search(&cluster.as_str()).unwrap_or(0);
        let _ = writeln!(
            out,
            r#"  <circle cx="{px:.2}" cy="{py:.2}" r="4" fill="{}" class="cluster-{}"/>"#,
            PALETTE[color_idx % PALETTE.len()],
            xml_escape(cluster)
        );
    }
}

macro_rules! output_engine {
    ($name:ident, $engine_name:literal) => {
        pub struct $name {
            desc: EngineDescriptor,
        }

        impl $name {
            pub fn new() -> Self {
                $name {
                    desc: EngineDescriptor::new($engine_name, EngineKind::Output, "1"),
                }
            }
        }

        impl Default for $name {
            fn default() -> Self {
                Self::new()
            }
        }

        impl Engine for $name {
            fn descriptor(&self) -> &EngineDescriptor {
                &self.desc
            }
            fn probe(&self, _: &Params) -> Availability {
                Availability::Available
            }
        }
    };
}

output_engine!(TableOutput, "table");
output_engine!(JsonOutput, "json");
output_engine!(SvgOutput, "svg");

impl OutputEngine for TableOutput {
    fn emit(&self, bd: &BigData, _: &Params) -> Result<String> {
        Ok(emit_table(bd))
    }
    fn extension(&self) -> &'static str {
        "txt"
    }
}

impl OutputEngine for JsonOutput {
    fn emit(&self, bd: &BigData, _: &Params) -> Result<String> {
        Ok(emit_json(bd))
    }
    fn extension(&self) -> &'static str {
        "json"
    }
}

impl OutputEngine for SvgOutput {
    fn emit(&self, bd: &BigData, params: &Params) -> Result<String> {
        let title = params.get("title").map(String::as_str).unwrap_or("datar");
        let chart = ChartSpec::from_records(title, &bd.records)?;
        Ok(emit_svg(&chart))
    }
    fn extension(&self) -> &'static str {
        "svg"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BigData, LineageEntry};

    fn counts_bd() -> BigData {
        let records = vec![
            Record::new("Spark", Value::Pair("Spark".into(), 4)).unwrap(),
            Record::new("YARN", Value::Pair("YARN".into(), 1)).unwrap(),
        ];
        BigData::from_records(records, LineageEntry::origin_generator("words", 2, 0))
    }

    #[test]
    fn json_golden() {
        let doc = emit_json(&counts_bd());
        let expected = r#"[
  {
    "key": "Spark",
    "value": [
      "Spark",
      4
    ]
  },
  {
    "key": "YARN",
    "value": [
      "YARN",
      1
    ]
  }
]"#;
        assert_eq!(doc, expected);
    }

    #[test]
    fn json_empty_dataset() {
        let bd = BigData::from_records(vec![], LineageEntry::origin_generator("words", 0, 0));
        assert_eq!(emit_json(&bd), "[]");
    }

    #[test]
    fn table_has_fixed_width_columns() {
        let doc = emit_table(&counts_bd());
        let lines: Vec<&str> = doc.lines().collect();
        assert!(lines[0].starts_with("key"));
        assert!(lines[2].starts_with("Spark"));
        assert!(lines[3].starts_with("YARN "));
        let spark_col = lines[2].find("(Spark, 4)").unwrap();
        let yarn_col = lines[3].find("(YARN, 1)").unwrap();
        assert_eq!(spark_col, yarn_col);
    }

    #[test]
    fn svg_bar_chart_heights_match_counts() {
        let engine = SvgOutput::new();
        let doc = engine.emit(&counts_bd(), &Params::new()).unwrap();
        assert!(doc.starts_with("<?xml"));
        assert_eq!(doc.matches("<rect").count(), 3); // background + two bars
        let heights: Vec<f64> = doc
            .lines()
            .filter(|l| l.contains("<rect") && !l.contains("fill=\"#ffffff\""))
            .map(|l| {
                let h = l.split("height=\"").nth(1).unwrap();
                h[..h.find('"').unwrap()].parse().unwrap()
            })
            .collect();
        assert_eq!(heights.len(), 2);
        assert!((heights[0] / heights[1] - 4.0).abs() < 1e-6);
    }

    #[test]
    fn svg_scatter_one_circle_per_point_colored_by_cluster() {
        let records = vec![
            Record::new("0", Value::Point { x: 0.0, y: 0.0 }).unwrap(),
            Record::new("0", Value::Point { x: 1.0, y: 1.0 }).unwrap(),
            Record::new("1", Value::Point { x: 10.0, y: 10.0 }).unwrap(),
        ];
        let bd = BigData::from_records(records, LineageEntry::origin_generator("points", 3, 0));
        let doc = SvgOutput::new().emit(&bd, &Params::new()).unwrap();
        assert_eq!(doc.matches("<circle").count(), 3);
        assert!(doc.contains("class=\"cluster-0\""));
        assert!(doc.contains("class=\"cluster-1\""));
        let c0_fill = doc
            .lines()
            .find(|l| l.contains("cluster-0"))
            .and_then(|l| l.split("fill=\"").nth(1))
            .map(|s| s[..7].to_string());
        let c1_fill = doc
            .lines()
            .find(|l| l.contains("cluster-1"))
            .and_then(|l| l.split("fill=\"").nth(1))
            .map(|s| s[..7].to_string());
        assert_ne!(c0_fill, c1_fill);
    }

    #[test]
    fn svg_rejects_empty_series() {
        let bd = BigData::from_records(vec![], LineageEntry::origin_generator("words", 0, 0));
        assert!(matches!(
            SvgOutput::new().emit(&bd, &Params::new()).unwrap_err(),
            Error::EmptySeries(_)
        ));
    }

    #[test]
    fn emitters_are_deterministic() {
        let bd = counts_bd();
        assert_eq!(emit_table(&bd), emit_table(&bd));
        assert_eq!(emit_json(&bd), emit_json(&bd));
        let svg = SvgOutput::new();
        assert_eq!(
            svg.emit(&bd, &Params::new()).unwrap(),
            svg.emit(&bd, &Params::new()).unwrap()
        );
    }
}
