//! Ranks a small hand-built link graph and prints each page's score, both
//! as raw probability and in display scale.

use datar::model::{Record, Value};
use datar::tasks::{pagerank, PageRankParams};

fn edge(src: &str, dst: &str) -> Record {
    Record::new(
        src,
        Value::Edge {
            src: src.into(),
            dst: dst.into(),
        },
    )
    .unwrap()
}

fn main() -> datar::Result<()> {
    // a hub, a loop, a dangling page and an isolated one
    let graph = vec![
        edge("home", "docs"),
        edge("home", "blog"),
        edge("docs", "home"),
        edge("blog", "docs"),
        edge("docs", "archive"), // archive links nowhere: dangling
        Record::text("island"),  // no edges at all
    ];

    let result = pagerank(&graph, PageRankParams::default())?;
    println!("score mass after last iteration: {:.12}", result.iteration_sums.last().unwrap());
    for record in result.score_records() {
        let Value::Number(display) = record.value else {
            unreachable!()
        };
        println!("{:<8} {display}", record.key);
    }
    Ok(())
}
