//! Clusters generated 2-D points with seeded k-means and writes an SVG
//! scatter chart colored per cluster to `out/kmeans_clusters.svg`.

use std::fs;

use datar::engines::input::generate_records;
use datar::engines::output::{emit_svg, ChartSpec};
use datar::tasks::{clustered_points, kmeans, KMeansParams};

fn main() -> datar::Result<()> {
    let points = generate_records("points", 500, 42)?;
    let result = kmeans(&points, KMeansParams::new(4, 20, 1)?)?;

    println!("wcss per iteration: {:?}", result.wcss_per_iteration);
    for (i, (x, y)) in result.centroids.iter().enumerate() {
        println!("centroid {i}: ({x:.1}, {y:.1})");
    }

    let clustered = clustered_points(&points, &result)?;
    let chart = ChartSpec::from_records("kmeans", &clustered)?;
    fs::create_dir_all("out")?;
    fs::write("out/kmeans_clusters.svg", emit_svg(&chart))?;
    println!("wrote out/kmeans_clusters.svg");
    Ok(())
}
