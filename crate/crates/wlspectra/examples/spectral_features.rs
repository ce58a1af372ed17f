//! Heat-kernel node features: log-spaced time samples, per-vertex
//! diagonals plus row quantiles, and the CSV export used by the `features`
//! subcommand.
//!
//! Run with: cargo run --example spectral_features

use wlspectra::graph::{reference_graph, ReferenceGraph};
use wlspectra::spectral::{features_to_csv, spectral_features, SpectralConfig};

fn main() {
    let g = reference_graph(ReferenceGraph::Decalin);

    let cfg = SpectralConfig::parse("(-1,1,5,max)").expect("valid config");
    println!("time samples for {cfg}: {:?}\n", cfg.time_samples());

    let features = spectral_features(&g, &cfg).expect("features");
    println!(
        "{} vertices, {} features each (5 diagonals + 5 max quantiles)",
        features.vertex_count(),
        features.feature_len()
    );
    for v in 0..3 {
        let row: Vec<String> = features.vector(v).iter().map(|x| format!("{x:.4}")).collect();
        println!("vertex {v}: [{}]", row.join(", "));
    }

    println!("\nCSV head:");
    for line in features_to_csv(&[features]).lines().take(4) {
        println!("{line}");
    }
}
