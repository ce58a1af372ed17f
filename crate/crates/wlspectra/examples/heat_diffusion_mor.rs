//! Reduced-order approximation of the heat-kernel diagonal: implicit Euler
//! error halves with the step size, and grows smaller as more eigenpairs
//! are kept.
//!
//! Run with: cargo run --example heat_diffusion_mor

use wlspectra::graph::{reference_graph, ReferenceGraph};
use wlspectra::spectral::{
    approximate_heat_diag, decompose, heat_kernel, laplacian, SpectralConfig,
};

fn main() {
    let g = reference_graph(ReferenceGraph::Decalin);
    let n = g.vertex_count();
    let t = 1.0;
    let exact = heat_kernel(&decompose(&laplacian(&g)).expect("decomposition"), t).diagonal();

    let max_err = |approx: &wlspectra::spectral::SpectralFeatures| -> f64 {
        exact
            .iter()
            .enumerate()
            .map(|(u, &x)| (approx.vector(u)[0] - x).abs())
            .fold(0.0f64, f64::max)
    };

    println!("step halving at full truncation (k = {n}):");
    let full = SpectralConfig::new(0.0, 0.0, 1, vec![]).expect("valid").with_truncation(n);
    let mut last = f64::NAN;
    for steps in [50usize, 100, 200, 400, 800] {
        let err = max_err(&approximate_heat_diag(&g, &full, steps).expect("valid"));
        let ratio = if last.is_nan() { String::from("-") } else { format!("{:.3}", err / last) };
        println!("  steps {steps:>4}: max error {err:.3e}  (ratio to previous: {ratio})");
        last = err;
    }

    println!("\ntruncation sweep at 10000 steps:");
    for k in 1..=n {
        let cfg = SpectralConfig::new(0.0, 0.0, 1, vec![]).expect("valid").with_truncation(k);
        let err = max_err(&approximate_heat_diag(&g, &cfg, 10_000).expect("valid"));
        println!("  k = {k:>2}: max error {err:.3e}");
    }
}
