//! Refinement verdicts on the decalin / bicyclopentyl pair under different
//! pre-colorings: constant and degree seeds cannot separate the two
//! molecules, a single heat-kernel diagonal sample can.
//!
//! Run with: cargo run --example compare_molecules

use wlspectra::graph::{reference_graph, ReferenceGraph};
use wlspectra::spectral::{SpectralColoring, SpectralConfig};
use wlspectra::wl::{joint_refine_full, Constant, DegreeColoring, PreColoring};

fn report(name: &str, g1: &wlspectra::Graph, g2: &wlspectra::Graph, pre: &impl PreColoring) {
    let joint = joint_refine_full(g1, g2, pre).expect("refinement succeeds");
    println!(
        "{name:<22} distinguishable: {:<5} iterations: {:<2} class sizes: {:?} / {:?}",
        joint.distinguishable(),
        joint.iterations,
        joint.histogram1.class_sizes(),
        joint.histogram2.class_sizes(),
    );
}

fn main() {
    let decalin = reference_graph(ReferenceGraph::Decalin);
    let bicyclopentyl = reference_graph(ReferenceGraph::Bicyclopentyl);
    println!(
        "decalin: {} vertices / {} edges, bicyclopentyl: {} vertices / {} edges\n",
        decalin.vertex_count(),
        decalin.edge_count(),
        bicyclopentyl.vertex_count(),
        bicyclopentyl.edge_count(),
    );

    report("constant seed", &decalin, &bicyclopentyl, &Constant);
    report("degree seed", &decalin, &bicyclopentyl, &DegreeColoring);

    let cfg = SpectralConfig::parse("(0,0,1,none)").expect("valid config");
    report(
        "spectral seed (m=1,t=1)",
        &decalin,
        &bicyclopentyl,
        &SpectralColoring::new(cfg),
    );
}
