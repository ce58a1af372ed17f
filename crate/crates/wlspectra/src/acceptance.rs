//! The acceptance checks behind `cargo test --test acceptance` and the
//! `selftest` subcommand: each criterion is a function returning a
//! pass/fail report with the measured values, so failures are diagnosable
//! from the one-line summary.

use std::time::{Duration, Instant};

use rand::{RngExt as _, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::bench::{
    cospectral_fixture, find_cospectral_wl_distinguishable, generate_benchmark,
    nearest_centroid_eval, nearest_centroid_eval_with,
};
use crate::graph::{
    brute_force_isomorphic, permute, random_graph, reference_graph, Graph, ReferenceGraph,
    VertexPermutation,
};
use crate::kwl::{diagonal_encodes_full_histogram, kwl_refine_to_convergence};
use crate::spectral::{
    approximate_heat_diag, cospectral, decompose, heat_kernel, laplacian, spectral_features,
    SpectralColoring, SpectralConfig,
};
use crate::wl::{
    distinguishable, joint_refine_full, refine_to_convergence, Coloring, Constant,
    DegreeColoring, FeatureChannels, PreColoring, ProductColoring,
};

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub elapsed_ms: u128,
}

impl CriterionResult {
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:2} [{}] {} ({} ms): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed_ms,
            self.details
        )
    }
}

fn report(
    id: u32,
    name: &'static str,
    started: Instant,
    passed: bool,
    details: String,
) -> CriterionResult {
    CriterionResult { id, name, passed, details, elapsed_ms: started.elapsed().as_millis() }
}

fn molecules() -> (Graph, Graph) {
    (
        reference_graph(ReferenceGraph::Decalin),
        reference_graph(ReferenceGraph::Bicyclopentyl),
    )
}

/// Criterion 1: spectral pre-coloring with m=1, t=1, r=0 reproduces the
/// published heat-diagonal multisets at 4 decimals, with disjoint joint
/// palettes, in under a second.
pub fn golden_spectral_diagonals() -> CriterionResult {
    let started = Instant::now();
    let (g1, g2) = molecules();
    let cfg = SpectralConfig::new(0.0, 0.0, 1, vec![]).expect("valid config");

    let rounded = |g: &Graph| -> Vec<f64> {
        let features = spectral_features(g, &cfg).expect("features");
        let mut values: Vec<f64> = features
            .vectors()
            .iter()
            .map(|v| (v[0] * 1e4).round() / 1e4)
            .collect();
        values.sort_by(f64::total_cmp);
        values
    };
    let decalin = rounded(&g1);
    let bicyclo = rounded(&g2);
    let expect_decalin = vec![
        0.1914, 0.1914, 0.2891, 0.2891, 0.2891, 0.2891, 0.3078, 0.3078, 0.3078, 0.3078,
    ];
    let expect_bicyclo = vec![
        0.1929, 0.1929, 0.291, 0.291, 0.291, 0.291, 0.3098, 0.3098, 0.3098, 0.3098,
    ];

    let pre = SpectralColoring::new(cfg);
    let (k1, k2) = pre.keys_pair(&g1, &g2).expect("keys");
    let mut all = k1.clone();
    all.extend(k2.clone());
    let joint = Coloring::from_keys(&all);
    let palette_disjoint = {
        let left: std::collections::BTreeSet<u32> =
            joint.colors()[..10].iter().copied().collect();
        let right: std::collections::BTreeSet<u32> =
            joint.colors()[10..].iter().copied().collect();
        left.intersection(&right).count() == 0
    };

    let in_time = started.elapsed() < Duration::from_secs(1);
    let passed =
        decalin == expect_decalin && bicyclo == expect_bicyclo && palette_disjoint && in_time;
    report(
        1,
        "golden heat-diagonal multisets",
        started,
        passed,
        format!(
            "decalin {decalin:?}, bicyclopentyl {bicyclo:?}, joint palettes disjoint: {palette_disjoint}"
        ),
    )
}

/// Criterion 2: constant-pre-colored refinement cannot separate the
/// molecule pair; both graphs converge to the {2,4,4} histogram.
pub fn refinement_blind_spot() -> CriterionResult {
    let started = Instant::now();
    let (g1, g2) = molecules();
    let joint = joint_refine_full(&g1, &g2, &Constant).expect("refinement");
    let equal = joint.histogram1 == joint.histogram2;
    let sizes = joint.histogram1.class_sizes();
    let in_time = started.elapsed() < Duration::from_secs(1);
    let passed = equal && sizes == vec![2, 4, 4] && in_time;
    report(
        2,
        "constant refinement is blind to the molecule pair",
        started,
        passed,
        format!("histograms equal: {equal}, class sizes {sizes:?}"),
    )
}

/// Criterion 3: degree-seeded refinement converges to exactly the same
/// partition as constant-seeded refinement on 200 random graphs.
pub fn degree_seed_changes_nothing() -> CriterionResult {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0003);
    let mut matching = 0;
    const TOTAL: usize = 200;
    for _ in 0..TOTAL {
        let n = rng.random_range(1..=12);
        let g = random_graph(n, rng.random_range(0.15..0.85), &mut rng);
        let (constant, _) = refine_to_convergence(&g, &Constant).expect("refinement");
        let (degree, _) = refine_to_convergence(&g, &DegreeColoring).expect("refinement");
        if constant.same_partition(&degree) {
            matching += 1;
        }
    }
    report(
        3,
        "degree pre-coloring equals constant pre-coloring",
        started,
        matching == TOTAL,
        format!("{matching}/{TOTAL} partitions identical"),
    )
}

/// Per-vertex invariant profile hashed with a seed: a cheap, permutation
/// equivariant random color channel for the monotonicity check.
fn seeded_invariant_channel(seed: u64, buckets: u32) -> impl Fn(&Graph) -> crate::error::Result<Vec<Vec<f64>>> {
    move |g: &Graph| {
        let rows = (0..g.vertex_count())
            .map(|v| {
                let mut profile: Vec<u64> = vec![g.degree(v) as u64];
                let mut neighbor_degrees: Vec<u64> =
                    g.neighbors(v).iter().map(|&u| g.degree(u) as u64).collect();
                neighbor_degrees.sort_unstable();
                profile.extend(neighbor_degrees);
                let triangles = g
                    .neighbors(v)
                    .iter()
                    .flat_map(|&a| g.neighbors(v).iter().map(move |&b| (a, b)))
                    .filter(|&(a, b)| a < b && g.has_edge(a, b))
                    .count() as u64;
                profile.push(triangles);
                let mut hash = 0xcbf29ce484222325u64 ^ seed;
                for value in profile {
                    for byte in value.to_le_bytes() {
                        hash ^= u64::from(byte);
                        hash = hash.wrapping_mul(0x100000001b3);
                    }
                }
                vec![f64::from(hash as u32 % buckets)]
            })
            .collect();
        Ok(rows)
    }
}

/// Criterion 4: for 500 random pairs and random equivariant channels,
/// distinguishability under a coloring is preserved by any refinement of
/// that coloring.
pub fn refinement_monotonicity() -> CriterionResult {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0004);
    let mut held = 0;
    let mut premise_hits = 0;
    const TOTAL: usize = 500;
    for trial in 0..TOTAL {
        let n = rng.random_range(3..=8);
        let g1 = random_graph(n, rng.random_range(0.2..0.8), &mut rng);
        let g2 = random_graph(n, rng.random_range(0.2..0.8), &mut rng);
        let base = FeatureChannels::new(seeded_invariant_channel(
            0x1000 + trial as u64,
            rng.random_range(2..5),
        ));
        let extra = FeatureChannels::new(seeded_invariant_channel(
            0x2000 + trial as u64,
            rng.random_range(2..5),
        ));
        let combined = ProductColoring(&base, &extra);
        let coarse_verdict = distinguishable(&g1, &g2, &base).expect("refinement");
        if coarse_verdict {
            premise_hits += 1;
            if distinguishable(&g1, &g2, &combined).expect("refinement") {
                held += 1;
            }
        } else {
            held += 1;
        }
    }
    report(
        4,
        "distinguishability survives refinement of the pre-coloring",
        started,
        held == TOTAL,
        format!("{held}/{TOTAL} implications held ({premise_hits} with a true premise)"),
    )
}

/// Criterion 5: diagonal histograms agree with full tuple histograms on
/// every non-isomorphic 4-vertex pair (arity 2) and on 200 random 5-6
/// vertex pairs (arities 2 and 3).
pub fn diagonal_equivalence_brute_force() -> CriterionResult {
    let started = Instant::now();
    let mut failures = 0usize;
    let mut checked = 0usize;

    // all graphs on 4 labeled vertices, one representative per class
    let mut representatives: Vec<Graph> = Vec::new();
    for mask in 0u64..64 {
        let mut edges = Vec::new();
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for (bit, &(u, v)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                edges.push((u, v));
            }
        }
        let g = Graph::new(4, edges).expect("valid");
        if !representatives
            .iter()
            .any(|r| brute_force_isomorphic(r, &g).expect("small"))
        {
            representatives.push(g);
        }
    }
    let class_count = representatives.len();
    for i in 0..representatives.len() {
        for j in i + 1..representatives.len() {
            checked += 1;
            if !diagonal_encodes_full_histogram(&representatives[i], &representatives[j], 2)
                .expect("within budget")
            {
                failures += 1;
            }
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0005);
    for _ in 0..200 {
        let n = rng.random_range(5..=6);
        let g1 = random_graph(n, rng.random_range(0.2..0.8), &mut rng);
        let g2 = random_graph(n, rng.random_range(0.2..0.8), &mut rng);
        for k in [2, 3] {
            checked += 1;
            if !diagonal_encodes_full_histogram(&g1, &g2, k).expect("within budget") {
                failures += 1;
            }
        }
    }
    let in_time = started.elapsed() < Duration::from_secs(300);
    report(
        5,
        "diagonal histograms encode full tuple histograms",
        started,
        failures == 0 && in_time,
        format!(
            "{checked} pairs checked ({class_count} 4-vertex classes), {failures} failures"
        ),
    )
}

/// Criterion 6: on the same corpus, equal arity-3 histograms imply equal
/// arity-2 histograms.
pub fn arity_hierarchy_consistency() -> CriterionResult {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0005);
    let mut failures = 0usize;
    let mut premise_hits = 0usize;
    for _ in 0..200 {
        let n = rng.random_range(5..=6);
        let g1 = random_graph(n, rng.random_range(0.2..0.8), &mut rng);
        let g2 = random_graph(n, rng.random_range(0.2..0.8), &mut rng);
        let (a3, b3) = kwl_refine_to_convergence(&g1, &g2, 3).expect("within budget");
        if a3.histogram() == b3.histogram() {
            premise_hits += 1;
            let (a2, b2) = kwl_refine_to_convergence(&g1, &g2, 2).expect("within budget");
            if a2.histogram() != b2.histogram() {
                failures += 1;
            }
        }
    }
    report(
        6,
        "arity-3 equality implies arity-2 equality",
        started,
        failures == 0,
        format!("{premise_hits} equal-at-3 pairs, {failures} hierarchy violations"),
    )
}

/// Criterion 7: the spectral invariant suite over at least 100 randomized
/// cases per invariant.
pub fn spectral_invariant_suite() -> CriterionResult {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0007);
    let mut worst: Vec<(&str, f64, f64)> = Vec::new();
    let mut track = |name: &'static str, err: f64, tol: f64| {
        match worst.iter_mut().find(|(n, _, _)| *n == name) {
            Some(entry) => entry.1 = entry.1.max(err),
            None => worst.push((name, err, tol)),
        }
    };

    for _ in 0..100 {
        let n = rng.random_range(2..=9);
        let g = random_graph(n, rng.random_range(0.2..0.9), &mut rng);
        let l = laplacian(&g);
        let spectrum = decompose(&l).expect("decomposition");

        // Dirichlet identity
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let direct: f64 = g.edges().map(|(u, v)| (x[u] - x[v]).powi(2)).sum();
        track("dirichlet", (l.quadratic_form(&x) - direct).abs(), 1e-9);

        let t = rng.random_range(0.05..2.0);
        let h = heat_kernel(&spectrum, t);
        let row_err = (0..n)
            .map(|u| (h.row(u).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0f64, f64::max);
        track("row sums", row_err, 1e-8);

        let h0 = heat_kernel(&spectrum, 0.0);
        let identity_err = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .map(|(u, v)| (h0.get(u, v) - f64::from(u8::from(u == v))).abs())
            .fold(0.0f64, f64::max);
        track("H_0 identity", identity_err, 1e-10);

        let t2 = rng.random_range(0.05..2.0);
        let combined = heat_kernel(&spectrum, t + t2);
        let product = h.as_matrix().matmul(heat_kernel(&spectrum, t2).as_matrix());
        let semigroup_err = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .map(|(u, v)| (product.get(u, v) - combined.get(u, v)).abs())
            .fold(0.0f64, f64::max);
        track("semigroup", semigroup_err, 1e-7);

        let trace_expected: f64 =
            spectrum.eigenvalues().iter().map(|&l| (-l * t).exp()).sum();
        track("trace", (h.trace() - trace_expected).abs(), 1e-8);

        let sigma = VertexPermutation::random(n, &mut rng);
        let hp = heat_kernel(
            &decompose(&laplacian(&permute(&g, &sigma).expect("sizes match"))).expect("decomposition"),
            t,
        );
        let equivariance_err = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .map(|(u, v)| (h.get(u, v) - hp.get(sigma.apply(u), sigma.apply(v))).abs())
            .fold(0.0f64, f64::max);
        track("equivariance", equivariance_err, 1e-8);
    }

    let passed = worst.iter().all(|&(_, err, tol)| err <= tol);
    let details = worst
        .iter()
        .map(|(name, err, tol)| format!("{name} {err:.2e} (tol {tol:.0e})"))
        .collect::<Vec<_>>()
        .join(", ");
    report(7, "spectral invariant suite", started, passed, details)
}

/// Criterion 8: the searched cospectral pair is found in time, matches the
/// frozen fixture, and has all three advertised properties.
pub fn cospectral_pair_discovery() -> CriterionResult {
    let started = Instant::now();
    let searched = find_cospectral_wl_distinguishable(9);
    let in_time = started.elapsed() < Duration::from_secs(600);
    match searched {
        Err(e) => report(8, "cospectral pair discovery", started, false, format!("search failed: {e}")),
        Ok((a, b)) => {
            let fixture = cospectral_fixture();
            let matches_fixture = (a.clone(), b.clone()) == fixture;
            let is_cospectral = cospectral(&a, &b, 1e-8).expect("same size");
            let separated = distinguishable(&a, &b, &Constant).expect("refinement");
            let non_isomorphic = !brute_force_isomorphic(&a, &b).expect("small");
            let passed =
                matches_fixture && is_cospectral && separated && non_isomorphic && in_time;
            report(
                8,
                "cospectral pair discovery",
                started,
                passed,
                format!(
                    "n={}, cospectral: {is_cospectral}, refinement-distinguishable: {separated}, non-isomorphic: {non_isomorphic}, matches fixture: {matches_fixture}",
                    a.vertex_count()
                ),
            )
        }
    }
}

/// Criterion 9: implicit Euler error halves with the step size at full
/// truncation, and at fixed steps the error is monotone non-increasing in
/// the number of retained eigenpairs, on 20 random graphs.
pub fn reduced_order_convergence() -> CriterionResult {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0009);
    let mut halving_ok = 0usize;
    let mut halving_total = 0usize;
    let mut monotone_ok = 0usize;
    const GRAPHS: usize = 20;

    for _ in 0..GRAPHS {
        let n = rng.random_range(4..=8);
        let g = loop {
            let g = random_graph(n, 0.5, &mut rng);
            if g.edge_count() > 0 {
                break g;
            }
        };
        let spectrum = decompose(&laplacian(&g)).expect("decomposition");
        let t = 0.5f64;
        let exact: Vec<f64> = {
            let h = heat_kernel(&spectrum, t);
            h.diagonal()
        };
        let max_err = |approx: &crate::spectral::SpectralFeatures| -> f64 {
            exact
                .iter()
                .enumerate()
                .map(|(u, &x)| (approx.vector(u)[0] - x).abs())
                .fold(0.0f64, f64::max)
        };

        // step halving at full truncation
        let full = SpectralConfig::new(t.log10(), t.log10(), 1, vec![])
            .expect("valid config")
            .with_truncation(n);
        let mut last = f64::INFINITY;
        for steps in [64usize, 128, 256, 512] {
            let err = max_err(&approximate_heat_diag(&g, &full, steps).expect("valid"));
            if last.is_finite() {
                halving_total += 1;
                let ratio = err / last;
                if ratio > 0.35 && ratio < 0.65 {
                    halving_ok += 1;
                }
            }
            last = err;
        }

        // truncation monotonicity at fixed steps
        let steps = 20_000;
        let mut previous = f64::INFINITY;
        let mut monotone = true;
        for k in 1..=n {
            let cfg = SpectralConfig::new(t.log10(), t.log10(), 1, vec![])
                .expect("valid config")
                .with_truncation(k);
            let err = max_err(&approximate_heat_diag(&g, &cfg, steps).expect("valid"));
            if err > previous + 1e-12 {
                monotone = false;
            }
            previous = err;
        }
        if monotone {
            monotone_ok += 1;
        }
    }
    let passed = halving_ok == halving_total && monotone_ok == GRAPHS;
    report(
        9,
        "reduced-order heat diagonal convergence",
        started,
        passed,
        format!(
            "halving ratio in band: {halving_ok}/{halving_total}, truncation monotone: {monotone_ok}/{GRAPHS}"
        ),
    )
}

/// Criterion 10, as stated: the nearest-centroid baseline on the
/// 1000-instance molecule benchmark with cfg (-1,1,10,none) reaches mean
/// test accuracy >= 0.90 over 10 seeds, while all-ones features stay at or
/// below 0.60. The spectral half of this bound is not reachable for a
/// linear centroid rule on this near-cospectral pair (a single edge edit
/// displaces instances about five times farther than the class gap); the
/// check runs faithfully and reports the measured means.
pub fn benchmark_separability() -> CriterionResult {
    let started = Instant::now();
    let (g0, g1) = molecules();
    let cfg = SpectralConfig::parse("(-1,1,10,none)").expect("valid config");
    let mut spectral_total = 0.0;
    let mut constant_total = 0.0;
    const SEEDS: u64 = 10;
    for seed in 0..SEEDS {
        let ds = generate_benchmark(&g0, &g1, 1000, seed).expect("generation");
        spectral_total += nearest_centroid_eval(&ds, &cfg).expect("evaluation");
        constant_total +=
            nearest_centroid_eval_with(&ds, |g| Ok(vec![1.0; g.vertex_count()]))
                .expect("evaluation");
    }
    let spectral_mean = spectral_total / SEEDS as f64;
    let constant_mean = constant_total / SEEDS as f64;
    let in_time = started.elapsed() < Duration::from_secs(120);
    let passed = spectral_mean >= 0.90 && constant_mean <= 0.60 && in_time;
    report(
        10,
        "nearest-centroid separability on the molecule benchmark",
        started,
        passed,
        format!(
            "spectral mean accuracy {spectral_mean:.3} (required >= 0.90), all-ones mean {constant_mean:.3} (required <= 0.60)"
        ),
    )
}

/// Criterion 11: the bench and features commands write byte-identical
/// outputs across two runs with the same seed.
pub fn output_determinism() -> CriterionResult {
    let started = Instant::now();
    let scratch = std::env::temp_dir().join(format!(
        "wlspectra-determinism-{}-{}",
        std::process::id(),
        started.elapsed().as_nanos()
    ));
    let result = (|| -> crate::error::Result<(bool, bool)> {
        let bench_a = scratch.join("bench-a");
        let bench_b = scratch.join("bench-b");
        let report_a = crate::cli::cmd_bench("molecules", 60, 17, &bench_a)?;
        let report_b = crate::cli::cmd_bench("molecules", 60, 17, &bench_b)?;
        // reports embed the output path; strip it before comparing
        let strip_out = |report: &str| -> serde_json::Value {
            let mut value: serde_json::Value =
                serde_json::from_str(report).expect("report is JSON");
            value.as_object_mut().expect("report is an object").remove("out");
            value
        };
        let bench_equal = strip_out(&report_a) == strip_out(&report_b)
            && read_tree(&bench_a)? == read_tree(&bench_b)?;

        let input = scratch.join("input.txt");
        std::fs::write(&input, reference_graph(ReferenceGraph::Decalin).to_edge_list())?;
        let features_a = scratch.join("features-a.csv");
        let features_b = scratch.join("features-b.csv");
        let cfg = SpectralConfig::parse("(-1,1,5,max)").expect("valid config");
        crate::cli::cmd_features(&input, &cfg, None, 1000, &features_a, "csv")?;
        crate::cli::cmd_features(&input, &cfg, None, 1000, &features_b, "csv")?;
        let features_equal = std::fs::read(&features_a)? == std::fs::read(&features_b)?;
        Ok((bench_equal, features_equal))
    })();
    std::fs::remove_dir_all(&scratch).ok();
    match result {
        Err(e) => report(11, "output determinism", started, false, format!("error: {e}")),
        Ok((bench_equal, features_equal)) => report(
            11,
            "output determinism",
            started,
            bench_equal && features_equal,
            format!("bench outputs identical: {bench_equal}, feature outputs identical: {features_equal}"),
        ),
    }
}

fn read_tree(dir: &std::path::Path) -> crate::error::Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let mut entries: Vec<_> = std::fs::read_dir(&d)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        entries.sort();
        for path in entries {
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .expect("path under root")
                    .display()
                    .to_string();
                files.push((rel, std::fs::read(&path)?));
            }
        }
    }
    files.sort();
    Ok(files)
}

/// Runs every criterion in order, reporting each result as it completes.
pub fn run_all_with(mut progress: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let criteria: [fn() -> CriterionResult; 11] = [
        golden_spectral_diagonals,
        refinement_blind_spot,
        degree_seed_changes_nothing,
        refinement_monotonicity,
        diagonal_equivalence_brute_force,
        arity_hierarchy_consistency,
        spectral_invariant_suite,
        cospectral_pair_discovery,
        reduced_order_convergence,
        benchmark_separability,
        output_determinism,
    ];
    criteria
        .into_iter()
        .map(|criterion| {
            let result = criterion();
            progress(&result);
            result
        })
        .collect()
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    run_all_with(|_| {})
}
