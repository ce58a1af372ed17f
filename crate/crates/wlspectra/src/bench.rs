//! Synthetic distinguishability benchmarks: perturbed-pair dataset
//! generation with train/test splits, exhaustive discovery of a cospectral
//! but refinement-distinguishable graph pair, and a hyperparameter-free
//! nearest-centroid baseline over spectral features.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, RngExt as _, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexPermutation};
use crate::spectral::{cospectral, spectral_features, SpectralConfig};
use crate::wl::{distinguishable, Constant};

/// The single-edge edit applied to a source graph, recorded in source
/// coordinates (before relabeling).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Perturbation {
    Added(usize, usize),
    Removed(usize, usize),
}

/// One benchmark example: a perturbed, relabeled copy of one of the two
/// source graphs.
#[derive(Clone, Debug)]
pub struct BenchmarkInstance {
    pub graph: Graph,
    /// Which source the instance was perturbed from (0 or 1).
    pub label: u8,
    pub perturbation: Perturbation,
    pub permutation: VertexPermutation,
}

impl BenchmarkInstance {
    /// Undoes the relabeling and the edit, recovering the source graph.
    pub fn reconstruct_source(&self) -> Result<Graph> {
        let unpermuted = crate::graph::permute(&self.graph, &self.permutation.inverse())?;
        let n = unpermuted.vertex_count();
        match self.perturbation {
            Perturbation::Added(u, v) => Graph::new(
                n,
                unpermuted.edges().filter(|&e| e != (u.min(v), u.max(v))),
            ),
            Perturbation::Removed(u, v) => {
                Graph::new(n, unpermuted.edges().chain([(u, v)]))
            }
        }
    }
}

/// A generated benchmark with its train/test split.
#[derive(Clone, Debug)]
pub struct BenchmarkDataset {
    pub sources: (Graph, Graph),
    pub instances: Vec<BenchmarkInstance>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Generates `count` instances: each picks a source uniformly, then either
/// adds one absent edge or removes one present edge (uniformly, resampling
/// edits that would leave the graph edgeless or complete), then applies a
/// uniform random relabeling. The split holds out one tenth of the
/// instances, stratified by label. Fully determined by `seed`.
pub fn generate_benchmark(
    g0: &Graph,
    g1: &Graph,
    count: usize,
    seed: u64,
) -> Result<BenchmarkDataset> {
    if count < 2 {
        return Err(Error::Dataset(format!(
            "need at least 2 instances, got {count}"
        )));
    }
    for g in [g0, g1] {
        if g.vertex_count() < 2 {
            return Err(Error::Dataset(
                "source graphs need at least 2 vertices to perturb".into(),
            ));
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut instances = Vec::with_capacity(count);
    for _ in 0..count {
        let label = rng.random_range(0..2u8);
        let source = if label == 0 { g0 } else { g1 };
        let (perturbed, perturbation) = perturb_one_edge(source, &mut rng)?;
        let permutation = VertexPermutation::random(source.vertex_count(), &mut rng);
        let graph = crate::graph::permute(&perturbed, &permutation)?;
        instances.push(BenchmarkInstance { graph, label, perturbation, permutation });
    }
    let (train, test) = stratified_split(&instances, count / 10, &mut rng);
    Ok(BenchmarkDataset { sources: (g0.clone(), g1.clone()), instances, train, test, seed })
}

fn perturb_one_edge(source: &Graph, rng: &mut impl Rng) -> Result<(Graph, Perturbation)> {
    let n = source.vertex_count();
    let max_edges = n * (n - 1) / 2;
    let can_add = source.edge_count() < max_edges;
    let can_remove = source.edge_count() > 1;
    if !can_add && !can_remove {
        return Err(Error::Dataset(
            "source graph admits no single-edge perturbation".into(),
        ));
    }
    loop {
        let add = rng.random_bool(0.5);
        if add && can_add {
            let absent: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|&(u, v)| !source.has_edge(u, v))
                .collect();
            let (u, v) = absent[rng.random_range(0..absent.len())];
            let graph = Graph::new(n, source.edges().chain([(u, v)]))?;
            return Ok((graph, Perturbation::Added(u, v)));
        }
        if !add && can_remove {
            let present: Vec<(usize, usize)> = source.edges().collect();
            let (u, v) = present[rng.random_range(0..present.len())];
            let graph = Graph::new(n, source.edges().filter(|&e| e != (u, v)))?;
            return Ok((graph, Perturbation::Removed(u, v)));
        }
    }
}

/// Holds out `test_size` instances (at least one), stratified by label so
/// both labels appear on both sides whenever they can.
fn stratified_split(
    instances: &[BenchmarkInstance],
    test_size: usize,
    rng: &mut impl Rng,
) -> (Vec<usize>, Vec<usize>) {
    let test_size = test_size.max(1).min(instances.len() - 1);
    let mut by_label: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, inst) in instances.iter().enumerate() {
        by_label[inst.label as usize].push(i);
    }
    for pool in &mut by_label {
        // Fisher-Yates over each label pool, in label order
        for i in (1..pool.len()).rev() {
            let j = rng.random_range(0..=i);
            pool.swap(i, j);
        }
    }
    let mut quota = [0usize; 2];
    for l in 0..2 {
        let n_l = by_label[l].len();
        quota[l] = (n_l / 10).max(usize::from(n_l >= 2)).min(n_l);
    }
    while quota[0] + quota[1] > test_size {
        let l = if quota[0] >= quota[1] { 0 } else { 1 };
        quota[l] -= 1;
    }
    while quota[0] + quota[1] < test_size {
        let room = [by_label[0].len() - quota[0], by_label[1].len() - quota[1]];
        let l = if room[0] >= room[1] { 0 } else { 1 };
        quota[l] += 1;
    }
    let mut test: Vec<usize> = Vec::with_capacity(test_size);
    let mut train: Vec<usize> = Vec::with_capacity(instances.len() - test_size);
    for l in 0..2 {
        test.extend(&by_label[l][..quota[l]]);
        train.extend(&by_label[l][quota[l]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Exact characteristic polynomial of the integer Laplacian, highest degree
/// first, via the Faddeev-LeVerrier recurrence in i128 arithmetic. Equal
/// polynomials mean exactly equal Laplacian spectra.
fn laplacian_charpoly(g: &Graph) -> Vec<i128> {
    let n = g.vertex_count();
    let l = |i: usize, j: usize| -> i128 {
        if i == j {
            g.degree(i) as i128
        } else if g.has_edge(i, j) {
            -1
        } else {
            0
        }
    };
    // c_0 = 1; m_1 = L; c_k = -tr(m_k)/k; m_{k+1} = L (m_k + c_k I)
    let mut coeffs = vec![1i128];
    let mut m: Vec<i128> = (0..n * n).map(|idx| l(idx / n, idx % n)).collect();
    for k in 1..=n {
        let trace: i128 = (0..n).map(|i| m[i * n + i]).sum();
        let c = -trace / k as i128;
        coeffs.push(c);
        if k == n {
            break;
        }
        let mut with_c = m.clone();
        for i in 0..n {
            with_c[i * n + i] += c;
        }
        let mut next = vec![0i128; n * n];
        for i in 0..n {
            for t in 0..n {
                let a = l(i, t);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    next[i * n + j] += a * with_c[t * n + j];
                }
            }
        }
        m = next;
    }
    coeffs
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Builds the graph for an edge bitmask under the fixed enumeration order:
/// bit `b` is the `b`-th pair in the lexicographic sequence
/// `(0,1), (0,2), ..., (0,n-1), (1,2), ...`.
fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    Graph::new(n, edges).expect("mask enumeration yields valid graphs")
}

/// Searches, in a fixed enumeration order, for the first pair of graphs
/// with exactly equal Laplacian spectra that color refinement nevertheless
/// tells apart (which certifies non-isomorphism). Scans vertex counts
/// ascending; within one count, graphs are enumerated by edge bitmask and
/// the first qualifying (earlier, current) pair is returned.
pub fn find_cospectral_wl_distinguishable(max_n: usize) -> Result<(Graph, Graph)> {
    if max_n > 9 {
        return Err(Error::Capability(format!(
            "enumeration is limited to 9 vertices, got {max_n}"
        )));
    }
    for n in 2..=max_n {
        let pair_count = n * (n - 1) / 2;
        // spectral classes seen so far: fingerprint -> representatives,
        // each the first graph of one exact-spectrum, one-refinement class
        let mut seen: std::collections::BTreeMap<u64, Vec<(Vec<i128>, Graph)>> =
            std::collections::BTreeMap::new();
        for mask in 0..(1u64 << pair_count) {
            let g = graph_from_mask(n, mask);
            let poly = laplacian_charpoly(&g);
            let fingerprint =
                fnv1a(poly.iter().flat_map(|c| c.to_le_bytes()));
            let bucket = seen.entry(fingerprint).or_default();
            let mut matched = false;
            for (rep_poly, rep) in bucket.iter() {
                if *rep_poly == poly {
                    if distinguishable(rep, &g, &Constant)? && cospectral(rep, &g, 1e-8)? {
                        return Ok((rep.clone(), g));
                    }
                    matched = true;
                    break;
                }
            }
            if !matched {
                bucket.push((poly, g));
            }
        }
    }
    Err(Error::SearchExhausted(format!(
        "no cospectral, refinement-distinguishable pair within {max_n} vertices"
    )))
}

/// The frozen output of [`find_cospectral_wl_distinguishable`] at the
/// smallest vertex count where it succeeds (6 vertices, 7 edges): a
/// triangle and a 4-cycle sharing one vertex, against a complete bipartite
/// K(2,3) with one pendant vertex. Equal Laplacian spectra, different
/// degree sequences. Kept as a named fixture so the benchmark sources do
/// not depend on re-running the search.
pub fn cospectral_fixture() -> (Graph, Graph) {
    let a = Graph::new(6, [(0, 2), (0, 3), (0, 4), (0, 5), (1, 4), (1, 5), (2, 3)])
        .expect("fixture graph is valid");
    let b = Graph::new(6, [(0, 2), (0, 4), (0, 5), (1, 2), (1, 4), (1, 5), (2, 3)])
        .expect("fixture graph is valid");
    (a, b)
}

/// Test accuracy of a nearest-centroid classifier over per-instance vectors
/// produced by `represent`.
pub fn nearest_centroid_eval_with<F>(ds: &BenchmarkDataset, represent: F) -> Result<f64>
where
    F: Fn(&Graph) -> Result<Vec<f64>>,
{
    if ds.train.is_empty() || ds.test.is_empty() {
        return Err(Error::Dataset("train and test splits must be non-empty".into()));
    }
    let vectors: Vec<Vec<f64>> = ds
        .instances
        .iter()
        .map(|inst| represent(&inst.graph))
        .collect::<Result<_>>()?;
    let width = vectors[0].len();
    if vectors.iter().any(|v| v.len() != width) {
        return Err(Error::Dataset(
            "instance representations have unequal lengths".into(),
        ));
    }

    let mut centroids = [vec![0.0f64; width], vec![0.0f64; width]];
    let mut counts = [0usize; 2];
    for &i in &ds.train {
        let label = ds.instances[i].label as usize;
        counts[label] += 1;
        for (c, x) in centroids[label].iter_mut().zip(&vectors[i]) {
            *c += x;
        }
    }
    for (centroid, &count) in centroids.iter_mut().zip(&counts) {
        if count > 0 {
            for c in centroid.iter_mut() {
                *c /= count as f64;
            }
        }
    }

    let distance = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
    };
    let mut correct = 0usize;
    for &i in &ds.test {
        let mut best = 0u8;
        let mut best_dist = f64::INFINITY;
        for label in 0..2u8 {
            if counts[label as usize] == 0 {
                continue;
            }
            let d = distance(&vectors[i], &centroids[label as usize]);
            // ties keep the lower label
            if d < best_dist {
                best = label;
                best_dist = d;
            }
        }
        if best == ds.instances[i].label {
            correct += 1;
        }
    }
    Ok(correct as f64 / ds.test.len() as f64)
}

/// Nearest-centroid baseline over sorted, flattened spectral feature
/// vectors; the representation is invariant to vertex relabeling.
pub fn nearest_centroid_eval(ds: &BenchmarkDataset, cfg: &SpectralConfig) -> Result<f64> {
    nearest_centroid_eval_with(ds, |g| Ok(spectral_features(g, cfg)?.sorted_flattened()))
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    seed: u64,
    count: usize,
    sources: [String; 2],
    train: Vec<usize>,
    test: Vec<usize>,
}

/// Writes a dataset as a directory: `manifest.json`, `labels.csv`, and one
/// edge-list file per instance under `instances/`.
pub fn write_dataset_dir(ds: &BenchmarkDataset, dir: &Path) -> Result<()> {
    let instances_dir = dir.join("instances");
    fs::create_dir_all(&instances_dir)?;
    let manifest = Manifest {
        seed: ds.seed,
        count: ds.instances.len(),
        sources: [ds.sources.0.to_edge_list(), ds.sources.1.to_edge_list()],
        train: ds.train.clone(),
        test: ds.test.clone(),
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    let mut labels = String::from("instance,label\n");
    for (i, inst) in ds.instances.iter().enumerate() {
        writeln!(labels, "{i},{}", inst.label).unwrap();
        fs::write(
            instances_dir.join(format!("instance_{i:05}.txt")),
            inst.graph.to_edge_list(),
        )?;
    }
    fs::write(dir.join("labels.csv"), labels)?;
    Ok(())
}
