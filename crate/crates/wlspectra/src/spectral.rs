//! Combinatorial Laplacian, spectral decomposition, heat kernels, spectral
//! node features and pre-coloring, cospectrality, and a reduced-order
//! approximation of the heat diagonal.

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{jacobi_eigendecomposition, Eigendecomposition, Matrix};
use crate::wl::{quantize_feature, Coloring, Key, PreColoring};

/// The combinatorial Laplacian `L = D - A`: degree on the diagonal, `-1`
/// for every edge, rows summing to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianMatrix {
    matrix: Matrix,
}

impl LaplacianMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// The Dirichlet energy `x^T L x = sum over edges of (x(u) - x(v))^2`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut total = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.get(i, j) * x[j];
            }
            total += x[i] * row;
        }
        total
    }
}

/// Builds the Laplacian of a graph.
pub fn laplacian(g: &Graph) -> LaplacianMatrix {
    let n = g.vertex_count();
    let mut m = Matrix::zeros(n);
    for v in 0..n {
        m.set(v, v, g.degree(v) as f64);
    }
    for (u, v) in g.edges() {
        m.set(u, v, -1.0);
        m.set(v, u, -1.0);
    }
    LaplacianMatrix { matrix: m }
}

/// Full spectral decomposition of a Laplacian: eigenvalues ascending,
/// orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Matrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector_component(&self, vertex: usize, mode: usize) -> f64 {
        self.eigenvectors.get(vertex, mode)
    }

    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigenvectors
    }
}

/// Decomposes a Laplacian with the cyclic Jacobi solver. Output is
/// deterministic for identical input.
pub fn decompose(l: &LaplacianMatrix) -> Result<Spectrum> {
    let Eigendecomposition { eigenvalues, eigenvectors } =
        jacobi_eigendecomposition(l.as_matrix())?;
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Heat kernel at time `t`: `H_t(u, v) = sum_i e^(-lambda_i t) phi_i(u) phi_i(v)`,
/// the amount of heat moved from `u` to `v` by time `t`.
#[derive(Clone, Debug)]
pub struct HeatKernel {
    pub t: f64,
    matrix: Matrix,
}

impl HeatKernel {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.matrix.get(u, v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal()
    }

    pub fn row(&self, u: usize) -> &[f64] {
        self.matrix.row(u)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }
}

/// Evaluates the heat kernel from a spectrum. `t` must be non-negative.
pub fn heat_kernel(spectrum: &Spectrum, t: f64) -> HeatKernel {
    assert!(t >= 0.0, "heat kernel time must be non-negative");
    let n = spectrum.dim();
    let weights: Vec<f64> = spectrum.eigenvalues().iter().map(|&l| (-l * t).exp()).collect();
    let mut m = Matrix::zeros(n);
    for u in 0..n {
        for v in u..n {
            let mut sum = 0.0;
            for i in 0..n {
                sum += weights[i]
                    * spectrum.eigenvector_component(u, i)
                    * spectrum.eigenvector_component(v, i);
            }
            m.set(u, v, sum);
            m.set(v, u, sum);
        }
    }
    HeatKernel { t, matrix: m }
}

/// Diagonal of the heat kernel without forming the full matrix.
fn heat_diagonal(spectrum: &Spectrum, t: f64) -> Vec<f64> {
    let n = spectrum.dim();
    let weights: Vec<f64> = spectrum.eigenvalues().iter().map(|&l| (-l * t).exp()).collect();
    (0..n)
        .map(|u| {
            (0..n)
                .map(|i| weights[i] * spectrum.eigenvector_component(u, i).powi(2))
                .sum()
        })
        .collect()
}

/// Row quantiles used by the spectral features, in ascending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Quantile {
    Min,
    Median,
    Max,
}

impl Quantile {
    fn level(self) -> f64 {
        match self {
            Quantile::Min => 0.0,
            Quantile::Median => 0.5,
            Quantile::Max => 1.0,
        }
    }
}

/// Sampling plan for spectral features: `m` time points spaced evenly on
/// the base-10 logarithmic scale between `10^t_min_exp` and `10^t_max_exp`,
/// plus an optional set of row quantiles and an optional eigenpair
/// truncation for the reduced-order path.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralConfig {
    pub t_min_exp: f64,
    pub t_max_exp: f64,
    pub m: usize,
    pub quantiles: Vec<Quantile>,
    pub truncation: Option<usize>,
}

impl SpectralConfig {
    pub fn new(t_min_exp: f64, t_max_exp: f64, m: usize, quantiles: Vec<Quantile>) -> Result<Self> {
        let cfg = Self { t_min_exp, t_max_exp, m, quantiles, truncation: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_truncation(mut self, k: usize) -> Self {
        self.truncation = Some(k);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Config("sample count m must be at least 1".into()));
        }
        if !self.t_min_exp.is_finite() || !self.t_max_exp.is_finite() {
            return Err(Error::Config("time range exponents must be finite".into()));
        }
        if self.t_min_exp > self.t_max_exp {
            return Err(Error::Config(format!(
                "time range start 10^{} exceeds end 10^{}",
                self.t_min_exp, self.t_max_exp
            )));
        }
        let mut sorted = self.quantiles.clone();
        sorted.sort();
        sorted.dedup();
        if sorted != self.quantiles {
            return Err(Error::Config(
                "quantiles must be distinct and in ascending order".into(),
            ));
        }
        Ok(())
    }

    /// The sampled time points `10^(t_min + i * (t_max - t_min) / (m - 1))`.
    pub fn time_samples(&self) -> Vec<f64> {
        if self.m == 1 {
            return vec![10f64.powf(self.t_min_exp)];
        }
        let step = (self.t_max_exp - self.t_min_exp) / (self.m - 1) as f64;
        (0..self.m)
            .map(|i| 10f64.powf(self.t_min_exp + i as f64 * step))
            .collect()
    }

    /// Feature vector length: `m * (1 + r)`.
    pub fn feature_len(&self) -> usize {
        self.m * (1 + self.quantiles.len())
    }

    /// Parses the compact `(start_exp, end_exp, samples, quantiles)` form,
    /// e.g. `(-1,1,10,none)`, `(0,0,1,none)`, `(-2,2,5,max)`, `(-1,1,5,MMM)`.
    pub fn parse(text: &str) -> Result<Self> {
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::Config(format!("expected (a,b,m,q), got {text:?}")))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Config(format!(
                "expected 4 fields in {text:?}, got {}",
                parts.len()
            )));
        }
        let t_min_exp: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Config(format!("invalid start exponent {:?}", parts[0])))?;
        let t_max_exp: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Config(format!("invalid end exponent {:?}", parts[1])))?;
        let m: usize = parts[2]
            .parse()
            .map_err(|_| Error::Config(format!("invalid sample count {:?}", parts[2])))?;
        let quantiles = match parts[3] {
            "none" | "0" => Vec::new(),
            "max" => vec![Quantile::Max],
            "MMM" => vec![Quantile::Min, Quantile::Median, Quantile::Max],
            other => {
                return Err(Error::Config(format!(
                    "unknown quantile set {other:?} (expected none, max or MMM)"
                )))
            }
        };
        Self::new(t_min_exp, t_max_exp, m, quantiles)
    }
}

impl fmt::Display for SpectralConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = match self.quantiles.as_slice() {
            [] => "none",
            [Quantile::Max] => "max",
            [Quantile::Min, Quantile::Median, Quantile::Max] => "MMM",
            _ => "custom",
        };
        write!(f, "({},{},{},{})", self.t_min_exp, self.t_max_exp, self.m, q)
    }
}

/// Per-vertex real feature vectors: first the heat-kernel diagonal at each
/// time sample, then for each time sample the requested row quantiles
/// (diagonal excluded), in ascending quantile order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFeatures {
    vectors: Vec<Vec<f64>>,
}

impl SpectralFeatures {
    pub fn vertex_count(&self) -> usize {
        self.vectors.len()
    }

    pub fn feature_len(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn vector(&self, v: usize) -> &[f64] {
        &self.vectors[v]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// 9-decimal quantized keys, ready for color ranking.
    pub fn quantized_keys(&self) -> Vec<Key> {
        self.vectors
            .iter()
            .map(|row| row.iter().copied().map(quantize_feature).collect())
            .collect()
    }

    /// Feature vectors sorted lexicographically and flattened into one
    /// vector; invariant under vertex relabeling.
    pub fn sorted_flattened(&self) -> Vec<f64> {
        let mut rows: Vec<&Vec<f64>> = self.vectors.iter().collect();
        rows.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        rows.into_iter().flatten().copied().collect()
    }
}

/// Linear-interpolation quantile of the ascending-sorted row with the
/// diagonal removed: level `q` sits at fractional rank `q * (len - 1)`.
fn row_quantile(sorted: &[f64], level: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = level * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = rank - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Computes spectral features for every vertex of `g` under `cfg`.
pub fn spectral_features(g: &Graph, cfg: &SpectralConfig) -> Result<SpectralFeatures> {
    cfg.validate()?;
    let n = g.vertex_count();
    if !cfg.quantiles.is_empty() && n < 2 {
        return Err(Error::Config(
            "row quantiles need at least 2 vertices".into(),
        ));
    }
    let spectrum = decompose(&laplacian(g))?;
    let times = cfg.time_samples();
    let mut vectors = vec![Vec::with_capacity(cfg.feature_len()); n];

    if cfg.quantiles.is_empty() {
        for &t in &times {
            for (u, d) in heat_diagonal(&spectrum, t).into_iter().enumerate() {
                vectors[u].push(d);
            }
        }
        return Ok(SpectralFeatures { vectors });
    }

    let kernels: Vec<HeatKernel> = times.iter().map(|&t| heat_kernel(&spectrum, t)).collect();
    for kernel in &kernels {
        for (u, vector) in vectors.iter_mut().enumerate() {
            vector.push(kernel.get(u, u));
        }
    }
    for kernel in &kernels {
        for (u, vector) in vectors.iter_mut().enumerate() {
            let mut off_diagonal: Vec<f64> = kernel
                .row(u)
                .iter()
                .enumerate()
                .filter(|&(v, _)| v != u)
                .map(|(_, &x)| x)
                .collect();
            off_diagonal.sort_by(f64::total_cmp);
            for q in &cfg.quantiles {
                vector.push(row_quantile(&off_diagonal, q.level()));
            }
        }
    }
    Ok(SpectralFeatures { vectors })
}

/// Quantizes spectral features to a dense vertex coloring: vertices share a
/// color iff their 9-decimal-rounded feature vectors are equal.
pub fn spectral_precoloring(g: &Graph, cfg: &SpectralConfig) -> Result<Coloring> {
    Ok(Coloring::from_keys(&spectral_features(g, cfg)?.quantized_keys()))
}

/// Spectral features as a refinement pre-coloring; the pair of graphs is
/// quantized jointly so color ids line up.
#[derive(Clone, Debug)]
pub struct SpectralColoring {
    pub cfg: SpectralConfig,
}

impl SpectralColoring {
    pub fn new(cfg: SpectralConfig) -> Self {
        Self { cfg }
    }
}

impl PreColoring for SpectralColoring {
    fn keys_pair(&self, g1: &Graph, g2: &Graph) -> Result<(Vec<Key>, Vec<Key>)> {
        Ok((
            spectral_features(g1, &self.cfg)?.quantized_keys(),
            spectral_features(g2, &self.cfg)?.quantized_keys(),
        ))
    }
}

/// True iff the sorted Laplacian eigenvalue sequences agree entrywise
/// within `tol`.
pub fn cospectral(g1: &Graph, g2: &Graph, tol: f64) -> Result<bool> {
    if g1.vertex_count() != g2.vertex_count() {
        return Err(Error::InvalidGraph(format!(
            "cospectrality needs equal sizes, got {} and {}",
            g1.vertex_count(),
            g2.vertex_count()
        )));
    }
    let s1 = decompose(&laplacian(g1))?;
    let s2 = decompose(&laplacian(g2))?;
    Ok(s1
        .eigenvalues()
        .iter()
        .zip(s2.eigenvalues())
        .all(|(a, b)| (a - b).abs() <= tol))
}

/// Approximates the heat-kernel diagonal through the reduced-order model:
/// the heat equation is projected onto the `k` smallest eigenpairs
/// (`cfg.truncation`) and the diagonalized system is integrated with
/// `steps` implicit Euler steps per time sample. Starting from a unit
/// impulse at `u`, mode `i` evolves to `(1 + t*lambda_i/steps)^(-steps)`,
/// and the diagonal read-out sums `phi_i(u)^2` times that factor.
pub fn approximate_heat_diag(
    g: &Graph,
    cfg: &SpectralConfig,
    steps: usize,
) -> Result<SpectralFeatures> {
    cfg.validate()?;
    let n = g.vertex_count();
    let k = cfg.truncation.ok_or_else(|| {
        Error::Config("reduced-order approximation needs cfg.truncation".into())
    })?;
    if k == 0 || k > n {
        return Err(Error::Config(format!(
            "truncation must satisfy 1 <= k <= {n}, got {k}"
        )));
    }
    if steps == 0 || steps > i32::MAX as usize {
        return Err(Error::Config(format!(
            "steps must be between 1 and {}, got {steps}",
            i32::MAX
        )));
    }
    let spectrum = decompose(&laplacian(g))?;
    let mut vectors = vec![Vec::with_capacity(cfg.m); n];
    for t in cfg.time_samples() {
        let h = t / steps as f64;
        // implicit Euler on w' = -lambda w: w(t) = w(0) / (1 + h lambda)^steps
        let factors: Vec<f64> = spectrum.eigenvalues()[..k]
            .iter()
            .map(|&l| (1.0 + h * l).powi(-(steps as i32)))
            .collect();
        for (u, vector) in vectors.iter_mut().enumerate() {
            let value: f64 = (0..k)
                .map(|i| factors[i] * spectrum.eigenvector_component(u, i).powi(2))
                .sum();
            vector.push(value);
        }
    }
    Ok(SpectralFeatures { vectors })
}

/// CSV export: header then one `graph_id,vertex_id,f_1..f_d` row per vertex.
pub fn features_to_csv(per_graph: &[SpectralFeatures]) -> String {
    let width = per_graph.first().map_or(0, SpectralFeatures::feature_len);
    let mut out = String::from("graph_id,vertex_id");
    for i in 1..=width {
        write!(out, ",f_{i}").unwrap();
    }
    out.push('\n');
    for (graph_id, features) in per_graph.iter().enumerate() {
        for v in 0..features.vertex_count() {
            write!(out, "{graph_id},{v}").unwrap();
            for x in features.vector(v) {
                write!(out, ",{x}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// JSON export mirroring the CSV content.
pub fn features_to_json(per_graph: &[SpectralFeatures]) -> serde_json::Value {
    serde_json::json!({
        "graphs": per_graph
            .iter()
            .enumerate()
            .map(|(graph_id, features)| {
                serde_json::json!({
                    "graph_id": graph_id,
                    "features": features.vectors(),
                })
            })
            .collect::<Vec<_>>(),
    })
}

/// JSON export of a spectrum; eigenvectors are included only on request.
pub fn spectrum_to_json(spectrum: &Spectrum, include_eigenvectors: bool) -> serde_json::Value {
    let mut value = serde_json::json!({
        "n": spectrum.dim(),
        "eigenvalues": spectrum.eigenvalues(),
    });
    if include_eigenvectors {
        let columns: Vec<Vec<f64>> = (0..spectrum.dim())
            .map(|i| (0..spectrum.dim()).map(|u| spectrum.eigenvector_component(u, i)).collect())
            .collect();
        value["eigenvectors"] = serde_json::json!(columns);
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        permute, random_graph, reference_graph, ReferenceGraph, VertexPermutation,
    };
    use crate::wl::{distinguishable, refines, Constant};
    use rand::{RngExt as _, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn laplacian_of_single_edge() {
        let l = laplacian(&Graph::complete(2));
        assert_eq!(l.get(0, 0), 1.0);
        assert_eq!(l.get(0, 1), -1.0);
        assert_eq!(l.get(1, 0), -1.0);
        assert_eq!(l.get(1, 1), 1.0);
    }

    #[test]
    fn laplacian_of_edgeless_graph_is_zero() {
        let l = laplacian(&Graph::edgeless(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn dirichlet_energy_matches_edge_sum() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..100 {
            let g = random_graph(rng.random_range(2..=9), 0.5, &mut rng);
            let l = laplacian(&g);
            let x: Vec<f64> = (0..g.vertex_count())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let direct: f64 = g.edges().map(|(u, v)| (x[u] - x[v]).powi(2)).sum();
            assert_close(l.quadratic_form(&x), direct, 1e-9);
        }
    }

    #[test]
    fn k2_spectrum() {
        let s = decompose(&laplacian(&Graph::complete(2))).unwrap();
        assert_close(s.eigenvalues()[0], 0.0, 1e-10);
        assert_close(s.eigenvalues()[1], 2.0, 1e-10);
    }

    #[test]
    fn zero_multiplicity_counts_components() {
        let two_triangles = Graph::cycle(3).disjoint_union(&Graph::cycle(3));
        let s = decompose(&laplacian(&two_triangles)).unwrap();
        let zeros = s.eigenvalues().iter().filter(|l| l.abs() < 1e-8).count();
        assert_eq!(zeros, 2);
    }

    #[test]
    fn c4_spectrum_closed_form() {
        // 2 - 2cos(2*pi*j/4) for j = 0..3 gives {0, 2, 2, 4}
        let s = decompose(&laplacian(&Graph::cycle(4))).unwrap();
        let expected = [0.0, 2.0, 2.0, 4.0];
        for (have, want) in s.eigenvalues().iter().zip(expected) {
            assert_close(*have, want, 1e-9);
        }
    }

    #[test]
    fn heat_kernel_at_zero_is_identity() {
        let g = reference_graph(ReferenceGraph::Decalin);
        let h = heat_kernel(&decompose(&laplacian(&g)).unwrap(), 0.0);
        for u in 0..10 {
            for v in 0..10 {
                assert_close(h.get(u, v), if u == v { 1.0 } else { 0.0 }, 1e-10);
            }
        }
    }

    #[test]
    fn heat_kernel_long_time_limit_is_uniform() {
        let g = Graph::cycle(5);
        let h = heat_kernel(&decompose(&laplacian(&g)).unwrap(), 1e6);
        for u in 0..5 {
            for v in 0..5 {
                assert_close(h.get(u, v), 0.2, 1e-6);
            }
        }
    }

    #[test]
    fn heat_kernel_rows_sum_to_one() {
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        for _ in 0..30 {
            let g = random_graph(rng.random_range(2..=8), 0.5, &mut rng);
            let h = heat_kernel(&decompose(&laplacian(&g)).unwrap(), 0.7);
            for u in 0..g.vertex_count() {
                let sum: f64 = h.row(u).iter().sum();
                assert_close(sum, 1.0, 1e-8);
            }
            let trace_expected: f64 = decompose(&laplacian(&g))
                .unwrap()
                .eigenvalues()
                .iter()
                .map(|&l| (-l * 0.7f64).exp())
                .sum();
            assert_close(h.trace(), trace_expected, 1e-8);
        }
    }

    #[test]
    fn decalin_heat_diagonal_matches_published_values() {
        let g = reference_graph(ReferenceGraph::Decalin);
        let h = heat_kernel(&decompose(&laplacian(&g)).unwrap(), 1.0);
        let mut rounded: Vec<f64> = h
            .diagonal()
            .iter()
            .map(|x| (x * 1e4).round() / 1e4)
            .collect();
        rounded.sort_by(f64::total_cmp);
        let expected = [
            0.1914, 0.1914, 0.2891, 0.2891, 0.2891, 0.2891, 0.3078, 0.3078, 0.3078, 0.3078,
        ];
        assert_eq!(rounded, expected);
    }

    #[test]
    fn bicyclopentyl_heat_diagonal_matches_published_values() {
        let g = reference_graph(ReferenceGraph::Bicyclopentyl);
        let h = heat_kernel(&decompose(&laplacian(&g)).unwrap(), 1.0);
        let mut rounded: Vec<f64> = h
            .diagonal()
            .iter()
            .map(|x| (x * 1e4).round() / 1e4)
            .collect();
        rounded.sort_by(f64::total_cmp);
        let expected = [
            0.1929, 0.1929, 0.291, 0.291, 0.291, 0.291, 0.3098, 0.3098, 0.3098, 0.3098,
        ];
        assert_eq!(rounded, expected);
    }

    #[test]
    fn config_time_samples_are_log_spaced() {
        let cfg = SpectralConfig::new(-1.0, 1.0, 5, vec![]).unwrap();
        let times = cfg.time_samples();
        let expected = [0.1, 10f64.powf(-0.5), 1.0, 10f64.powf(0.5), 10.0];
        for (have, want) in times.iter().zip(expected) {
            assert_close(*have, want, 1e-12);
        }
        let single = SpectralConfig::new(0.0, 0.0, 1, vec![]).unwrap();
        assert_eq!(single.time_samples(), vec![1.0]);
    }

    #[test]
    fn config_grammar_round_trips() {
        for text in ["(-1,1,10,none)", "(-2,2,5,max)", "(0,0,1,none)", "(-1,1,5,MMM)"] {
            let cfg = SpectralConfig::parse(text).unwrap();
            assert_eq!(cfg.to_string(), text.to_string());
        }
        assert!(SpectralConfig::parse("(1,-1,5,none)").is_err());
        assert!(SpectralConfig::parse("(0,1,0,none)").is_err());
        assert!(SpectralConfig::parse("(0,1,5,weird)").is_err());
        assert!(SpectralConfig::parse("0,1,5,none").is_err());
        assert!(SpectralConfig::parse("(nan,1,5,none)").is_err());
    }

    #[test]
    fn vertex_transitive_graph_has_uniform_features() {
        let cfg = SpectralConfig::new(-1.0, 1.0, 3, vec![Quantile::Min, Quantile::Median, Quantile::Max])
            .unwrap();
        let features = spectral_features(&Graph::cycle(6), &cfg).unwrap();
        let first = features.vector(0).to_vec();
        for v in 1..6 {
            for (a, b) in features.vector(v).iter().zip(&first) {
                assert_close(*a, *b, 1e-9);
            }
        }
    }

    #[test]
    fn feature_layout_is_diagonals_then_quantiles() {
        let g = Graph::path(4);
        let cfg = SpectralConfig::new(-1.0, 0.0, 2, vec![Quantile::Max]).unwrap();
        let features = spectral_features(&g, &cfg).unwrap();
        assert_eq!(features.feature_len(), 4); // 2 diagonals + 2 max quantiles
        let spectrum = decompose(&laplacian(&g)).unwrap();
        let times = cfg.time_samples();
        for (u, vector) in features.vectors().iter().enumerate() {
            for (i, &t) in times.iter().enumerate() {
                let h = heat_kernel(&spectrum, t);
                assert_close(vector[i], h.get(u, u), 1e-12);
                let row_max = h
                    .row(u)
                    .iter()
                    .enumerate()
                    .filter(|&(v, _)| v != u)
                    .map(|(_, &x)| x)
                    .fold(f64::NEG_INFINITY, f64::max);
                assert_close(vector[2 + i], row_max, 1e-12);
            }
        }
    }

    #[test]
    fn molecules_get_disjoint_spectral_palettes() {
        let g1 = reference_graph(ReferenceGraph::Decalin);
        let g2 = reference_graph(ReferenceGraph::Bicyclopentyl);
        let cfg = SpectralConfig::new(0.0, 0.0, 1, vec![]).unwrap();
        let pre = SpectralColoring::new(cfg.clone());
        let (k1, k2) = pre.keys_pair(&g1, &g2).unwrap();
        let mut all = k1.clone();
        all.extend(k2.clone());
        let joint = Coloring::from_keys(&all);
        assert_eq!(joint.palette_size(), 6);
        let h1 = crate::wl::ColorHistogram::from_colors(
            joint.colors()[..10].iter().copied(),
        );
        let h2 = crate::wl::ColorHistogram::from_colors(
            joint.colors()[10..].iter().copied(),
        );
        assert_eq!(h1.class_sizes(), vec![2, 4, 4]);
        assert_eq!(h2.class_sizes(), vec![2, 4, 4]);
        assert!(h1.counts().keys().all(|c| !h2.counts().contains_key(c)));

        // the blind pair becomes distinguishable under the spectral coloring
        assert!(!distinguishable(&g1, &g2, &Constant).unwrap());
        assert!(distinguishable(&g1, &g2, &pre).unwrap());
    }

    #[test]
    fn spectral_coloring_refines_constant() {
        let g = reference_graph(ReferenceGraph::Decalin);
        let cfg = SpectralConfig::new(0.0, 0.0, 1, vec![]).unwrap();
        let coloring = spectral_precoloring(&g, &cfg).unwrap();
        assert!(refines(&coloring, &Coloring::constant(10)).unwrap());
    }

    #[test]
    fn semigroup_property_holds() {
        let mut rng = ChaCha12Rng::seed_from_u64(44);
        for _ in 0..10 {
            let g = random_graph(6, 0.5, &mut rng);
            let s = decompose(&laplacian(&g)).unwrap();
            let h1 = heat_kernel(&s, 0.3);
            let h2 = heat_kernel(&s, 0.9);
            let combined = heat_kernel(&s, 1.2);
            let product = h1.as_matrix().matmul(h2.as_matrix());
            for u in 0..6 {
                for v in 0..6 {
                    assert_close(product.get(u, v), combined.get(u, v), 1e-7);
                }
            }
        }
    }

    #[test]
    fn heat_kernel_is_permutation_equivariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        for _ in 0..20 {
            let g = random_graph(7, 0.4, &mut rng);
            let sigma = VertexPermutation::random(7, &mut rng);
            let gp = permute(&g, &sigma).unwrap();
            let h = heat_kernel(&decompose(&laplacian(&g)).unwrap(), 0.8);
            let hp = heat_kernel(&decompose(&laplacian(&gp)).unwrap(), 0.8);
            for u in 0..7 {
                for v in 0..7 {
                    assert_close(h.get(u, v), hp.get(sigma.apply(u), sigma.apply(v)), 1e-8);
                }
            }
        }
    }

    #[test]
    fn heat_kernel_matches_taylor_series_oracle() {
        // independent route: scaled Taylor series for exp(-tL) with squaring
        let mut rng = ChaCha12Rng::seed_from_u64(66);
        for _ in 0..10 {
            let g = random_graph(6, 0.5, &mut rng);
            let l = laplacian(&g);
            let t = 0.6;
            let spectral_route = heat_kernel(&decompose(&l).unwrap(), t);
            let series_route = expm_taylor(l.as_matrix(), t);
            for u in 0..6 {
                for v in 0..6 {
                    assert_close(spectral_route.get(u, v), series_route.get(u, v), 1e-9);
                }
            }
        }
    }

    fn expm_taylor(l: &Matrix, t: f64) -> Matrix {
        // exp(-tL) = (exp(-tL/2^s))^(2^s), series summed to machine precision
        let n = l.dim();
        let squarings = 10u32;
        let scale = -t / f64::from(1 << squarings);
        let mut scaled = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                scaled.set(i, j, l.get(i, j) * scale);
            }
        }
        let mut result = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for order in 1..=30 {
            // term = scaled^order / order!
            term = term.matmul(&scaled);
            for i in 0..n {
                for j in 0..n {
                    term.set(i, j, term.get(i, j) / order as f64);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    result.set(i, j, result.get(i, j) + term.get(i, j));
                }
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result);
        }
        result
    }

    #[test]
    fn spectrum_meets_its_invariants() {
        let mut rng = ChaCha12Rng::seed_from_u64(88);
        for _ in 0..30 {
            let n = rng.random_range(1..=9);
            let g = random_graph(n, 0.5, &mut rng);
            let l = laplacian(&g);
            let s = decompose(&l).unwrap();
            assert!(s.eigenvalues()[0].abs() <= 1e-8);
            assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            for (i, &value) in s.eigenvalues().iter().enumerate() {
                assert!(value >= -1e-8);
                // eigen equation residual
                for u in 0..n {
                    let lv: f64 = (0..n).map(|w| l.get(u, w) * s.eigenvector_component(w, i)).sum();
                    assert!((lv - value * s.eigenvector_component(u, i)).abs() <= 1e-8);
                }
                // orthonormal columns
                for j in 0..n {
                    let dot: f64 = (0..n)
                        .map(|u| s.eigenvector_component(u, i) * s.eigenvector_component(u, j))
                        .sum();
                    let expected = f64::from(u8::from(i == j));
                    assert!((dot - expected).abs() <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn decomposition_scales_to_midsize_graphs() {
        let mut rng = ChaCha12Rng::seed_from_u64(101);
        let g = random_graph(100, 0.1, &mut rng);
        let l = laplacian(&g);
        let s = decompose(&l).unwrap();
        assert!(s.eigenvalues()[0].abs() <= 1e-8);
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        // spot-check the eigen equation on a few modes
        for &i in &[0usize, 17, 50, 99] {
            let value = s.eigenvalues()[i];
            for u in (0..100).step_by(13) {
                let lv: f64 = (0..100).map(|w| l.get(u, w) * s.eigenvector_component(w, i)).sum();
                assert!((lv - value * s.eigenvector_component(u, i)).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn heat_kernel_is_symmetric_and_nonnegative() {
        let mut rng = ChaCha12Rng::seed_from_u64(91);
        for _ in 0..30 {
            let g = random_graph(rng.random_range(2..=8), 0.5, &mut rng);
            let n = g.vertex_count();
            let h = heat_kernel(&decompose(&laplacian(&g)).unwrap(), rng.random_range(0.01..5.0));
            for u in 0..n {
                for v in 0..n {
                    assert_eq!(h.get(u, v), h.get(v, u));
                    assert!(h.get(u, v) >= -1e-10, "H({u},{v}) = {}", h.get(u, v));
                }
            }
        }
    }

    #[test]
    fn max_quantile_coloring_refines_diagonal_only_coloring() {
        let diag_cfg = SpectralConfig::parse("(-1,1,5,none)").unwrap();
        let max_cfg = SpectralConfig::parse("(-1,1,5,max)").unwrap();
        let mut corpus = vec![
            reference_graph(ReferenceGraph::Decalin),
            reference_graph(ReferenceGraph::Bicyclopentyl),
            crate::bench::cospectral_fixture().0,
            crate::bench::cospectral_fixture().1,
        ];
        let mut rng = ChaCha12Rng::seed_from_u64(93);
        for _ in 0..20 {
            corpus.push(random_graph(rng.random_range(2..=9), 0.5, &mut rng));
        }
        for g in &corpus {
            let diag_only = spectral_precoloring(g, &diag_cfg).unwrap();
            let with_max = spectral_precoloring(g, &max_cfg).unwrap();
            assert!(refines(&with_max, &diag_only).unwrap());
        }
        // on the cospectral pair the refinement is strict
        for g in &corpus[2..4] {
            let diag_only = spectral_precoloring(g, &diag_cfg).unwrap();
            let with_max = spectral_precoloring(g, &max_cfg).unwrap();
            assert!(with_max.palette_size() > diag_only.palette_size());
        }
    }

    #[test]
    fn cospectral_is_permutation_invariant_and_separates_molecules() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let g = random_graph(7, 0.5, &mut rng);
        let sigma = VertexPermutation::random(7, &mut rng);
        assert!(cospectral(&g, &permute(&g, &sigma).unwrap(), 1e-8).unwrap());

        let g1 = reference_graph(ReferenceGraph::Decalin);
        let g2 = reference_graph(ReferenceGraph::Bicyclopentyl);
        assert!(!cospectral(&g1, &g2, 1e-8).unwrap());
        assert!(cospectral(&g1, &Graph::cycle(4), 1e-8).is_err());
    }

    #[test]
    fn reduced_order_diag_converges_to_exact() {
        let g = reference_graph(ReferenceGraph::Decalin);
        let spectrum = decompose(&laplacian(&g)).unwrap();
        let cfg = SpectralConfig::new(0.0, 0.0, 1, vec![]).unwrap().with_truncation(10);
        let exact = heat_diagonal(&spectrum, 1.0);
        let mut last_err = f64::INFINITY;
        for steps in [50, 100, 200, 400] {
            let approx = approximate_heat_diag(&g, &cfg, steps).unwrap();
            let err = exact
                .iter()
                .enumerate()
                .map(|(u, &x)| (approx.vector(u)[0] - x).abs())
                .fold(0.0f64, f64::max);
            assert!(err < last_err);
            let ratio = err / last_err;
            if last_err.is_finite() {
                assert!(ratio > 0.3 && ratio < 0.7, "halving ratio {ratio}");
            }
            last_err = err;
        }
    }

    #[test]
    fn reduced_order_single_mode_long_time() {
        let g = Graph::cycle(5);
        let cfg = SpectralConfig::new(3.0, 3.0, 1, vec![]).unwrap().with_truncation(1);
        let approx = approximate_heat_diag(&g, &cfg, 10_000).unwrap();
        for u in 0..5 {
            assert_close(approx.vector(u)[0], 0.2, 1e-3);
        }
    }

    #[test]
    fn reduced_order_guards() {
        let g = Graph::path(3);
        let no_trunc = SpectralConfig::new(0.0, 0.0, 1, vec![]).unwrap();
        assert!(approximate_heat_diag(&g, &no_trunc, 10).is_err());
        let too_big = no_trunc.clone().with_truncation(4);
        assert!(approximate_heat_diag(&g, &too_big, 10).is_err());
        let ok = no_trunc.with_truncation(3);
        assert!(approximate_heat_diag(&g, &ok, 0).is_err());
    }

    #[test]
    fn csv_export_shape() {
        let cfg = SpectralConfig::new(0.0, 0.0, 1, vec![]).unwrap();
        let features = spectral_features(&Graph::complete(2), &cfg).unwrap();
        let csv = features_to_csv(&[features]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "graph_id,vertex_id,f_1");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,0,"));
    }
}
