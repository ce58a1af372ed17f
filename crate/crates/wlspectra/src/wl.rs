//! Color refinement (1-WL) with arbitrary pre-colorings.
//!
//! Two graphs are compared by refining their disjoint union, so color ids
//! land in one shared palette and histogram equality is exact by
//! construction. New color ids are assigned canonically each round by
//! sorting refinement signatures, never by hashing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A dense vertex coloring: `colors[v]` is the color id of vertex `v`, and
/// every id in `0..palette_size` occurs at least once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<u32>,
    palette_size: u32,
}

impl Coloring {
    /// Assigns dense color ids by ranking keys: vertices share a color iff
    /// their keys are equal, and ids follow the sorted key order.
    pub fn from_keys<K: Ord + Clone>(keys: &[K]) -> Self {
        let mut sorted: Vec<K> = keys.to_vec();
        sorted.sort();
        sorted.dedup();
        let colors = keys
            .iter()
            .map(|k| sorted.binary_search(k).expect("key present") as u32)
            .collect();
        Self { colors, palette_size: sorted.len() as u32 }
    }

    /// The all-equal coloring on `n` vertices.
    pub fn constant(n: usize) -> Self {
        Self { colors: vec![0; n], palette_size: if n == 0 { 0 } else { 1 } }
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn palette_size(&self) -> usize {
        self.palette_size as usize
    }

    pub fn histogram(&self) -> ColorHistogram {
        ColorHistogram::from_colors(self.colors.iter().copied())
    }

    /// True when the two colorings induce the same partition of the vertex
    /// set, regardless of how the classes are numbered.
    pub fn same_partition(&self, other: &Coloring) -> bool {
        if self.colors.len() != other.colors.len() {
            return false;
        }
        let mut forward: BTreeMap<u32, u32> = BTreeMap::new();
        let mut backward: BTreeMap<u32, u32> = BTreeMap::new();
        for (&a, &b) in self.colors.iter().zip(&other.colors) {
            if *forward.entry(a).or_insert(b) != b || *backward.entry(b).or_insert(a) != a {
                return false;
            }
        }
        true
    }
}

/// A multiset of colors: color id → occurrence count. Serializes as a bare
/// JSON map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorHistogram {
    counts: BTreeMap<u32, usize>,
}

impl ColorHistogram {
    pub fn from_colors(colors: impl IntoIterator<Item = u32>) -> Self {
        let mut counts = BTreeMap::new();
        for c in colors {
            *counts.entry(c).or_insert(0) += 1;
        }
        Self { counts }
    }

    pub fn counts(&self) -> &BTreeMap<u32, usize> {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Class sizes as a sorted multiset, e.g. `[2, 4, 4]`.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.counts.values().copied().collect();
        sizes.sort_unstable();
        sizes
    }
}

/// Per-vertex key used to seed a refinement. Keys are comparable across
/// graphs, which is what makes joint pre-colorings line up.
pub type Key = Vec<i64>;

/// Rounds a real-valued feature to 9 decimal digits for use in a color key,
/// so eigensolver noise below 1e-9 cannot split classes.
pub fn quantize_feature(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

/// An initial coloring supplied to refinement in place of the constant
/// coloring. Implementations must be permutation equivariant: relabeling a
/// graph relabels its color classes the same way.
pub trait PreColoring {
    /// Keys for both graphs under one shared quantization. Equal keys across
    /// the two graphs mean "same initial color".
    fn keys_pair(&self, g1: &Graph, g2: &Graph) -> Result<(Vec<Key>, Vec<Key>)>;

    /// Single-graph coloring with dense ids.
    fn coloring(&self, g: &Graph) -> Result<Coloring> {
        let (keys, _) = self.keys_pair(g, g)?;
        Ok(Coloring::from_keys(&keys))
    }
}

impl<P: PreColoring + ?Sized> PreColoring for &P {
    fn keys_pair(&self, g1: &Graph, g2: &Graph) -> Result<(Vec<Key>, Vec<Key>)> {
        (**self).keys_pair(g1, g2)
    }
}

/// The uniform pre-coloring: every vertex gets the same color.
#[derive(Clone, Copy, Debug, Default)]
pub struct Constant;

impl PreColoring for Constant {
    fn keys_pair(&self, g1: &Graph, g2: &Graph) -> Result<(Vec<Key>, Vec<Key>)> {
        Ok((
            vec![Vec::new(); g1.vertex_count()],
            vec![Vec::new(); g2.vertex_count()],
        ))
    }
}

/// Pre-coloring by vertex degree.
#[derive(Clone, Copy, Debug, Default)]
pub struct DegreeColoring;

impl PreColoring for DegreeColoring {
    fn keys_pair(&self, g1: &Graph, g2: &Graph) -> Result<(Vec<Key>, Vec<Key>)> {
        let keys = |g: &Graph| {
            (0..g.vertex_count())
                .map(|v| vec![g.degree(v) as i64])
                .collect()
        };
        Ok((keys(g1), keys(g2)))
    }
}

/// Pre-coloring from user-supplied real-valued feature channels, quantized
/// to 9 decimal digits. The channel function must be permutation
/// equivariant for the resulting coloring to be one.
#[derive(Clone, Debug)]
pub struct FeatureChannels<F>
where
    F: Fn(&Graph) -> Result<Vec<Vec<f64>>>,
{
    channels: F,
}

impl<F> FeatureChannels<F>
where
    F: Fn(&Graph) -> Result<Vec<Vec<f64>>>,
{
    pub fn new(channels: F) -> Self {
        Self { channels }
    }
}

impl<F> PreColoring for FeatureChannels<F>
where
    F: Fn(&Graph) -> Result<Vec<Vec<f64>>>,
{
    fn keys_pair(&self, g1: &Graph, g2: &Graph) -> Result<(Vec<Key>, Vec<Key>)> {
        let quantized = |g: &Graph| -> Result<Vec<Key>> {
            let rows = (self.channels)(g)?;
            if rows.len() != g.vertex_count() {
                return Err(Error::Config(format!(
                    "feature channels returned {} rows for {} vertices",
                    rows.len(),
                    g.vertex_count()
                )));
            }
            Ok(rows
                .into_iter()
                .map(|row| row.into_iter().map(quantize_feature).collect())
                .collect())
        };
        Ok((quantized(g1)?, quantized(g2)?))
    }
}

/// Product of two pre-colorings: the paired coloring refines both factors.
#[derive(Clone, Copy, Debug)]
pub struct ProductColoring<A, B>(pub A, pub B);

impl<A: PreColoring, B: PreColoring> PreColoring for ProductColoring<A, B> {
    fn keys_pair(&self, g1: &Graph, g2: &Graph) -> Result<(Vec<Key>, Vec<Key>)> {
        let (a1, a2) = self.0.keys_pair(g1, g2)?;
        let (b1, b2) = self.1.keys_pair(g1, g2)?;
        let concat = |xs: Vec<Key>, ys: Vec<Key>| {
            xs.into_iter()
                .zip(ys)
                .map(|(mut x, y)| {
                    x.push(i64::MIN); // separator so factor boundaries cannot alias
                    x.extend(y);
                    x
                })
                .collect()
        };
        Ok((concat(a1, b1), concat(a2, b2)))
    }
}

/// One refinement round: two vertices share a new color iff they had equal
/// old colors and equal multisets of neighbor colors. New ids are dense and
/// follow the sorted signature order.
pub fn refine_step(g: &Graph, c: &Coloring) -> Result<Coloring> {
    if c.len() != g.vertex_count() {
        return Err(Error::InvalidGraph(format!(
            "coloring covers {} vertices but graph has {}",
            c.len(),
            g.vertex_count()
        )));
    }
    let signatures: Vec<(u32, Vec<u32>)> = (0..g.vertex_count())
        .map(|v| {
            let mut neighbor_colors: Vec<u32> =
                g.neighbors(v).iter().map(|&u| c.color(u)).collect();
            neighbor_colors.sort_unstable();
            (c.color(v), neighbor_colors)
        })
        .collect();
    Ok(Coloring::from_keys(&signatures))
}

/// Runs refinement from an explicit initial coloring until the partition
/// stops changing. Returns the stable coloring and the number of rounds
/// that strictly refined the partition.
pub fn refine_fixed_point(g: &Graph, init: Coloring) -> Result<(Coloring, usize)> {
    let mut current = init;
    let mut iterations = 0;
    loop {
        let next = refine_step(g, &current)?;
        // each round refines the previous partition, so an unchanged class
        // count means an unchanged partition
        if next.palette_size() == current.palette_size() {
            return Ok((next, iterations));
        }
        current = next;
        iterations += 1;
    }
}

/// Refines a single graph from a pre-coloring to its fixed point.
pub fn refine_to_convergence(g: &Graph, pre: &impl PreColoring) -> Result<(Coloring, usize)> {
    refine_fixed_point(g, pre.coloring(g)?)
}

/// Outcome of refining two graphs over a shared palette.
#[derive(Clone, Debug)]
pub struct JointRefinement {
    pub histogram1: ColorHistogram,
    pub histogram2: ColorHistogram,
    /// Stable coloring of the disjoint union; the first graph's vertices
    /// come first.
    pub union_coloring: Coloring,
    pub iterations: usize,
}

impl JointRefinement {
    pub fn distinguishable(&self) -> bool {
        self.histogram1 != self.histogram2
    }
}

/// Refines the disjoint union of the two graphs so their final color ids
/// are directly comparable, and splits the stable coloring into per-graph
/// histograms.
pub fn joint_refine_full(
    g1: &Graph,
    g2: &Graph,
    pre: &impl PreColoring,
) -> Result<JointRefinement> {
    let (k1, k2) = pre.keys_pair(g1, g2)?;
    if k1.len() != g1.vertex_count() || k2.len() != g2.vertex_count() {
        return Err(Error::Config(
            "pre-coloring returned the wrong number of keys".into(),
        ));
    }
    let mut keys = k1;
    keys.extend(k2);
    let union = g1.disjoint_union(g2);
    let (stable, iterations) = refine_fixed_point(&union, Coloring::from_keys(&keys))?;
    let split = g1.vertex_count();
    let histogram1 = ColorHistogram::from_colors(stable.colors()[..split].iter().copied());
    let histogram2 = ColorHistogram::from_colors(stable.colors()[split..].iter().copied());
    Ok(JointRefinement { histogram1, histogram2, union_coloring: stable, iterations })
}

/// Final per-graph histograms over the shared palette.
pub fn joint_refine(
    g1: &Graph,
    g2: &Graph,
    pre: &impl PreColoring,
) -> Result<(ColorHistogram, ColorHistogram)> {
    let joint = joint_refine_full(g1, g2, pre)?;
    Ok((joint.histogram1, joint.histogram2))
}

/// The refinement verdict: differing final histograms certify that the
/// graphs are not isomorphic.
pub fn distinguishable(g1: &Graph, g2: &Graph, pre: &impl PreColoring) -> Result<bool> {
    Ok(joint_refine_full(g1, g2, pre)?.distinguishable())
}

/// True iff equal fine colors imply equal coarse colors for every vertex
/// pair, i.e. `fine` refines `coarse`. Both colorings must cover the same
/// vertex set.
pub fn refines(fine: &Coloring, coarse: &Coloring) -> Result<bool> {
    if fine.len() != coarse.len() {
        return Err(Error::InvalidGraph(format!(
            "colorings cover {} and {} vertices",
            fine.len(),
            coarse.len()
        )));
    }
    let mut seen: BTreeMap<u32, u32> = BTreeMap::new();
    for (&f, &c) in fine.colors().iter().zip(coarse.colors()) {
        if *seen.entry(f).or_insert(c) != c {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        permute, random_graph, reference_graph, ReferenceGraph, VertexPermutation,
    };
    use proptest::prelude::*;
    use rand::{RngExt as _, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn refine_step_splits_path_endpoints() {
        let g = Graph::path(3);
        let c = refine_step(&g, &Coloring::constant(3)).unwrap();
        assert_eq!(c.palette_size(), 2);
        assert_eq!(c.color(0), c.color(2));
        assert_ne!(c.color(0), c.color(1));
    }

    #[test]
    fn refine_step_fixes_vertex_transitive_graphs() {
        let g = Graph::cycle(3);
        let c = refine_step(&g, &Coloring::constant(3)).unwrap();
        assert_eq!(c.palette_size(), 1);
    }

    #[test]
    fn refine_step_on_decalin_splits_by_degree() {
        let g = reference_graph(ReferenceGraph::Decalin);
        let c = refine_step(&g, &Coloring::constant(10)).unwrap();
        assert_eq!(c.histogram().class_sizes(), vec![2, 8]);
    }

    #[test]
    fn decalin_converges_to_three_classes() {
        let g = reference_graph(ReferenceGraph::Decalin);
        let (c, iters) = refine_to_convergence(&g, &Constant).unwrap();
        assert_eq!(c.palette_size(), 3);
        assert_eq!(c.histogram().class_sizes(), vec![2, 4, 4]);
        assert!(iters < 10);
    }

    #[test]
    fn bicyclopentyl_matches_decalin_class_sizes() {
        let g = reference_graph(ReferenceGraph::Bicyclopentyl);
        let (c, _) = refine_to_convergence(&g, &Constant).unwrap();
        assert_eq!(c.histogram().class_sizes(), vec![2, 4, 4]);
    }

    #[test]
    fn fixed_point_is_stable_under_further_refinement() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_graph(8, 0.4, &mut rng);
            let (stable, _) = refine_to_convergence(&g, &Constant).unwrap();
            let again = refine_step(&g, &stable).unwrap();
            assert!(stable.same_partition(&again));
            let (_, extra) = refine_fixed_point(&g, stable).unwrap();
            assert_eq!(extra, 0);
        }
    }

    #[test]
    fn molecules_are_wl_blind_under_constant_and_degree() {
        let g1 = reference_graph(ReferenceGraph::Decalin);
        let g2 = reference_graph(ReferenceGraph::Bicyclopentyl);
        assert!(!distinguishable(&g1, &g2, &Constant).unwrap());
        assert!(!distinguishable(&g1, &g2, &DegreeColoring).unwrap());
        let (h1, h2) = joint_refine(&g1, &g2, &Constant).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(h1.class_sizes(), vec![2, 4, 4]);
    }

    #[test]
    fn triangle_vs_path_is_distinguishable() {
        assert!(distinguishable(&Graph::cycle(3), &Graph::path(3), &Constant).unwrap());
    }

    #[test]
    fn isomorphic_pairs_share_histograms() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = random_graph(8, 0.5, &mut rng);
            let sigma = VertexPermutation::random(8, &mut rng);
            let h = permute(&g, &sigma).unwrap();
            let (h1, h2) = joint_refine(&g, &h, &Constant).unwrap();
            assert_eq!(h1, h2);
        }
    }

    #[test]
    fn everything_refines_constant() {
        let g = Graph::path(4);
        let (c, _) = refine_to_convergence(&g, &Constant).unwrap();
        assert!(refines(&c, &Coloring::constant(4)).unwrap());
        // and the constant coloring does not refine a real degree split
        let degree = DegreeColoring.coloring(&g).unwrap();
        assert!(!refines(&Coloring::constant(4), &degree).unwrap());
    }

    #[test]
    fn refines_requires_matching_lengths() {
        assert!(refines(&Coloring::constant(3), &Coloring::constant(4)).is_err());
    }

    #[test]
    fn degree_precoloring_converges_like_constant() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..200 {
            let n = rng.random_range(1..=12);
            let g = random_graph(n, 0.4, &mut rng);
            let (vanilla, _) = refine_to_convergence(&g, &Constant).unwrap();
            let (degree, _) = refine_to_convergence(&g, &DegreeColoring).unwrap();
            assert!(vanilla.same_partition(&degree));
        }
    }

    #[test]
    fn library_precolorings_are_permutation_equivariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..20 {
            let g = random_graph(7, 0.5, &mut rng);
            let sigma = VertexPermutation::random(7, &mut rng);
            let h = permute(&g, &sigma).unwrap();
            let check = |pre: &dyn PreColoring| {
                let (k1, k2) = pre.keys_pair(&g, &h).unwrap();
                for v in 0..7 {
                    assert_eq!(k1[v], k2[sigma.apply(v)]);
                }
                let (h1, h2) = joint_refine(&g, &h, &pre).unwrap();
                assert_eq!(h1, h2);
            };
            check(&Constant);
            check(&DegreeColoring);
            check(&crate::spectral::SpectralColoring::new(
                crate::spectral::SpectralConfig::new(-1.0, 0.0, 2, vec![]).unwrap(),
            ));
            check(&crate::kwl::DiagonalKwl { k: 2 });
        }
    }

    #[test]
    fn coloring_serializes_with_palette() {
        let c = Coloring::from_keys(&[vec![5i64], vec![1], vec![5]]);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"colors":[1,0,1],"palette_size":2}"#);
        let back: Coloring = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #[test]
        fn each_step_refines_its_input(seed in any::<u64>()) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let n = rng.random_range(2..=10);
            let g = random_graph(n, 0.4, &mut rng);
            let mut c = Coloring::constant(n);
            for _ in 0..n {
                let next = refine_step(&g, &c).unwrap();
                prop_assert!(refines(&next, &c).unwrap());
                c = next;
            }
        }

        #[test]
        fn convergence_takes_fewer_than_n_rounds(seed in any::<u64>()) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let n = rng.random_range(1..=12);
            let g = random_graph(n, 0.3, &mut rng);
            let (_, iters) = refine_to_convergence(&g, &Constant).unwrap();
            prop_assert!(iters < n);
        }

        #[test]
        fn product_coloring_refines_both_factors(seed in any::<u64>()) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let g = random_graph(8, 0.5, &mut rng);
            let product = ProductColoring(DegreeColoring, Constant);
            let combined = product.coloring(&g).unwrap();
            let degree = DegreeColoring.coloring(&g).unwrap();
            prop_assert!(refines(&combined, &degree).unwrap());
        }

        #[test]
        fn refining_the_seed_preserves_distinguishability(seed in any::<u64>()) {
            // a verdict reached under a coarse seed survives any extra channel
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let n = rng.random_range(3..=8);
            let g1 = random_graph(n, 0.5, &mut rng);
            let g2 = random_graph(n, 0.5, &mut rng);
            let bucket = rng.random_range(2..5u64);
            let channel = move |g: &Graph| -> crate::error::Result<Vec<Vec<f64>>> {
                Ok((0..g.vertex_count())
                    .map(|v| {
                        let mut x = seed ^ (g.degree(v) as u64).wrapping_mul(0x9e3779b97f4a7c15);
                        x ^= x >> 31;
                        x = x.wrapping_mul(0xbf58476d1ce4e5b9);
                        vec![(x % bucket) as f64]
                    })
                    .collect())
            };
            let coarse = FeatureChannels::new(channel);
            let fine = ProductColoring(&coarse, DegreeColoring);
            if distinguishable(&g1, &g2, &coarse).unwrap() {
                prop_assert!(distinguishable(&g1, &g2, &fine).unwrap());
            }
        }
    }
}
