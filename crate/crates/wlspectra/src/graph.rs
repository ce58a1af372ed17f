//! Immutable undirected simple graphs, file ingestion, canonical reference
//! graphs, and a brute-force isomorphism oracle for small instances.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, RngExt};

use crate::error::{Error, Result};

/// An immutable undirected simple graph on vertices `0..n`.
///
/// No self-loops, no duplicate edges. Neighbor lists are kept sorted so that
/// degree lookups and edge queries are cheap and iteration order is
/// deterministic everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge iterator. Edges are normalized to
    /// `(min, max)` and deduplicated; self-loops and out-of-range endpoints
    /// are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &set {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { n, edges: set, adjacency })
    }

    /// Graph with `n` vertices and no edges.
    pub fn edgeless(n: usize) -> Self {
        Self::new(n, []).expect("edgeless graph is always valid")
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is always valid")
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v))).expect("path graph is always valid")
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`. Requires `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges = (0..n).map(|v| (v, (v + 1) % n));
        Self::new(n, edges).expect("cycle graph is always valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as normalized `(min, max)` pairs in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Sorted degree multiset.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degrees: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        degrees.sort_unstable();
        degrees
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let offset = self.n;
        let edges = self
            .edges()
            .chain(other.edges().map(|(u, v)| (u + offset, v + offset)));
        Graph::new(self.n + other.n, edges).expect("union of valid graphs is valid")
    }

    /// Serializes to the edge-list text format (`n=` header plus one
    /// `u v` line per edge, sorted).
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n={}", self.n).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }
}

/// A bijection on `0..n`, applied to vertex ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPermutation {
    mapping: Vec<usize>,
}

impl VertexPermutation {
    /// Validates that `mapping` is a bijection on `0..mapping.len()`.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &target in &mapping {
            if target >= n || seen[target] {
                return Err(Error::InvalidGraph(format!(
                    "mapping is not a bijection on 0..{n}"
                )));
            }
            seen[target] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self { mapping: (0..n).collect() }
    }

    /// Uniform random permutation (Fisher-Yates).
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            mapping.swap(i, j);
        }
        Self { mapping }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.mapping[v]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (v, &target) in self.mapping.iter().enumerate() {
            inv[target] = v;
        }
        Self { mapping: inv }
    }

    /// Composition `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            mapping: (0..other.len()).map(|v| self.apply(other.apply(v))).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }
}

/// Applies a vertex permutation to a graph; the result is isomorphic to the
/// input by construction.
pub fn permute(g: &Graph, sigma: &VertexPermutation) -> Result<Graph> {
    if sigma.len() != g.vertex_count() {
        return Err(Error::InvalidGraph(format!(
            "permutation on {} elements does not match graph with {} vertices",
            sigma.len(),
            g.vertex_count()
        )));
    }
    Graph::new(
        g.vertex_count(),
        g.edges().map(|(u, v)| (sigma.apply(u), sigma.apply(v))),
    )
}

/// Largest vertex count accepted by [`brute_force_isomorphic`].
pub const BRUTE_FORCE_MAX_VERTICES: usize = 10;

/// Exhaustive isomorphism test for small graphs: searches for a bijection
/// mapping edges exactly onto edges. Rejects inputs with more than
/// [`BRUTE_FORCE_MAX_VERTICES`] vertices.
pub fn brute_force_isomorphic(g1: &Graph, g2: &Graph) -> Result<bool> {
    let n = g1.vertex_count().max(g2.vertex_count());
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::Capability(format!(
            "brute-force isomorphism is limited to {BRUTE_FORCE_MAX_VERTICES} vertices, got {n}"
        )));
    }
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return Ok(false);
    }
    if g1.degree_sequence() != g2.degree_sequence() {
        return Ok(false);
    }
    let n = g1.vertex_count();
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(extend_mapping(g1, g2, 0, &mut mapping, &mut used))
}

/// Backtracking search mapping vertices of `g1` in id order, pruning on
/// degree and on adjacency consistency with already-mapped vertices.
fn extend_mapping(
    g1: &Graph,
    g2: &Graph,
    v: usize,
    mapping: &mut [usize],
    used: &mut [bool],
) -> bool {
    let n = g1.vertex_count();
    if v == n {
        return true;
    }
    'candidates: for w in 0..n {
        if used[w] || g1.degree(v) != g2.degree(w) {
            continue;
        }
        for u in 0..v {
            if g1.has_edge(u, v) != g2.has_edge(mapping[u], w) {
                continue 'candidates;
            }
        }
        mapping[v] = w;
        used[w] = true;
        if extend_mapping(g1, g2, v + 1, mapping, used) {
            return true;
        }
        mapping[v] = usize::MAX;
        used[w] = false;
    }
    false
}

/// Parses the edge-list text format: `#` comments, optional `n=<count>`
/// header, one whitespace-separated `u v` pair per line.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared_n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut max_id: Option<usize> = None;
    let mut saw_edge = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n=") {
            if saw_edge || declared_n.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "n= header must appear once, before any edge".into(),
                });
            }
            declared_n = Some(rest.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid vertex count {rest:?}"),
            })?);
            continue;
        }
        let mut parts = line.split_whitespace();
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => {
                let u: usize = a.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid vertex id {a:?}"),
                })?;
                let v: usize = b.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid vertex id {b:?}"),
                })?;
                (u, v)
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected \"u v\", got {line:?}"),
                })
            }
        };
        if u == v {
            return Err(Error::InvalidGraph(format!(
                "self-loop {u} {v} at line {line_no}"
            )));
        }
        saw_edge = true;
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u.max(v))));
        edges.push((u, v));
    }

    let implied_n = max_id.map_or(0, |m| m + 1);
    let n = match declared_n {
        Some(n) if n < implied_n => {
            return Err(Error::InvalidGraph(format!(
                "declared n={n} but edges reference vertex {}",
                implied_n - 1
            )))
        }
        Some(n) => n,
        None => implied_n,
    };
    Graph::new(n, edges)
}

/// Parses the TU dataset distribution layout: `DS_A.txt` holds 1-indexed
/// comma-separated global edges, `DS_graph_indicator.txt` maps each global
/// vertex line to a graph id. Returns one graph per id, vertices re-indexed
/// from 0 preserving indicator order.
pub fn parse_tu_dataset(adjacency_text: &str, indicator_text: &str) -> Result<Vec<Graph>> {
    // graph id per global vertex (both 1-indexed in the files)
    let mut graph_of: Vec<usize> = Vec::new();
    for (idx, raw) in indicator_text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let gid: usize = line.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("invalid graph id {line:?} in indicator file"),
        })?;
        if gid == 0 {
            return Err(Error::Format(format!(
                "graph ids are 1-indexed, got 0 at indicator line {}",
                idx + 1
            )));
        }
        graph_of.push(gid);
    }
    let graph_count = graph_of.iter().copied().max().unwrap_or(0);

    // local ids per graph, preserving indicator order
    let mut local_id: Vec<usize> = vec![0; graph_of.len()];
    let mut sizes = vec![0usize; graph_count];
    for (global, &gid) in graph_of.iter().enumerate() {
        local_id[global] = sizes[gid - 1];
        sizes[gid - 1] += 1;
    }
    if let Some(gap) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Format(format!(
            "indicator file has no vertices for graph id {}",
            gap + 1
        )));
    }

    let mut edge_lists: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (idx, raw) in adjacency_text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected \"u, v\", got {line:?}"),
                })
            }
        };
        let u: usize = a.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid vertex id {a:?}"),
        })?;
        let v: usize = b.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid vertex id {b:?}"),
        })?;
        if u == 0 || v == 0 || u > graph_of.len() || v > graph_of.len() {
            return Err(Error::Format(format!(
                "edge ({u}, {v}) at line {line_no} references a vertex outside the indicator file"
            )));
        }
        let (gu, gv) = (graph_of[u - 1], graph_of[v - 1]);
        if gu != gv {
            return Err(Error::Format(format!(
                "edge ({u}, {v}) at line {line_no} spans graphs {gu} and {gv}"
            )));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!(
                "self-loop {u} at line {line_no}"
            )));
        }
        edge_lists[gu - 1].push((local_id[u - 1], local_id[v - 1]));
    }

    sizes
        .iter()
        .zip(edge_lists)
        .map(|(&n, edges)| Graph::new(n, edges))
        .collect()
}

/// The two reference molecule graphs used throughout the synthetic
/// benchmarks: both have 10 vertices, 11 edges, and identical degree
/// sequences, yet are not isomorphic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceGraph {
    /// Two hexagons sharing one edge.
    Decalin,
    /// Two pentagons joined by a bridge edge.
    Bicyclopentyl,
}

/// Builds a reference graph with a fixed canonical vertex numbering.
pub fn reference_graph(which: ReferenceGraph) -> Graph {
    match which {
        ReferenceGraph::Decalin => Graph::new(
            10,
            [
                (0, 1),
                // hexagon 0-2-3-4-5-1
                (0, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 1),
                // hexagon 0-6-7-8-9-1
                (0, 6),
                (6, 7),
                (7, 8),
                (8, 9),
                (9, 1),
            ],
        )
        .expect("reference graph is valid"),
        ReferenceGraph::Bicyclopentyl => Graph::new(
            10,
            [
                // pentagon 0-1-2-3-4
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 0),
                // pentagon 5-6-7-8-9
                (5, 6),
                (6, 7),
                (7, 8),
                (8, 9),
                (9, 5),
                // bridge
                (0, 5),
            ],
        )
        .expect("reference graph is valid"),
    }
}

/// Erdős–Rényi style random graph: each of the `n(n-1)/2` possible edges is
/// present independently with probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("random graph construction is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn parse_simple_edge_list() {
        let g = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn parse_deduplicates_reversed_pairs() {
        let g = parse_edge_list("0 1\n1 0").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn parse_rejects_self_loop() {
        assert!(matches!(
            parse_edge_list("0 0"),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn parse_honors_header_and_comments() {
        let g = parse_edge_list("# a comment\nn=5\n0 1\n").unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree(4), 0);
    }

    #[test]
    fn parse_rejects_undersized_header() {
        assert!(parse_edge_list("n=2\n0 3").is_err());
    }

    #[test]
    fn parse_reports_line_numbers() {
        match parse_edge_list("0 1\nbogus line") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn tu_single_graph() {
        let graphs = parse_tu_dataset("1, 2", "1\n1").unwrap();
        assert_eq!(graphs.len(), 1);
        assert_eq!(graphs[0], Graph::new(2, [(0, 1)]).unwrap());
    }

    #[test]
    fn tu_two_components() {
        let graphs = parse_tu_dataset("1, 2\n3, 4", "1\n1\n2\n2").unwrap();
        assert_eq!(graphs.len(), 2);
        assert_eq!(graphs[0], Graph::complete(2));
        assert_eq!(graphs[1], Graph::complete(2));
    }

    #[test]
    fn tu_rejects_cross_graph_edge() {
        assert!(matches!(
            parse_tu_dataset("1, 3", "1\n1\n2"),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn tu_rejects_indicator_gap() {
        assert!(matches!(
            parse_tu_dataset("1, 2", "1\n1\n3"),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn reference_graphs_match_construction() {
        let decalin = reference_graph(ReferenceGraph::Decalin);
        let bicyclo = reference_graph(ReferenceGraph::Bicyclopentyl);
        for g in [&decalin, &bicyclo] {
            assert_eq!(g.vertex_count(), 10);
            assert_eq!(g.edge_count(), 11);
            let deg3: Vec<usize> = (0..10).filter(|&v| g.degree(v) == 3).collect();
            assert_eq!(deg3.len(), 2);
            assert!(g.has_edge(deg3[0], deg3[1]));
        }
        assert_eq!(decalin.degree_sequence(), bicyclo.degree_sequence());
        assert!(!brute_force_isomorphic(&decalin, &bicyclo).unwrap());
    }

    #[test]
    fn permute_identity_and_swap() {
        let k2 = Graph::complete(2);
        let same = permute(&k2, &VertexPermutation::identity(2)).unwrap();
        assert_eq!(same, k2);

        let p3 = Graph::path(3);
        let swapped = permute(&p3, &VertexPermutation::new(vec![2, 1, 0]).unwrap()).unwrap();
        assert_eq!(swapped, p3);
    }

    #[test]
    fn permute_rejects_size_mismatch() {
        let g = Graph::path(3);
        assert!(permute(&g, &VertexPermutation::identity(2)).is_err());
    }

    #[test]
    fn brute_force_relabeled_triangle() {
        let t1 = Graph::cycle(3);
        let t2 = Graph::new(3, [(2, 1), (1, 0), (0, 2)]).unwrap();
        assert!(brute_force_isomorphic(&t1, &t2).unwrap());
        assert!(!brute_force_isomorphic(&Graph::path(3), &t1).unwrap());
    }

    #[test]
    fn brute_force_rejects_large_inputs() {
        let g = Graph::edgeless(11);
        assert!(matches!(
            brute_force_isomorphic(&g, &g),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn permuted_graphs_are_isomorphic() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_graph(6, 0.5, &mut rng);
            let sigma = VertexPermutation::random(6, &mut rng);
            let h = permute(&g, &sigma).unwrap();
            assert!(brute_force_isomorphic(&g, &h).unwrap());
        }
    }

    #[test]
    fn brute_force_reflexive_symmetric() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..40 {
            let g = random_graph(rng.random_range(1..=6), 0.5, &mut rng);
            let h = random_graph(g.vertex_count(), 0.5, &mut rng);
            assert!(brute_force_isomorphic(&g, &g).unwrap());
            assert_eq!(
                brute_force_isomorphic(&g, &h).unwrap(),
                brute_force_isomorphic(&h, &g).unwrap()
            );
        }
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(n in 1usize..12, mask in any::<u64>()) {
            let mut edges = Vec::new();
            let mut bit = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask >> (bit % 64) & 1 == 1 {
                        edges.push((u, v));
                    }
                    bit += 1;
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let reparsed = parse_edge_list(&g.to_edge_list()).unwrap();
            prop_assert_eq!(reparsed, g);
        }

        #[test]
        fn permutation_action_composes(seed in any::<u64>()) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let g = random_graph(7, 0.4, &mut rng);
            let s1 = VertexPermutation::random(7, &mut rng);
            let s2 = VertexPermutation::random(7, &mut rng);
            let stepwise = permute(&permute(&g, &s1).unwrap(), &s2).unwrap();
            let composed = permute(&g, &s2.compose(&s1)).unwrap();
            prop_assert_eq!(stepwise, composed);
        }

        #[test]
        fn adjacency_is_symmetric(seed in any::<u64>()) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let g = random_graph(8, 0.5, &mut rng);
            for u in 0..8 {
                for &v in g.neighbors(u) {
                    prop_assert!(g.neighbors(v).contains(&u));
                }
            }
        }
    }
}
