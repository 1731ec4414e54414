//! Weighted-graph representation and the cut/volume/boundary algebra every
//! other module consumes.
//!
//! Conventions, used consistently everywhere:
//! - weights are strictly positive finite reals,
//! - a self-loop of weight `w` contributes `w` once to the weighted degree,
//! - `vol(S)` is the sum of weighted degrees over `S`,
//! - `boundary_weight(S)` counts edges with exactly one endpoint in `S`
//!   (self-loops never cross a cut).

use crate::{approx_eq, Error, Result};
use std::collections::BTreeMap;

pub type VertexId = usize;
pub type Weight = f64;

/// A set of vertex ids with O(1) membership and ordered iteration.
#[derive(Clone, Debug, Default)]
pub struct VertexSet {
    words: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn new() -> Self {
        VertexSet {
            words: Vec::new(),
            len: 0,
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        VertexSet {
            words: vec![0; n.div_ceil(64)],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        VertexSet::from_iter(0..n)
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet::from_iter([v])
    }

    pub fn insert(&mut self, v: usize) -> bool {
        let w = v / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let mask = 1u64 << (v % 64);
        if self.words[w] & mask == 0 {
            self.words[w] |= mask;
            self.len += 1;
            true
        } else {
            false
        }
    }

    pub fn remove(&mut self, v: usize) -> bool {
        let w = v / 64;
        if w >= self.words.len() {
            return false;
        }
        let mask = 1u64 << (v % 64);
        if self.words[w] & mask != 0 {
            self.words[w] &= !mask;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        let w = v / 64;
        w < self.words.len() && self.words[w] & (1u64 << (v % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Ascending iteration over members.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        for v in other.iter() {
            out.insert(v);
        }
        out
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let n = self.words.len().min(other.words.len());
        let mut words = vec![0u64; n];
        let mut len = 0;
        for i in 0..n {
            words[i] = self.words[i] & other.words[i];
            len += words[i].count_ones() as usize;
        }
        VertexSet { words, len }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut words = self.words.clone();
        let mut len = 0;
        for (i, w) in words.iter_mut().enumerate() {
            if i < other.words.len() {
                *w &= !other.words[i];
            }
            len += w.count_ones() as usize;
        }
        VertexSet { words, len }
    }

    pub fn symmetric_difference(&self, other: &VertexSet) -> VertexSet {
        self.union(other).difference(&self.intersection(other))
    }

    pub fn complement(&self, n: usize) -> VertexSet {
        let mut out = VertexSet::with_capacity(n);
        for v in 0..n {
            if !self.contains(v) {
                out.insert(v);
            }
        }
        out
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }

    pub fn is_disjoint_from(&self, other: &VertexSet) -> bool {
        let n = self.words.len().min(other.words.len());
        (0..n).all(|i| self.words[i] & other.words[i] == 0)
    }

    /// Nested or disjoint: the laminar relation.
    pub fn laminar_with(&self, other: &VertexSet) -> bool {
        self.is_disjoint_from(other) || self.is_subset_of(other) || other.is_subset_of(self)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl PartialEq for VertexSet {
    fn eq(&self, other: &Self) -> bool {
        let n = self.words.len().max(other.words.len());
        (0..n).all(|i| {
            self.words.get(i).copied().unwrap_or(0) == other.words.get(i).copied().unwrap_or(0)
        })
    }
}

impl Eq for VertexSet {}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VertexSet {
    /// Lexicographic order on the ascending member list: the set owning the
    /// smallest non-shared vertex comes first. Used for deterministic
    /// tie-breaking.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let n = self.words.len().max(other.words.len());
        for i in 0..n {
            let a = self.words.get(i).copied().unwrap_or(0);
            let b = other.words.get(i).copied().unwrap_or(0);
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff & diff.wrapping_neg();
                // Whoever owns the lowest differing vertex is smaller.
                return if a & bit != 0 {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

/// Undirected multigraph with positive real edge weights; self-loops allowed.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(VertexId, VertexId, Weight)>,
    adj: Vec<Vec<usize>>,
    deg: Vec<Weight>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(VertexId, VertexId, Weight)>) -> Result<Self> {
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{v}) out of vertex range 0..{n}"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{v}) has non-positive or non-finite weight {w}"
                )));
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut deg = vec![0.0; n];
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            adj[u].push(i);
            if u != v {
                adj[v].push(i);
            }
            // A self-loop contributes its weight once.
            deg[u] += w;
            if u != v {
                deg[v] += w;
            }
        }
        Ok(WeightedGraph { n, edges, adj, deg })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId, Weight)] {
        &self.edges
    }

    /// Edge indices incident to `v` (self-loops listed once).
    pub fn incident(&self, v: VertexId) -> &[usize] {
        &self.adj[v]
    }

    pub fn weighted_degree(&self, v: VertexId) -> Weight {
        self.deg[v]
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    /// vol(S) = sum of weighted degrees over S.
    pub fn volume(&self, s: &VertexSet) -> Weight {
        s.iter().map(|v| self.deg[v]).sum()
    }

    /// vol(V) = sum over all vertices.
    pub fn volume_total(&self) -> Weight {
        self.deg.iter().sum()
    }

    /// Total weight of edges with exactly one endpoint in `s`.
    pub fn boundary_weight(&self, s: &VertexSet) -> Weight {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| u != v && s.contains(u) != s.contains(v))
            .map(|&(_, _, w)| w)
            .sum()
    }

    /// w(A, B) for disjoint vertex sets A and B.
    pub fn weight_between(&self, a: &VertexSet, b: &VertexSet) -> Weight {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| {
                u != v && ((a.contains(u) && b.contains(v)) || (a.contains(v) && b.contains(u)))
            })
            .map(|&(_, _, w)| w)
            .sum()
    }

    /// w({v}, S) for a single vertex.
    pub fn weight_vertex_to_set(&self, v: VertexId, s: &VertexSet) -> Weight {
        self.adj[v]
            .iter()
            .map(|&ei| {
                let (a, b, w) = self.edges[ei];
                if a == b {
                    0.0
                } else {
                    let o = if a == v { b } else { a };
                    if s.contains(o) {
                        w
                    } else {
                        0.0
                    }
                }
            })
            .sum()
    }

    /// G{A}: the induced subgraph plus, for each u in A with outside weight,
    /// a self-loop of that weight. Weighted degrees of retained vertices are
    /// preserved; vertices outside A become isolated. The vertex id space is
    /// unchanged.
    pub fn loopy_subgraph(&self, a: &VertexSet) -> WeightedGraph {
        let mut edges = Vec::new();
        let mut outside = vec![0.0f64; self.n];
        for &(u, v, w) in &self.edges {
            let iu = a.contains(u);
            let iv = a.contains(v);
            if iu && iv {
                edges.push((u, v, w));
            } else if iu {
                outside[u] += w;
            } else if iv {
                outside[v] += w;
            }
        }
        for v in a.iter() {
            if outside[v] > 0.0 {
                edges.push((v, v, outside[v]));
            }
        }
        WeightedGraph::new(self.n, edges).expect("subgraph edges are valid")
    }

    /// G[A]: the induced subgraph without compensating self-loops, over the
    /// same id space. Existing self-loops inside A are kept.
    pub fn induced_subgraph(&self, a: &VertexSet) -> WeightedGraph {
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v, _)| a.contains(u) && a.contains(v))
            .copied()
            .collect();
        WeightedGraph::new(self.n, edges).expect("subgraph edges are valid")
    }

    /// Boundary inside the induced graph G[A]: w(U, A \ U).
    pub fn boundary_within(&self, a: &VertexSet, u: &VertexSet) -> Weight {
        self.edges
            .iter()
            .filter(|&&(x, y, _)| {
                x != y && a.contains(x) && a.contains(y) && u.contains(x) != u.contains(y)
            })
            .map(|&(_, _, w)| w)
            .sum()
    }

    /// Contract each cluster to one vertex. Parallel edges between clusters
    /// are merged by summing weights; intra-cluster edges (and self-loops)
    /// are dropped. Returns the contracted graph and the map old -> new.
    pub fn contract(&self, c: &Clustering) -> Result<(WeightedGraph, Vec<usize>)> {
        c.validate(self.n)?;
        let mut map = vec![usize::MAX; self.n];
        for (ci, cluster) in c.clusters.iter().enumerate() {
            for v in cluster.iter() {
                map[v] = ci;
            }
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, w) in &self.edges {
            let (cu, cv) = (map[u], map[v]);
            if cu != cv {
                let key = (cu.min(cv), cu.max(cv));
                *merged.entry(key).or_insert(0.0) += w;
            }
        }
        let edges = merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        Ok((WeightedGraph::new(c.clusters.len(), edges)?, map))
    }

    /// Conductance of a cut: w(S, V\S) / min(vol(S), vol(V) - vol(S)).
    pub fn conductance(&self, s: &VertexSet) -> Result<f64> {
        if s.is_empty() || s.len() >= self.n {
            return Err(Error::Precondition("conductance: empty side".into()));
        }
        let cut = self.boundary_weight(s);
        let vs = self.volume(s);
        let denom = vs.min(self.volume_total() - vs);
        if denom <= 0.0 {
            return Ok(if cut > 0.0 { f64::INFINITY } else { 0.0 });
        }
        Ok(cut / denom)
    }

    /// Definition of beta-boundary-sparsity for U inside a component A:
    /// w(U, A\U) < beta * min(w(U, V\A), w(A\U, V\A)).
    /// Both the empty set and A itself are non-beta-boundary-sparse.
    pub fn is_boundary_sparse(&self, a: &VertexSet, u: &VertexSet, beta: f64) -> bool {
        debug_assert!(u.is_subset_of(a));
        if u.is_empty() || u.len() == a.len() {
            return false;
        }
        let rest = a.difference(u);
        let outside = a.complement(self.n);
        let internal = self.weight_between(u, &rest);
        let ext_u = self.weight_between(u, &outside);
        let ext_rest = self.weight_between(&rest, &outside);
        internal < beta * ext_u.min(ext_rest)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.component_of(0).len() == self.n
    }

    pub fn component_of(&self, start: VertexId) -> VertexSet {
        let mut seen = VertexSet::with_capacity(self.n);
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(v) = stack.pop() {
            for &ei in &self.adj[v] {
                let (a, b, _) = self.edges[ei];
                let o = if a == v { b } else { a };
                if o != v && seen.insert(o) {
                    stack.push(o);
                }
            }
        }
        seen
    }

    /// Connected components among `within` (ascending by smallest member).
    pub fn components_within(&self, within: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::with_capacity(self.n);
        let mut out = Vec::new();
        for s in within.iter() {
            if seen.contains(s) {
                continue;
            }
            let mut comp = VertexSet::with_capacity(self.n);
            let mut stack = vec![s];
            comp.insert(s);
            seen.insert(s);
            while let Some(v) = stack.pop() {
                for &ei in &self.adj[v] {
                    let (a, b, _) = self.edges[ei];
                    let o = if a == v { b } else { a };
                    if o != v && within.contains(o) && comp.insert(o) {
                        seen.insert(o);
                        stack.push(o);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn connected_components(&self) -> Vec<VertexSet> {
        self.components_within(&VertexSet::full(self.n))
    }

    pub fn min_weighted_degree(&self) -> Weight {
        self.deg.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Consistency check: vol(V) equals the degree sum convention exactly.
    pub fn check_volume_convention(&self) -> bool {
        let by_edges: f64 = self
            .edges
            .iter()
            .map(|&(u, v, w)| if u == v { w } else { 2.0 * w })
            .sum();
        approx_eq(by_edges, self.volume_total())
    }
}

/// A partition of a host vertex set into pairwise disjoint clusters.
#[derive(Clone, Debug)]
pub struct Clustering {
    pub clusters: Vec<VertexSet>,
}

impl Clustering {
    pub fn new(clusters: Vec<VertexSet>) -> Self {
        Clustering { clusters }
    }

    pub fn singletons(n: usize) -> Self {
        Clustering {
            clusters: (0..n).map(VertexSet::singleton).collect(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = VertexSet::with_capacity(n);
        let mut total = 0;
        for c in &self.clusters {
            for v in c.iter() {
                if v >= n {
                    return Err(Error::InvalidInput(format!(
                        "cluster vertex {v} out of range"
                    )));
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidInput(format!("vertex {v} in two clusters")));
                }
                total += 1;
            }
        }
        if total != n {
            return Err(Error::InvalidInput(format!(
                "clustering covers {total} of {n} vertices"
            )));
        }
        Ok(())
    }

    pub fn cluster_of(&self, v: VertexId) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(v))
    }
}

/// One level of the contraction hierarchy: the level graph, the clustering
/// that was contracted, the old-vertex -> new-vertex map, and cached level
/// degrees for the sparsifier.
#[derive(Clone, Debug)]
pub struct HierarchyLevel {
    pub graph: WeightedGraph,
    pub clustering: Clustering,
    pub map: Vec<usize>,
}

/// The laminar family of contractions G_0 -> G_1 -> ... -> G_L.
#[derive(Clone, Debug)]
pub struct ContractionHierarchy {
    pub levels: Vec<HierarchyLevel>,
    pub top: WeightedGraph,
}

impl ContractionHierarchy {
    /// Number of contraction steps L; level graphs are G_0 .. G_L.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn graph_at(&self, j: usize) -> &WeightedGraph {
        if j < self.levels.len() {
            &self.levels[j].graph
        } else {
            &self.top
        }
    }

    /// Maps from original vertices to their containing vertex at each level,
    /// index j in 0..=L.
    pub fn original_maps(&self) -> Vec<Vec<usize>> {
        let n0 = self.graph_at(0).vertex_count();
        let mut maps = vec![(0..n0).collect::<Vec<_>>()];
        let mut cur: Vec<usize> = (0..n0).collect();
        for level in &self.levels {
            cur = cur.iter().map(|&v| level.map[v]).collect();
            maps.push(cur.clone());
        }
        maps
    }

    /// Pre-image in G_0 of vertex `v` at level `j`.
    pub fn pullback(&self, j: usize, v: VertexId) -> VertexSet {
        let maps = self.original_maps();
        VertexSet::from_iter(
            (0..self.graph_at(0).vertex_count()).filter(|&orig| maps[j][orig] == v),
        )
    }

    /// All pullbacks across all levels form a laminar family.
    pub fn is_laminar(&self) -> bool {
        let mut sets = Vec::new();
        for j in 0..=self.depth() {
            for v in 0..self.graph_at(j).vertex_count() {
                sets.push(self.pullback(j, v));
            }
        }
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if !sets[i].laminar_with(&sets[j]) {
                    return false;
                }
            }
        }
        true
    }
}
