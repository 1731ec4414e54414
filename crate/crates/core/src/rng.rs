//! Deterministic pseudo-random generation for tests, fuzzing and planted
//! instances. Hand-rolled so that sequences are stable across platforms and
//! dependency upgrades.

use crate::graph::{VertexSet, WeightedGraph};

/// SplitMix64: tiny, fast, and good enough for instance generation.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in 0..bound (bound > 0).
    pub fn next_below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// A connected random graph: a random spanning tree plus density-p extra
/// edges, weights uniform in [w_lo, w_hi].
pub fn random_connected_graph(
    rng: &mut SplitMix64,
    n: usize,
    p: f64,
    w_lo: f64,
    w_hi: f64,
) -> WeightedGraph {
    assert!(n >= 1);
    let mut edges = Vec::new();
    let mut present = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.next_below(v);
        present.insert((u, v));
        edges.push((u, v, rng.range_f64(w_lo, w_hi)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present.contains(&(u, v)) && rng.next_f64() < p {
                edges.push((u, v, rng.range_f64(w_lo, w_hi)));
            }
        }
    }
    WeightedGraph::new(n, edges).expect("generated edges are valid")
}

/// Unit-weight cycle C_n.
pub fn cycle(n: usize) -> WeightedGraph {
    let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    WeightedGraph::new(n, edges).expect("cycle edges are valid")
}

/// Complete graph on n vertices with uniform weight w.
pub fn complete(n: usize, w: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v, w));
        }
    }
    WeightedGraph::new(n, edges).expect("clique edges are valid")
}

/// Two cliques K_k joined by a single bridge of the given weight.
pub fn dumbbell(k: usize, clique_w: f64, bridge_w: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            edges.push((u, v, clique_w));
            edges.push((k + u, k + v, clique_w));
        }
    }
    edges.push((0, k, bridge_w));
    WeightedGraph::new(2 * k, edges).expect("dumbbell edges are valid")
}

/// A random subset of 0..n of the given size.
pub fn random_subset(rng: &mut SplitMix64, n: usize, size: usize) -> VertexSet {
    let mut ids: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.next_below(i + 1);
        ids.swap(i, j);
    }
    VertexSet::from_iter(ids.into_iter().take(size))
}
