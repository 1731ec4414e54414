//! Skeleton-graph construction from a contraction hierarchy: a derandomized
//! unbalanced sparsifier (pessimistic-estimator rounding against Laplacian
//! pullback constraints), a balanced Steiner graph, discretization into unit
//! multi-edges, splitting-off of Steiner vertices, and restriction to the
//! original vertices.
//!
//! Parallel unit edges are never materialized; every multigraph here stores
//! one multiplicity count per vertex pair.

use crate::graph::{ContractionHierarchy, VertexSet, WeightedGraph};
use crate::oracle::MaxFlow;
use crate::{Budget, Error, Result};
use std::collections::BTreeMap;

/// The derived parameter chain. The representation budget `d_cap` bounds
/// the total level-degree needed to express a minimum cut as a symmetric
/// difference of pullbacks; everything else follows from it:
/// nu = d_cap/eps, eta = eps^2 (lambda/d_cap)^2, Z = lambda/nu, and W is the
/// largest weight for which the Chernoff potential over all constraints
/// stays below one.
#[derive(Clone, Debug)]
pub struct SparsifierParams {
    pub eps: f64,
    pub lambda_tilde: f64,
    pub d_cap: f64,
    pub nu: f64,
    pub eta: f64,
    pub z: f64,
    pub w: f64,
    pub w_prime: f64,
}

/// (level j, vertex u, level k, vertex v): the two pullbacks a constraint
/// compares.
pub type ConstraintKey = (usize, usize, usize, usize);

/// One Laplacian pullback constraint: the quadratic form between two level
/// vertices, as a signed combination of original edges.
#[derive(Clone, Debug)]
pub struct LaplacianConstraint {
    pub key: ConstraintKey,
    pub target: f64,
    /// (edge index, sign).
    pub terms: Vec<(usize, f64)>,
}

/// Collect the nonzero constraints over all level pairs whose endpoint
/// degrees are at most nu.
pub fn build_constraints(
    g: &WeightedGraph,
    hierarchy: &ContractionHierarchy,
    nu: f64,
) -> Vec<LaplacianConstraint> {
    let maps = hierarchy.original_maps();
    let levels = maps.len(); // L + 1
    let mut acc: BTreeMap<ConstraintKey, Vec<(usize, f64)>> = BTreeMap::new();
    for (ei, &(x, y, _)) in g.edges().iter().enumerate() {
        if x == y {
            continue;
        }
        for j in 0..levels {
            let (aj, bj) = (maps[j][x], maps[j][y]);
            if aj == bj {
                continue;
            }
            for k in j..levels {
                let (ak, bk) = (maps[k][x], maps[k][y]);
                if ak == bk {
                    continue;
                }
                if j == k {
                    // Diagonals (a,a), (b,b) and one off-diagonal (a,b).
                    acc.entry((j, aj, j, aj)).or_default().push((ei, 1.0));
                    acc.entry((j, bj, j, bj)).or_default().push((ei, 1.0));
                    acc.entry((j, aj.min(bj), j, aj.max(bj)))
                        .or_default()
                        .push((ei, -1.0));
                } else {
                    acc.entry((j, aj, k, ak)).or_default().push((ei, 1.0));
                    acc.entry((j, aj, k, bk)).or_default().push((ei, -1.0));
                    acc.entry((j, bj, k, ak)).or_default().push((ei, -1.0));
                    acc.entry((j, bj, k, bk)).or_default().push((ei, 1.0));
                }
            }
        }
    }
    let level_degree = |j: usize, v: usize| hierarchy.graph_at(j).weighted_degree(v);
    acc.into_iter()
        .filter_map(|(key, terms)| {
            let (j, u, k, v) = key;
            if level_degree(j, u) > nu || level_degree(k, v) > nu {
                return None;
            }
            // Whole-graph pullbacks give identically zero forms.
            if hierarchy.graph_at(j).vertex_count() == 1
                || hierarchy.graph_at(k).vertex_count() == 1
            {
                return None;
            }
            let target: f64 = terms.iter().map(|&(ei, s)| s * g.edges()[ei].2).sum();
            Some(LaplacianConstraint { key, target, terms })
        })
        .collect()
}

/// Derive the parameter chain; errors with a parameter-regime diagnostic
/// when no feasible weight exists above the floating-point floor.
pub fn derive_params(
    g: &WeightedGraph,
    hierarchy: &ContractionHierarchy,
    eps: f64,
    lambda_tilde: f64,
    d_cap: f64,
) -> Result<(SparsifierParams, Vec<LaplacianConstraint>)> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Precondition("eps must be in (0, 1]".into()));
    }
    let d_cap = d_cap.max(2.0 * lambda_tilde);
    let nu = d_cap / eps;
    let eta = eps * eps * (lambda_tilde / d_cap) * (lambda_tilde / d_cap);
    let z = lambda_tilde / nu;
    let constraints = build_constraints(g, hierarchy, nu);
    let b = eta * lambda_tilde;
    let levels = hierarchy.depth() as f64 + 2.0;
    let m = g.edge_count() as f64 + 2.0;
    // Analytic ceiling on W, then shrink until the exact-MGF potential
    // is feasible.
    let mut w = 4.0 * eta * lambda_tilde * lambda_tilde / (nu * (levels * m).ln());
    let max_mc = constraints.iter().map(|c| c.terms.len()).max().unwrap_or(1) as f64;
    let n_c = constraints.len().max(1) as f64;
    let hoeffding = b / (0.5 * max_mc * (4.0 * n_c).ln().max(1.0)).sqrt();
    w = w.min(hoeffding);
    let mut feasible = false;
    for _ in 0..80 {
        if w <= 0.0 || !w.is_finite() {
            break;
        }
        if estimator_potential(g, &constraints, w, b) < 0.999 {
            feasible = true;
            break;
        }
        w *= 0.7;
    }
    if !feasible {
        return Err(Error::ParameterRegime(
            "no feasible sparsifier weight for these constraints".into(),
        ));
    }
    let w_prime = (eps * w).min(eps * lambda_tilde / z);
    if w_prime < 1e-13 * lambda_tilde {
        return Err(Error::ParameterRegime(
            "unit weight collapsed below the precision floor".into(),
        ));
    }
    let heaviest = g
        .edges()
        .iter()
        .map(|e| e.2)
        .fold(0.0f64, f64::max)
        .max(lambda_tilde);
    if heaviest / w_prime > 4.0e15 {
        return Err(Error::ParameterRegime(
            "unit multiplicities exceed the exact integer range".into(),
        ));
    }
    Ok((
        SparsifierParams {
            eps,
            lambda_tilde,
            d_cap,
            nu,
            eta,
            z,
            w,
            w_prime,
        },
        constraints,
    ))
}

fn fractional_part(w_e: f64, w: f64) -> (u64, f64) {
    let ratio = w_e / w;
    let base = ratio.floor();
    (base as u64, ratio - base)
}

/// Bernstein-style parameter per constraint.
fn constraint_t(terms: &[(usize, f64)], ps: &[f64], w: f64, b: f64) -> f64 {
    let var: f64 = terms
        .iter()
        .map(|&(ei, _)| w * w * ps[ei] * (1.0 - ps[ei]))
        .sum();
    let t = b / (var + w * b / 3.0);
    t.min(30.0 / w)
}

fn log_mgf(t: f64, sign: f64, w: f64, p: f64) -> f64 {
    // E[exp(t * sign * W * (x - p))] for x ~ Bernoulli(p).
    let a = t * sign * w;
    -a * p + ((1.0 - p) + p * a.exp()).ln()
}

/// Initial value of the two-sided pessimistic estimator.
fn estimator_potential(
    g: &WeightedGraph,
    constraints: &[LaplacianConstraint],
    w: f64,
    b: f64,
) -> f64 {
    let ps: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| fractional_part(e.2, w).1)
        .collect();
    let mut phi = 0.0;
    for c in constraints {
        let t = constraint_t(&c.terms, &ps, w, b);
        let mut plus = -t * b;
        let mut minus = -t * b;
        for &(ei, s) in &c.terms {
            plus += log_mgf(t, s, w, ps[ei]);
            minus += log_mgf(t, -s, w, ps[ei]);
        }
        phi += plus.exp() + minus.exp();
    }
    phi
}

/// The unbalanced sparsifier: multiplicity floor(w_e/W) or ceil(w_e/W) per
/// original edge, the fractional parts rounded by a greedy walk that never
/// lets the Chernoff potential grow. Every Laplacian constraint ends within
/// eta * lambda of its target.
pub fn build_unbalanced(
    g: &WeightedGraph,
    params: &SparsifierParams,
    constraints: &[LaplacianConstraint],
    budget: &mut Budget,
) -> Result<Vec<u64>> {
    let m = g.edge_count();
    let w = params.w;
    let b = params.eta * params.lambda_tilde;
    let parts: Vec<(u64, f64)> = g.edges().iter().map(|e| fractional_part(e.2, w)).collect();
    let ps: Vec<f64> = parts.iter().map(|p| p.1).collect();
    // Per-constraint running log-terms and per-edge membership.
    let mut log_plus = Vec::with_capacity(constraints.len());
    let mut log_minus = Vec::with_capacity(constraints.len());
    let mut ts = Vec::with_capacity(constraints.len());
    let mut members: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for (ci, c) in constraints.iter().enumerate() {
        let t = constraint_t(&c.terms, &ps, w, b);
        let mut plus = -t * b;
        let mut minus = -t * b;
        for &(ei, s) in &c.terms {
            plus += log_mgf(t, s, w, ps[ei]);
            minus += log_mgf(t, -s, w, ps[ei]);
            members[ei].push((ci, s));
        }
        log_plus.push(plus);
        log_minus.push(minus);
        ts.push(t);
    }
    let mut counts = vec![0u64; m];
    for ei in 0..m {
        budget.charge(1 + members[ei].len() as u64, "sparsifier rounding")?;
        let p = ps[ei];
        let x = if p <= 1e-12 {
            0.0
        } else if p >= 1.0 - 1e-12 {
            1.0
        } else {
            // Compare the potential after choosing 0 versus 1 over the
            // affected constraints only.
            let mut delta = [0.0f64; 2];
            for &(ci, s) in &members[ei] {
                let t = ts[ci];
                for (xi, d) in delta.iter_mut().enumerate() {
                    let inc = t * s * w * (xi as f64 - p);
                    let plus_new = log_plus[ci] + inc - log_mgf(t, s, w, p);
                    let minus_new = log_minus[ci] - inc - log_mgf(t, -s, w, p);
                    *d +=
                        plus_new.exp() + minus_new.exp() - log_plus[ci].exp() - log_minus[ci].exp();
                }
            }
            if delta[0] <= delta[1] {
                0.0
            } else {
                1.0
            }
        };
        for &(ci, s) in &members[ei] {
            let t = ts[ci];
            let inc = t * s * w * (x - p);
            log_plus[ci] += inc - log_mgf(t, s, w, p);
            log_minus[ci] += -inc - log_mgf(t, -s, w, p);
        }
        counts[ei] = parts[ei].0 + x as u64;
    }
    // Every constraint must land within the additive budget.
    for c in constraints {
        let realized: f64 = c
            .terms
            .iter()
            .map(|&(ei, s)| s * w * counts[ei] as f64)
            .sum();
        if (realized - c.target).abs() > b * (1.0 + 1e-6) + 1e-12 {
            return Err(Error::Assertion(format!(
                "constraint {:?} missed: realized {realized} target {} budget {b}",
                c.key, c.target
            )));
        }
    }
    Ok(counts)
}

/// Steiner vertex ids for the balanced graph: originals keep 0..n, level-j
/// vertices start at offsets[j-1].
#[derive(Clone, Debug)]
pub struct BalancedGraph {
    pub graph: WeightedGraph,
    pub offsets: Vec<usize>,
    pub n_original: usize,
}

impl BalancedGraph {
    pub fn steiner_id(&self, level: usize, v: usize) -> usize {
        if level == 0 {
            v
        } else {
            self.offsets[level - 1] + v
        }
    }
}

/// The balanced Steiner graph: one path of degree-weighted edges per
/// original vertex, following its contractions up the hierarchy. No edges
/// between original vertices.
pub fn build_balanced(hierarchy: &ContractionHierarchy) -> BalancedGraph {
    let n0 = hierarchy.graph_at(0).vertex_count();
    let depth = hierarchy.depth();
    let mut offsets = Vec::with_capacity(depth);
    let mut next = n0;
    for j in 1..=depth {
        offsets.push(next);
        next += hierarchy.graph_at(j).vertex_count();
    }
    let mut edges = Vec::new();
    for j in 0..depth {
        let gj = hierarchy.graph_at(j);
        let map = &hierarchy.levels[j].map;
        for u in 0..gj.vertex_count() {
            let w = gj.weighted_degree(u);
            if w <= 0.0 {
                continue;
            }
            let from = if j == 0 { u } else { offsets[j - 1] + u };
            let to = offsets[j] + map[u];
            edges.push((from, to, w));
        }
    }
    let graph = WeightedGraph::new(next, edges).expect("balanced edges are valid");
    BalancedGraph {
        graph,
        offsets,
        n_original: n0,
    }
}

/// A multigraph of unit edges, stored as multiplicities per pair.
#[derive(Clone, Debug)]
pub struct UnitMultigraph {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    pub counts: Vec<u64>,
}

impl UnitMultigraph {
    fn from_map(n: usize, map: BTreeMap<(usize, usize), u64>) -> Self {
        let mut pairs = Vec::new();
        let mut counts = Vec::new();
        for ((u, v), c) in map {
            if c > 0 {
                pairs.push((u, v));
                counts.push(c);
            }
        }
        UnitMultigraph { n, pairs, counts }
    }

    pub fn total_units(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn degree_units(&self, v: usize) -> u64 {
        self.pairs
            .iter()
            .zip(&self.counts)
            .filter(|((a, b), _)| *a == v || *b == v)
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn boundary_units(&self, side: &VertexSet) -> u64 {
        self.pairs
            .iter()
            .zip(&self.counts)
            .filter(|(&(a, b), _)| side.contains(a) != side.contains(b))
            .map(|(_, &c)| c)
            .sum()
    }

    fn to_pair_map(&self) -> BTreeMap<(usize, usize), u64> {
        self.pairs
            .iter()
            .copied()
            .zip(self.counts.iter().copied())
            .collect()
    }
}

/// Overlay W * H and Z * X on the Steiner vertex set and replace every edge
/// by floor(w/W') parallel unit edges. Steiner degrees are made even here
/// (one extra unit on a chosen edge), which the later splitting relies on.
pub fn combine_and_discretize(
    g: &WeightedGraph,
    h_counts: &[u64],
    balanced: &BalancedGraph,
    params: &SparsifierParams,
) -> Result<UnitMultigraph> {
    if params.w_prime <= 0.0 {
        return Err(Error::ParameterRegime("unit weight is not positive".into()));
    }
    let n = balanced.graph.vertex_count();
    let mut map: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (ei, &(u, v, _)) in g.edges().iter().enumerate() {
        if u == v || h_counts[ei] == 0 {
            continue;
        }
        let units = (h_counts[ei] as f64 * params.w / params.w_prime).floor() as u64;
        if units > 0 {
            *map.entry((u.min(v), u.max(v))).or_insert(0) += units;
        }
    }
    for &(u, v, w) in balanced.graph.edges() {
        let units = (params.z * w / params.w_prime).floor() as u64;
        if units > 0 {
            *map.entry((u.min(v), u.max(v))).or_insert(0) += units;
        }
    }
    // Parity fix, bottom level up: odd Steiner vertices get one extra unit
    // on their upward path edge; the top vertex ends even automatically
    // whenever the original-vertex parities allow, else on its heaviest
    // incident pair.
    let mut degree = vec![0u64; n];
    for (&(u, v), &c) in &map {
        degree[u] += c;
        degree[v] += c;
    }
    let depth = balanced.offsets.len();
    for j in 1..=depth {
        let gj_count = if j == depth {
            n - balanced.offsets[j - 1]
        } else {
            balanced.offsets[j] - balanced.offsets[j - 1]
        };
        for v in 0..gj_count {
            let id = balanced.offsets[j - 1] + v;
            if degree[id].is_multiple_of(2) {
                continue;
            }
            // Upward edge when it exists, else any incident pair.
            let up = map
                .keys()
                .find(|&&(a, b)| (a == id && b > id) || (b == id && a > id))
                .copied()
                .or_else(|| map.keys().find(|&&(a, b)| a == id || b == id).copied());
            if let Some(key) = up {
                *map.get_mut(&key).unwrap() += 1;
                degree[key.0] += 1;
                degree[key.1] += 1;
            }
        }
    }
    Ok(UnitMultigraph::from_map(n, map))
}

fn steiner_min_cut(h: &UnitMultigraph, terminals: usize) -> f64 {
    // Min over t of maxflow(t0, t) among the first `terminals` vertices
    // that still carry edges.
    let mut active: Vec<usize> = (0..terminals)
        .filter(|&v| h.pairs.iter().any(|&(a, b)| a == v || b == v))
        .collect();
    if active.len() < 2 {
        // Fewer than two terminals touched: treat isolated terminals as
        // separated by an empty cut.
        if (0..terminals).count() > active.len() {
            return 0.0;
        }
        active = (0..terminals).collect();
    }
    let s = active[0];
    let mut best = f64::INFINITY;
    for &t in active.iter().skip(1) {
        let mut mf = MaxFlow::new(h.n);
        for (&(u, v), &c) in h.pairs.iter().zip(&h.counts) {
            mf.add_undirected(u, v, c as f64);
        }
        best = best.min(mf.run(s, t));
    }
    best
}

/// Whether the Steiner minimum cut is still at least `floor`; each max-flow
/// stops as soon as the floor is certified.
fn steiner_min_at_least(h: &UnitMultigraph, terminals: usize, floor: f64) -> bool {
    let active: Vec<usize> = (0..terminals)
        .filter(|&v| h.pairs.iter().any(|&(a, b)| a == v || b == v))
        .collect();
    if active.len() < terminals {
        return floor <= 0.0;
    }
    if active.len() < 2 {
        return true;
    }
    let s = active[0];
    for &t in active.iter().skip(1) {
        let mut mf = MaxFlow::new(h.n);
        for (&(u, v), &c) in h.pairs.iter().zip(&h.counts) {
            mf.add_undirected(u, v, c as f64);
        }
        if mf.run_with_target(s, t, floor) + 1e-9 < floor {
            return false;
        }
    }
    true
}

/// Split off every Steiner vertex while preserving the Steiner minimum cut
/// exactly and never increasing any cut: repeatedly pair incident unit
/// edges, moving as many units as the Steiner minimum cut allows, verified
/// by max-flow checks; pendant bundles are deleted in pairs.
pub fn split_off(
    h: &UnitMultigraph,
    n_terminals: usize,
    budget: &mut Budget,
) -> Result<UnitMultigraph> {
    let mut map = h.to_pair_map();
    let c_star = steiner_min_cut(h, n_terminals);
    let steiner: Vec<usize> = (n_terminals..h.n).rev().collect();
    for &v in &steiner {
        loop {
            budget.charge(8, "split-off step")?;
            let incident: Vec<((usize, usize), u64)> = map
                .iter()
                .filter(|(&(a, b), &c)| (a == v || b == v) && c > 0)
                .map(|(&k, &c)| (k, c))
                .collect();
            if incident.is_empty() {
                break;
            }
            if incident.len() == 1 {
                // Pendant bundle: pairs split into loops and disappear; the
                // degree is even by construction so nothing is left behind.
                let (key, c) = incident[0];
                if !c.is_multiple_of(2) {
                    return Err(Error::Assertion(format!(
                        "odd pendant bundle of {c} units at steiner vertex {v}"
                    )));
                }
                map.remove(&key);
                continue;
            }
            // Heaviest two neighbors, ties toward smaller ids.
            let mut sorted = incident.clone();
            sorted.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let mut progressed = false;
            'pairs: for i in 0..sorted.len() {
                for j in i + 1..sorted.len() {
                    let (k1, c1) = sorted[i];
                    let (k2, c2) = sorted[j];
                    let u1 = if k1.0 == v { k1.1 } else { k1.0 };
                    let u2 = if k2.0 == v { k2.1 } else { k2.0 };
                    if u1 == u2 {
                        continue;
                    }
                    let full = c1.min(c2);
                    let admissible = |g_amt: u64, budget: &mut Budget| -> Result<bool> {
                        budget.charge(16 + map.len() as u64, "split-off check")?;
                        let mut trial = map.clone();
                        apply_split(&mut trial, v, u1, u2, g_amt);
                        Ok(steiner_min_at_least(
                            &UnitMultigraph::from_map(h.n, trial),
                            n_terminals,
                            c_star,
                        ))
                    };
                    // The full amount usually works; else binary search for
                    // the largest split preserving the Steiner minimum cut.
                    let mut lo = 0u64;
                    let mut hi = full;
                    if admissible(full, budget)? {
                        lo = full;
                    } else {
                        hi -= 1;
                        while lo < hi {
                            let mid = (lo + hi).div_ceil(2);
                            if admissible(mid, budget)? {
                                lo = mid;
                            } else {
                                hi = mid - 1;
                            }
                        }
                    }
                    if lo > 0 {
                        apply_split(&mut map, v, u1, u2, lo);
                        progressed = true;
                        break 'pairs;
                    }
                }
            }
            if !progressed {
                return Err(Error::Assertion(format!(
                    "no admissible split at steiner vertex {v}"
                )));
            }
        }
    }
    Ok(UnitMultigraph::from_map(h.n, map))
}

fn apply_split(map: &mut BTreeMap<(usize, usize), u64>, v: usize, u1: usize, u2: usize, g: u64) {
    let k1 = (v.min(u1), v.max(u1));
    let k2 = (v.min(u2), v.max(u2));
    *map.get_mut(&k1).unwrap() -= g;
    if map[&k1] == 0 {
        map.remove(&k1);
    }
    *map.get_mut(&k2).unwrap() -= g;
    if map[&k2] == 0 {
        map.remove(&k2);
    }
    if u1 != u2 {
        *map.entry((u1.min(u2), u1.max(u2))).or_insert(0) += g;
    }
}

/// Unweighted multigraph on the original vertices plus the unit weight.
#[derive(Clone, Debug)]
pub struct SkeletonGraph {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    pub counts: Vec<u64>,
    pub w_prime: f64,
}

impl SkeletonGraph {
    pub fn boundary_units(&self, side: &VertexSet) -> u64 {
        self.pairs
            .iter()
            .zip(&self.counts)
            .filter(|(&(a, b), _)| side.contains(a) != side.contains(b))
            .map(|(_, &c)| c)
            .sum()
    }

    /// W' times the unit count across the cut.
    pub fn scaled_boundary(&self, side: &VertexSet) -> f64 {
        self.boundary_units(side) as f64 * self.w_prime
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let g = self.to_weighted();
        g.is_connected()
    }

    pub fn to_weighted(&self) -> WeightedGraph {
        let edges = self
            .pairs
            .iter()
            .zip(&self.counts)
            .map(|(&(u, v), &c)| (u, v, c as f64))
            .collect();
        WeightedGraph::new(self.n, edges).expect("skeleton pairs are valid")
    }
}

/// Full pipeline: constraints, rounding, Steiner overlay, discretization,
/// splitting-off, restriction to the original vertex set.
pub fn build_skeleton(
    g: &WeightedGraph,
    hierarchy: &ContractionHierarchy,
    eps: f64,
    lambda_tilde: f64,
    d_cap: f64,
    budget: &mut Budget,
) -> Result<SkeletonGraph> {
    let (params, constraints) = derive_params(g, hierarchy, eps, lambda_tilde, d_cap)?;
    let h_counts = build_unbalanced(g, &params, &constraints, budget)?;
    let balanced = build_balanced(hierarchy);
    let combined = combine_and_discretize(g, &h_counts, &balanced, &params)?;
    let n0 = g.vertex_count();
    let split = split_off(&combined, n0, budget)?;
    // Restriction: every Steiner vertex must be isolated now.
    let mut map: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (&(u, v), &c) in split.pairs.iter().zip(&split.counts) {
        if u >= n0 || v >= n0 {
            return Err(Error::Assertion(format!(
                "steiner vertex survived splitting: pair ({u},{v})"
            )));
        }
        *map.entry((u, v)).or_insert(0) += c;
    }
    let restricted = UnitMultigraph::from_map(n0, map);
    Ok(SkeletonGraph {
        n: n0,
        pairs: restricted.pairs,
        counts: restricted.counts,
        w_prime: params.w_prime,
    })
}

/// A one-level hierarchy that contracts the whole graph at once; the
/// smallest complete hierarchy, used by tests and by callers whose
/// decomposition loop ended in a single step.
pub fn trivial_hierarchy(g: &WeightedGraph) -> ContractionHierarchy {
    let n = g.vertex_count();
    let clustering = crate::graph::Clustering::new(vec![VertexSet::full(n)]);
    let (top, map) = g.contract(&clustering).expect("single cluster is valid");
    ContractionHierarchy {
        levels: vec![crate::graph::HierarchyLevel {
            graph: g.clone(),
            clustering,
            map,
        }],
        top,
    }
}
