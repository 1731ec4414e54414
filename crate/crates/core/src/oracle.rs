//! Independent brute-force references: exhaustive cut enumeration, the
//! Stoer-Wagner exact minimum cut, an exact max-flow, exact isolating cuts,
//! and the strength verifier. These are kept deliberately separate from the
//! pipeline's own algorithms so the two routes share nothing beyond the
//! graph primitives.

use crate::graph::{VertexSet, Weight, WeightedGraph};
use crate::{approx_le, Error, Result};

/// Budgets above which the brute-force routines refuse to run.
#[derive(Clone, Debug)]
pub struct OracleBudget {
    pub max_n_exhaustive: usize,
    pub max_n_stoer_wagner: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_n_exhaustive: 14,
            max_n_stoer_wagner: 400,
        }
    }
}

/// Exact global minimum cut by Stoer-Wagner maximum-adjacency phases.
/// Disconnected input returns a zero cut. Ties are broken deterministically
/// by vertex id, and the returned side is the lexicographically smallest of
/// the two orientations of the best cut found.
pub fn stoer_wagner(g: &WeightedGraph) -> Result<(VertexSet, Weight)> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::Precondition("stoer_wagner requires n >= 2".into()));
    }
    if !g.is_connected() {
        let comp = g.component_of(0);
        return Ok((canonical_side(comp, n), 0.0));
    }
    // Dense weight matrix; merged vertices carry the union of originals.
    let mut w = vec![vec![0.0f64; n]; n];
    for &(u, v, wt) in g.edges() {
        if u != v {
            w[u][v] += wt;
            w[v][u] += wt;
        }
    }
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    while active.len() > 1 {
        // One maximum-adjacency phase from the smallest active vertex.
        let mut order = vec![active[0]];
        let mut in_a = vec![false; n];
        in_a[active[0]] = true;
        let mut attach: Vec<f64> = vec![0.0; n];
        for &v in &active {
            attach[v] = w[active[0]][v];
        }
        while order.len() < active.len() {
            let mut pick = usize::MAX;
            let mut best_w = f64::NEG_INFINITY;
            for &v in &active {
                if !in_a[v] && (attach[v] > best_w) {
                    best_w = attach[v];
                    pick = v;
                }
            }
            in_a[pick] = true;
            order.push(pick);
            for &v in &active {
                if !in_a[v] {
                    attach[v] += w[pick][v];
                }
            }
        }
        let t = *order.last().unwrap();
        let s = order[order.len() - 2];
        let cut_of_phase = attach[t];
        let candidate = groups[t].clone();
        match &best {
            Some((_, bw)) if *bw <= cut_of_phase => {}
            _ => best = Some((candidate, cut_of_phase)),
        }
        // Merge t into s.
        for &v in &active {
            if v != s && v != t {
                w[s][v] += w[t][v];
                w[v][s] = w[s][v];
            }
        }
        let moved = std::mem::take(&mut groups[t]);
        groups[s].extend(moved);
        active.retain(|&v| v != t);
    }
    let (side, value) = best.expect("at least one phase ran");
    Ok((canonical_side(VertexSet::from_iter(side), n), value))
}

/// Return whichever of `side` / complement is smaller, breaking ties toward
/// the lexicographically smaller set.
pub fn canonical_side(side: VertexSet, n: usize) -> VertexSet {
    let comp = side.complement(n);
    match side.len().cmp(&comp.len()) {
        std::cmp::Ordering::Less => side,
        std::cmp::Ordering::Greater => comp,
        std::cmp::Ordering::Equal => {
            if side < comp {
                side
            } else {
                comp
            }
        }
    }
}

/// All cuts with value <= alpha * lambda by scanning all 2^(n-1) subsets.
/// Sides are canonicalized (the side not containing the highest vertex).
pub fn enumerate_cuts_exhaustive(
    g: &WeightedGraph,
    alpha: f64,
    budget: &OracleBudget,
) -> Result<(Vec<VertexSet>, Weight)> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::Precondition("need n >= 2 to enumerate cuts".into()));
    }
    if n > budget.max_n_exhaustive {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive enumeration refuses n = {n} > {}",
            budget.max_n_exhaustive
        )));
    }
    // Precompute per-edge endpoint masks.
    let edges: Vec<(u32, u32, f64)> = g
        .edges()
        .iter()
        .filter(|&&(u, v, _)| u != v)
        .map(|&(u, v, w)| (u as u32, v as u32, w))
        .collect();
    let mut values = Vec::with_capacity(1 << (n - 1));
    let mut lambda = f64::INFINITY;
    for mask in 1u64..(1u64 << (n - 1)) {
        let mut cut = 0.0;
        for &(u, v, w) in &edges {
            let bu = (mask >> u) & 1;
            let bv = (mask >> v) & 1;
            if bu != bv {
                cut += w;
            }
        }
        values.push((mask, cut));
        if cut < lambda {
            lambda = cut;
        }
    }
    let mut cuts = Vec::new();
    for (mask, cut) in values {
        if approx_le(cut, alpha * lambda) {
            cuts.push(VertexSet::from_iter(
                (0..n - 1).filter(|&v| mask >> v & 1 == 1),
            ));
        }
    }
    Ok((cuts, lambda))
}

/// Exact minimum cut by exhaustive enumeration (small n only).
pub fn mincut_exhaustive(g: &WeightedGraph, budget: &OracleBudget) -> Result<(VertexSet, Weight)> {
    let (cuts, lambda) = enumerate_cuts_exhaustive(g, 1.0, budget)?;
    let side = cuts
        .into_iter()
        .map(|s| canonical_side(s, g.vertex_count()))
        .min()
        .expect("at least one cut");
    Ok((side, lambda))
}

/// Exhaustive check of the s-strong condition for a component: every cut S
/// of G with w(S, V\S) <= 1.1 * delta_tilde must overlap C by weighted
/// volume at most s on the smaller-overlap side.
pub fn verify_strength(
    g: &WeightedGraph,
    component: &VertexSet,
    s: f64,
    delta_tilde: f64,
    budget: &OracleBudget,
) -> Result<bool> {
    let n = g.vertex_count();
    if n > budget.max_n_exhaustive {
        return Err(Error::BudgetExceeded(format!(
            "verify_strength refuses n = {n} > {}",
            budget.max_n_exhaustive
        )));
    }
    if approx_le(g.volume(component), s) {
        return Ok(true);
    }
    for mask in 1u64..(1u64 << (n - 1)) {
        let side = VertexSet::from_iter((0..n - 1).filter(|&v| mask >> v & 1 == 1));
        if !approx_le(g.boundary_weight(&side), 1.1 * delta_tilde) {
            continue;
        }
        let inside = g.volume(&side.intersection(component));
        let outside = g.volume(&component.difference(&side));
        if !approx_le(inside.min(outside), s) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Exact max-flow (Dinic). Used by the oracles and by the isolating-cuts
// engine; deliberately unrelated to the Unit-Flow push-relabel code.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: f64,
    flow: f64,
}

/// A simple Dinic max-flow over f64 capacities.
#[derive(Clone, Debug)]
pub struct MaxFlow {
    arcs: Vec<Arc>,
    head: Vec<Vec<usize>>,
    eps: f64,
}

impl MaxFlow {
    pub fn new(n: usize) -> Self {
        MaxFlow {
            arcs: Vec::new(),
            head: vec![Vec::new(); n],
            eps: 1e-11,
        }
    }

    pub fn add_undirected(&mut self, u: usize, v: usize, cap: f64) {
        if u == v || cap <= 0.0 {
            return;
        }
        let a = self.arcs.len();
        self.arcs.push(Arc {
            to: v,
            cap,
            flow: 0.0,
        });
        self.arcs.push(Arc {
            to: u,
            cap,
            flow: 0.0,
        });
        self.head[u].push(a);
        self.head[v].push(a + 1);
    }

    fn residual(&self, idx: usize) -> f64 {
        // Undirected edge: residual = cap - flow, where the partner arc's
        // flow is the negative of ours.
        self.arcs[idx].cap - self.arcs[idx].flow
    }

    fn push(&mut self, idx: usize, amount: f64) {
        self.arcs[idx].flow += amount;
        self.arcs[idx ^ 1].flow -= amount;
    }

    /// Max flow from s to t; graph must not contain s == t.
    pub fn run(&mut self, s: usize, t: usize) -> f64 {
        self.run_with_target(s, t, f64::INFINITY)
    }

    /// Max flow from s to t, stopping early once `target` is reached.
    pub fn run_with_target(&mut self, s: usize, t: usize, target: f64) -> f64 {
        assert_ne!(s, t);
        let n = self.head.len();
        let mut total = 0.0;
        loop {
            // BFS levels.
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &ai in &self.head[v] {
                    let to = self.arcs[ai].to;
                    if level[to] == usize::MAX && self.residual(ai) > self.eps {
                        level[to] = level[v] + 1;
                        queue.push_back(to);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            // Blocking flow with current-arc pointers.
            let mut it = vec![0usize; n];
            loop {
                let pushed = self.dfs(s, t, f64::INFINITY, &level, &mut it);
                if pushed <= self.eps {
                    break;
                }
                total += pushed;
                if total >= target {
                    return total;
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, limit: f64, level: &[usize], it: &mut [usize]) -> f64 {
        if v == t {
            return limit;
        }
        while it[v] < self.head[v].len() {
            let ai = self.head[v][it[v]];
            let to = self.arcs[ai].to;
            if level[to] == level[v] + 1 && self.residual(ai) > self.eps {
                let pushed = self.dfs(to, t, limit.min(self.residual(ai)), level, it);
                if pushed > self.eps {
                    self.push(ai, pushed);
                    return pushed;
                }
            }
            it[v] += 1;
        }
        0.0
    }

    /// Vertices reachable from s in the residual network (the min-cut side).
    pub fn min_cut_side(&self, s: usize) -> VertexSet {
        let n = self.head.len();
        let mut seen = VertexSet::with_capacity(n);
        seen.insert(s);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &ai in &self.head[v] {
                let to = self.arcs[ai].to;
                if self.residual(ai) > 1e-9 && seen.insert(to) {
                    stack.push(to);
                }
            }
        }
        seen
    }
}

/// Exact minimum s-t cut value and the s-side.
pub fn min_st_cut(g: &WeightedGraph, s: usize, t: usize) -> (VertexSet, Weight) {
    let mut mf = MaxFlow::new(g.vertex_count());
    for &(u, v, w) in g.edges() {
        mf.add_undirected(u, v, w);
    }
    let value = mf.run(s, t);
    (mf.min_cut_side(s), value)
}

/// Exact minimum isolating cuts: for each terminal t_i, the minimum cut
/// separating it from the other terminals, with all returned sides pairwise
/// disjoint. Uses the standard divide-and-conquer over ceil(log2 k) terminal
/// bipartitions, each solved by exact max-flow.
pub fn exact_isolating_cuts(
    g: &WeightedGraph,
    terminals: &[usize],
) -> Result<Vec<(VertexSet, Weight)>> {
    let k = terminals.len();
    if k < 2 {
        return Err(Error::Precondition("need at least 2 terminals".into()));
    }
    let n = g.vertex_count();
    let bits = usize::BITS - (k - 1).leading_zeros();
    // Phase 1: bipartition cuts; collect all cut edges.
    let mut cut_edges: std::collections::BTreeSet<(usize, usize)> =
        std::collections::BTreeSet::new();
    for b in 0..bits {
        let xs: Vec<usize> = (0..k)
            .filter(|i| i >> b & 1 == 0)
            .map(|i| terminals[i])
            .collect();
        let ys: Vec<usize> = (0..k)
            .filter(|i| i >> b & 1 == 1)
            .map(|i| terminals[i])
            .collect();
        if xs.is_empty() || ys.is_empty() {
            continue;
        }
        // Super-source / super-sink max flow.
        let mut mf = MaxFlow::new(n + 2);
        for &(u, v, w) in g.edges() {
            mf.add_undirected(u, v, w);
        }
        let big = g.total_weight() * 4.0 + 1.0;
        for &x in &xs {
            mf.add_undirected(n, x, big);
        }
        for &y in &ys {
            mf.add_undirected(n + 1, y, big);
        }
        mf.run(n, n + 1);
        let side = mf.min_cut_side(n);
        for &(u, v, _) in g.edges() {
            if u != v && side.contains(u) != side.contains(v) {
                cut_edges.insert((u.min(v), u.max(v)));
            }
        }
    }
    // Phase 2: regions = components of G minus all bipartition cut edges.
    let kept: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .filter(|&&(u, v, _)| u == v || !cut_edges.contains(&(u.min(v), u.max(v))))
        .copied()
        .collect();
    let stripped = WeightedGraph::new(n, kept).expect("valid");
    let mut out = Vec::new();
    for (i, &t) in terminals.iter().enumerate() {
        let region = stripped.component_of(t);
        debug_assert!(terminals
            .iter()
            .enumerate()
            .all(|(j, &t2)| i == j || !region.contains(t2)));
        // Final: min cut between t and the contracted outside within region.
        let outside = region.complement(n);
        if outside.is_empty() {
            // Isolated whole graph: terminal's own component covers V, the
            // others were cut away entirely (disconnected inputs).
            out.push((region, 0.0));
            continue;
        }
        let mut mf = MaxFlow::new(n + 1);
        let big = g.total_weight() * 4.0 + 1.0;
        for &(u, v, w) in g.edges() {
            let iu = region.contains(u);
            let iv = region.contains(v);
            if u == v {
                continue;
            }
            match (iu, iv) {
                (true, true) => mf.add_undirected(u, v, w),
                (true, false) => mf.add_undirected(u, n, w),
                (false, true) => mf.add_undirected(v, n, w),
                (false, false) => {}
            }
        }
        // Outside terminals are merged into the contracted node with
        // infinite strength already; make sure the contracted node exists
        // even if region touches nothing.
        mf.add_undirected(n, outside.first().unwrap_or(0).min(n - 1), 0.0);
        let _ = big;
        let value = mf.run(t, n);
        let side = mf.min_cut_side(t).intersection(&region);
        out.push((side, value));
    }
    // Disjointness is structural (sides live in disjoint regions).
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complete, cycle, random_connected_graph, SplitMix64};

    #[test]
    fn stoer_wagner_small_cases() {
        let k4 = complete(4, 1.0);
        let (_, v) = stoer_wagner(&k4).unwrap();
        assert!(crate::approx_eq(v, 3.0));

        let path = WeightedGraph::new(4, vec![(0, 1, 3.0), (1, 2, 0.5), (2, 3, 2.0)]).unwrap();
        let (side, v) = stoer_wagner(&path).unwrap();
        assert!(crate::approx_eq(v, 0.5));
        assert_eq!(side.to_vec(), vec![0, 1]);

        let disc = WeightedGraph::new(4, vec![(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let (_, v) = stoer_wagner(&disc).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn stoer_wagner_matches_exhaustive() {
        let budget = OracleBudget::default();
        let mut rng = SplitMix64::new(2024);
        for trial in 0..500 {
            let n = 3 + rng.next_below(8);
            let g = random_connected_graph(&mut rng, n, 0.45, 1.0, 10.0);
            let (_, sw) = stoer_wagner(&g).unwrap();
            let (_, ex) = mincut_exhaustive(&g, &budget).unwrap();
            assert!(crate::approx_eq(sw, ex), "trial {trial}: sw={sw} ex={ex}");
        }
    }

    #[test]
    fn exhaustive_enumeration_examples() {
        let budget = OracleBudget::default();
        let single = WeightedGraph::new(2, vec![(0, 1, 2.0)]).unwrap();
        let (cuts, lambda) = enumerate_cuts_exhaustive(&single, 1.0, &budget).unwrap();
        assert_eq!(cuts.len(), 1);
        assert!(crate::approx_eq(lambda, 2.0));

        // C6 at alpha = 1: exactly 15 = 6*5/2 minimum cuts (contiguous arcs).
        let c6 = cycle(6);
        let (cuts, lambda) = enumerate_cuts_exhaustive(&c6, 1.0, &budget).unwrap();
        assert!(crate::approx_eq(lambda, 2.0));
        assert_eq!(cuts.len(), 15);

        // K4 at alpha = 1: the 4 singleton cuts.
        let k4 = complete(4, 1.0);
        let (cuts, lambda) = enumerate_cuts_exhaustive(&k4, 1.0, &budget).unwrap();
        assert!(crate::approx_eq(lambda, 3.0));
        assert_eq!(cuts.len(), 4);
        assert!(cuts.iter().all(|c| c.len() == 1 || c.len() == 3));
    }

    #[test]
    fn max_flow_against_cuts() {
        let mut rng = SplitMix64::new(99);
        for _ in 0..40 {
            let n = 3 + rng.next_below(7);
            let g = random_connected_graph(&mut rng, n, 0.5, 1.0, 8.0);
            let s = 0;
            let t = n - 1;
            let (side, value) = min_st_cut(&g, s, t);
            assert!(side.contains(s) && !side.contains(t));
            // Flow value equals the boundary weight of the returned side.
            assert!(
                crate::approx_eq(value, g.boundary_weight(&side)),
                "flow {value} vs cut {}",
                g.boundary_weight(&side)
            );
            // And is at most any single-vertex cut.
            assert!(approx_le(value, g.weighted_degree(s)));
            assert!(approx_le(value, g.weighted_degree(t)));
        }
    }

    #[test]
    fn isolating_cuts_two_terminals_and_disjointness() {
        let mut rng = SplitMix64::new(123);
        for _ in 0..30 {
            let n = 4 + rng.next_below(7);
            let g = random_connected_graph(&mut rng, n, 0.5, 1.0, 6.0);
            let terminals = vec![0, 1, n - 1];
            let cuts = exact_isolating_cuts(&g, &terminals).unwrap();
            assert_eq!(cuts.len(), 3);
            for i in 0..3 {
                assert!(cuts[i].0.contains(terminals[i]));
                for j in i + 1..3 {
                    assert!(cuts[i].0.is_disjoint_from(&cuts[j].0));
                }
                // Value matches the boundary of the returned side.
                assert!(crate::approx_eq(cuts[i].1, g.boundary_weight(&cuts[i].0)));
                // Minimality vs exhaustive search over subsets containing
                // t_i and no other terminal.
                let mut best = f64::INFINITY;
                for mask in 1u64..(1 << n) {
                    let side = VertexSet::from_iter((0..n).filter(|&v| mask >> v & 1 == 1));
                    if side.contains(terminals[i])
                        && terminals
                            .iter()
                            .enumerate()
                            .all(|(j, &t)| j == i || !side.contains(t))
                    {
                        best = best.min(g.boundary_weight(&side));
                    }
                }
                assert!(
                    crate::approx_eq(cuts[i].1, best),
                    "terminal {i}: got {} want {best}",
                    cuts[i].1
                );
            }
        }
    }

    #[test]
    fn isolating_cuts_disconnected_terminals() {
        let g = WeightedGraph::new(4, vec![(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let cuts = exact_isolating_cuts(&g, &[0, 2]).unwrap();
        assert!(crate::approx_eq(cuts[0].1, 0.0));
        assert!(crate::approx_eq(cuts[1].1, 0.0));
    }

    #[test]
    fn verify_strength_examples() {
        let budget = OracleBudget::default();
        let g = complete(6, 1.0);
        let all = VertexSet::full(6);
        // Volume 30 <= s: trivially strong.
        assert!(verify_strength(&g, &all, 31.0, 5.0, &budget).unwrap());
        // A clique is s-strong for small s and delta close to lambda:
        // every cut of value <= 1.1 * 4.5 is a singleton cut.
        assert!(verify_strength(&g, &all, 5.0, 4.5, &budget).unwrap());
        // Planted violation: dumbbell with delta_tilde large enough to admit
        // the bridge cut, s smaller than a clique side's volume.
        let g = crate::rng::dumbbell(4, 1.0, 1.0);
        let all = VertexSet::full(8);
        assert!(!verify_strength(&g, &all, 3.0, 1.0, &budget).unwrap());
        // Subset of a strong component is strong (Fact 2.2).
        let g = complete(6, 1.0);
        let sub = VertexSet::from_iter([0, 1, 2]);
        assert!(verify_strength(&g, &sub, 5.0, 4.5, &budget).unwrap());
    }
}
