//! Decomposition of a large strong cluster into a leftover piece plus small
//! clusters, such that low-volume near-minimum cuts can be uncrossed off the
//! leftover at a (1+eps) cost: coarse multigraph, forest packing, tree
//! partitioning, source stitching and exact isolating cuts.

use crate::graph::{VertexSet, WeightedGraph};
use crate::oracle::exact_isolating_cuts;
use crate::{approx_le, Budget, Error, Result};
use std::collections::BTreeMap;

/// Parameters of the large-cluster machinery that are profile-scaled.
#[derive(Clone, Debug)]
pub struct LargeConfig {
    /// K in the stitching step.
    pub k_param: usize,
    /// Cap on the number of cover pieces stitched into one source set.
    /// Full scale allows 2525 * K; the desk profile keeps enumeration tiny.
    pub stitch_cap: usize,
    /// Extra cycles through the source families beyond the log |A| default.
    pub extra_cycles: usize,
}

impl LargeConfig {
    pub fn desk() -> Self {
        LargeConfig {
            k_param: 10,
            stitch_cap: 4,
            extra_cycles: 0,
        }
    }

    pub fn paper_profile() -> Self {
        LargeConfig {
            k_param: 10,
            stitch_cap: 2525 * 10,
            extra_cycles: 0,
        }
    }
}

/// Unweighted multigraph with multiplicity floor(w_G(e)/W) per edge,
/// W = lambda^3 / (50 s0^2). Parallel copies are never materialized; the
/// packing tracks per-pair use counts instead.
#[derive(Clone, Debug)]
pub struct CoarseMultigraph {
    pub w_unit: f64,
    /// (u, v, multiplicity >= 1).
    pub pairs: Vec<(usize, usize, u64)>,
    /// Total number of parallel copies (the multigraph edge count).
    pub total_copies: u64,
}

pub fn coarse_multigraph(
    g: &WeightedGraph,
    a: &VertexSet,
    s0: f64,
    lambda_tilde: f64,
) -> CoarseMultigraph {
    let w_unit = lambda_tilde.powi(3) / (50.0 * s0 * s0);
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &(u, v, w) in g.edges() {
        if u != v && a.contains(u) && a.contains(v) {
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
    }
    let mut pairs = Vec::new();
    let mut total = 0u64;
    for ((u, v), w) in merged {
        let mult = (w / w_unit).floor() as u64;
        if mult >= 1 {
            pairs.push((u, v, mult));
            total += mult;
        }
    }
    CoarseMultigraph {
        w_unit,
        pairs,
        total_copies: total,
    }
}

/// Greedy minimum-spanning-forest packing on the coarse multigraph: lengths
/// start at 1, used copies inflate by 1.1, and tree edges longer than
/// e^5 m^6 are dropped. Copies of one pair are used round-robin, so the
/// minimum-use copy of a pair determines its current length.
#[derive(Clone, Debug)]
pub struct ForestPacking {
    /// Each forest is a list of pair indices.
    pub forests: Vec<Vec<usize>>,
    /// Maximum number of forests any single copy participates in.
    pub max_participation: u64,
    pub total_copies: u64,
}

pub fn forest_packing(
    h: &CoarseMultigraph,
    kappa: f64,
    budget: &mut Budget,
) -> Result<ForestPacking> {
    let m = h.total_copies;
    if m == 0 || h.pairs.is_empty() {
        return Ok(ForestPacking {
            forests: Vec::new(),
            max_participation: 0,
            total_copies: 0,
        });
    }
    let ln_m = (m as f64).ln().max(1.0);
    let rounds = (kappa * ln_m).ceil().max(1.0) as usize;
    // Length cap e^5 m^6 translates to a use-count cap.
    let use_cap = ((5.0 + 6.0 * (m as f64).ln()) / 1.1f64.ln()).floor() as u64;
    // Compact vertex ids.
    let mut ids: Vec<usize> = h.pairs.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index_of: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let k = ids.len();
    let mut uses = vec![0u64; h.pairs.len()];
    let mut order: Vec<usize> = (0..h.pairs.len()).collect();
    let mut forests = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        budget.charge(h.pairs.len() as u64 + 4, "forest packing round")?;
        // Kruskal keyed by the min-copy use count (monotone in length).
        order.sort_by_key(|&ei| (uses[ei] / h.pairs[ei].2, ei));
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        let mut forest = Vec::new();
        for &ei in &order {
            let (u, v, mult) = h.pairs[ei];
            let min_use = uses[ei] / mult;
            if min_use > use_cap {
                continue; // length above e^5 m^6: dropped from the tree
            }
            let (ru, rv) = (
                find(&mut parent, index_of[&u]),
                find(&mut parent, index_of[&v]),
            );
            if ru != rv {
                parent[ru] = rv;
                forest.push(ei);
            }
        }
        for &ei in &forest {
            uses[ei] += 1;
        }
        forest.sort_unstable();
        forests.push(forest);
    }
    let max_participation = h
        .pairs
        .iter()
        .enumerate()
        .map(|(ei, &(_, _, mult))| uses[ei].div_ceil(mult))
        .max()
        .unwrap_or(0);
    // Participation bound: every copy joins at most 100 ln m forests.
    if m >= 5 && max_participation as f64 > 100.0 * (m as f64).ln() {
        return Err(Error::Assertion(format!(
            "copy participation {max_participation} exceeds 100 ln m"
        )));
    }
    Ok(ForestPacking {
        forests,
        max_participation,
        total_copies: m,
    })
}

/// Break a tree into edge-disjoint pieces of host volume in (s0, 3 s0],
/// after removing vertices heavier than s0.
pub fn partition_tree(g: &WeightedGraph, tree_edges: &[(usize, usize)], s0: f64) -> Vec<VertexSet> {
    let mut verts: Vec<usize> = tree_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    verts.sort_unstable();
    verts.dedup();
    let keep: VertexSet = VertexSet::from_iter(
        verts
            .iter()
            .copied()
            .filter(|&v| g.weighted_degree(v) <= s0),
    );
    let kept_edges: Vec<(usize, usize)> = tree_edges
        .iter()
        .copied()
        .filter(|&(u, v)| keep.contains(u) && keep.contains(v))
        .collect();
    // Components of the remaining forest.
    let n = g.vertex_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &kept_edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut out = Vec::new();
    let mut seen = VertexSet::with_capacity(n);
    for &start in keep.to_vec().iter() {
        if seen.contains(start) {
            continue;
        }
        // Collect the component.
        let mut comp = vec![start];
        seen.insert(start);
        let mut qi = 0;
        while qi < comp.len() {
            let v = comp[qi];
            qi += 1;
            for &w in &adj[v] {
                if seen.insert(w) {
                    comp.push(w);
                }
            }
        }
        partition_component(g, &comp, &adj, s0, &mut out);
    }
    out
}

fn partition_component(
    g: &WeightedGraph,
    comp: &[usize],
    adj: &[Vec<usize>],
    s0: f64,
    out: &mut Vec<VertexSet>,
) {
    let vol: f64 = comp.iter().map(|&v| g.weighted_degree(v)).sum();
    if approx_le(vol, 3.0 * s0) {
        out.push(VertexSet::from_iter(comp.iter().copied()));
        return;
    }
    // Live tree state: vertex set and adjacency restricted to live vertices.
    let root = *comp.iter().min().unwrap();
    let mut live = VertexSet::from_iter(comp.iter().copied());
    loop {
        let live_vol: f64 = live.iter().map(|v| g.weighted_degree(v)).sum();
        if approx_le(live_vol, 3.0 * s0) {
            if !live.is_empty() {
                out.push(live.clone());
            }
            return;
        }
        // Rooted orientation over live vertices (root kept alive throughout).
        let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
        let mut order = vec![root];
        parent.insert(root, usize::MAX);
        let mut qi = 0;
        while qi < order.len() {
            let v = order[qi];
            qi += 1;
            for &w in &adj[v] {
                if live.contains(w) && !parent.contains_key(&w) {
                    parent.insert(w, v);
                    order.push(w);
                }
            }
        }
        // Subtree volumes in reverse BFS order.
        let mut subvol: BTreeMap<usize, f64> = BTreeMap::new();
        for &v in order.iter().rev() {
            let mut s = g.weighted_degree(v);
            for &w in &adj[v] {
                if live.contains(w) && parent.get(&w) == Some(&v) {
                    s += subvol[&w];
                }
            }
            subvol.insert(v, s);
        }
        // Lowest vertex whose subtree volume exceeds s0: scan BFS order
        // backwards (deepest last), ties resolved by scan position.
        let depth: BTreeMap<usize, usize> =
            order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let pivot = *order
            .iter()
            .filter(|&&v| subvol[&v] > s0)
            .max_by_key(|&&v| depth[&v])
            .expect("total volume exceeds 3 s0 > s0");
        let children: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&w| parent.get(&w) == Some(&pivot))
            .collect();
        let child_total: f64 = children.iter().map(|&w| subvol[&w]).sum();
        if approx_le(child_total, 2.0 * s0) {
            // Whole subtree at the pivot becomes a piece (volume <= 3 s0).
            let mut piece = VertexSet::singleton(pivot);
            collect_subtree(&children, &parent, &order, &mut piece);
            out.push(piece.clone());
            for v in piece.iter() {
                live.remove(v);
            }
            if live.is_empty() {
                return;
            }
        } else {
            // Take a prefix of child subtrees with volume in (s0, 2 s0].
            let mut acc = 0.0;
            let mut taken = Vec::new();
            for &w in &children {
                taken.push(w);
                acc += subvol[&w];
                if acc > s0 {
                    break;
                }
            }
            let mut piece = VertexSet::singleton(pivot);
            collect_subtree(&taken, &parent, &order, &mut piece);
            out.push(piece.clone());
            for v in piece.iter() {
                if v != pivot {
                    live.remove(v);
                }
            }
        }
    }
}

fn collect_subtree(
    roots: &[usize],
    parent: &BTreeMap<usize, usize>,
    order: &[usize],
    piece: &mut VertexSet,
) {
    let mut wanted: VertexSet = VertexSet::new();
    for &r in roots {
        wanted.insert(r);
    }
    // Order is BFS from the root, so parents precede children.
    for &v in order {
        if wanted.contains(v) {
            piece.insert(v);
        } else if let Some(&p) = parent.get(&v) {
            if p != usize::MAX && wanted.contains(p) {
                wanted.insert(v);
                piece.insert(v);
            }
        }
    }
}

/// Well-connected cover: forests of the coarse multigraph, each
/// broken into small-volume tree pieces.
pub fn build_cover(
    g: &WeightedGraph,
    a: &VertexSet,
    s0: f64,
    lambda_tilde: f64,
    budget: &mut Budget,
) -> Result<Vec<VertexSet>> {
    let h = coarse_multigraph(g, a, s0, lambda_tilde);
    let kappa = lambda_tilde / (25.0 * h.w_unit);
    let packing = forest_packing(&h, kappa, budget)?;
    let mut xs: std::collections::BTreeSet<VertexSet> = std::collections::BTreeSet::new();
    for forest in &packing.forests {
        let edges: Vec<(usize, usize)> = forest
            .iter()
            .map(|&ei| (h.pairs[ei].0, h.pairs[ei].1))
            .collect();
        xs.extend(partition_tree(g, &edges, s0));
    }
    Ok(xs.into_iter().collect())
}

/// Stitched source sets plus their vertex-disjoint families.
#[derive(Clone, Debug)]
pub struct SourceCollection {
    pub sets: Vec<VertexSet>,
    pub families: Vec<Vec<usize>>,
    pub max_membership: usize,
}

/// Build the auxiliary graph over cover pieces (overlap, or a connecting
/// edge of weight at least 3 gamma lambda^3 / s0^2), enumerate connected
/// subgraphs up to the cap, and color the unions into disjoint families.
pub fn stitch_sources(
    g: &WeightedGraph,
    _a: &VertexSet,
    xs: &[VertexSet],
    gamma: f64,
    s0: f64,
    lambda_tilde: f64,
    cfg: &LargeConfig,
    budget: &mut Budget,
) -> Result<SourceCollection> {
    let heavy = 3.0 * gamma * lambda_tilde.powi(3) / (s0 * s0);
    let nx = xs.len();
    let mut aux: Vec<Vec<usize>> = vec![Vec::new(); nx];
    for i in 0..nx {
        for j in i + 1..nx {
            budget.charge(1, "stitch adjacency")?;
            let connected = !xs[i].is_disjoint_from(&xs[j])
                || g.edges().iter().any(|&(u, v, w)| {
                    u != v
                        && w >= heavy
                        && ((xs[i].contains(u) && xs[j].contains(v))
                            || (xs[i].contains(v) && xs[j].contains(u)))
                });
            if connected {
                aux[i].push(j);
                aux[j].push(i);
            }
        }
    }
    // Effective cap: shrink the subgraph size whenever the enumeration
    // would blow up, deterministically from the degree of the aux graph.
    let max_deg = aux.iter().map(|l| l.len()).max().unwrap_or(0).max(1);
    let mut cap = cfg.stitch_cap.max(1);
    while cap > 1 && (nx as f64) * (max_deg as f64).powi(cap as i32 - 1) > 250_000.0 {
        cap -= 1;
    }
    // Enumerate connected subgraphs of size <= cap, each exactly once, by
    // growing from its minimum vertex using only larger vertices.
    let mut unions: std::collections::BTreeSet<VertexSet> = std::collections::BTreeSet::new();
    fn grow(
        aux: &[Vec<usize>],
        xs: &[VertexSet],
        members: &mut Vec<usize>,
        frontier: &[usize],
        minimum: usize,
        cap: usize,
        unions: &mut std::collections::BTreeSet<VertexSet>,
        budget: &mut Budget,
    ) -> Result<()> {
        budget.charge(1, "stitch enumeration")?;
        let mut uni = VertexSet::new();
        for &x in members.iter() {
            uni = uni.union(&xs[x]);
        }
        unions.insert(uni);
        if members.len() == cap {
            return Ok(());
        }
        for (fi, &f) in frontier.iter().enumerate() {
            members.push(f);
            let mut next: Vec<usize> = frontier[fi + 1..].to_vec();
            for &nb in &aux[f] {
                if nb > minimum && !members.contains(&nb) && !next.contains(&nb) {
                    next.push(nb);
                }
            }
            next.retain(|&v| !members.contains(&v));
            grow(aux, xs, members, &next, minimum, cap, unions, budget)?;
            members.pop();
        }
        Ok(())
    }
    for start in 0..nx {
        let frontier: Vec<usize> = aux[start].iter().copied().filter(|&v| v > start).collect();
        let mut members = vec![start];
        grow(
            &aux,
            xs,
            &mut members,
            &frontier,
            start,
            cap,
            &mut unions,
            budget,
        )?;
    }
    let sets: Vec<VertexSet> = unions.into_iter().collect();
    // Greedy coloring of the vertex-overlap conflict graph.
    let mut families: Vec<Vec<usize>> = Vec::new();
    let mut family_union: Vec<VertexSet> = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        budget.charge(1 + families.len() as u64, "stitch coloring")?;
        let mut placed = false;
        for (f, u) in family_union.iter_mut().enumerate() {
            if s.is_disjoint_from(u) {
                families[f].push(i);
                *u = u.union(s);
                placed = true;
                break;
            }
        }
        if !placed {
            families.push(vec![i]);
            family_union.push(s.clone());
        }
    }
    let mut membership: BTreeMap<usize, usize> = BTreeMap::new();
    for s in &sets {
        for v in s.iter() {
            *membership.entry(v).or_insert(0) += 1;
        }
    }
    let max_membership = membership.values().copied().max().unwrap_or(0);
    Ok(SourceCollection {
        sets,
        families,
        max_membership,
    })
}

/// Exact isolating cuts in the augmented graph: a sink anchor t* attached to
/// every vertex of A' with weight (eps lambda / 10 s0) d(v), and a terminal
/// t_i attached to each v in S_i with weight (1 - 2 eps) w(V \ A', v).
pub fn isolating_cuts(
    g: &WeightedGraph,
    a_prime: &VertexSet,
    sources: &[VertexSet],
    eps: f64,
    s0: f64,
    lambda_tilde: f64,
) -> Result<Vec<VertexSet>> {
    if eps > 0.1 + crate::REL_TOL {
        return Err(Error::Precondition("isolating cuts need eps <= 0.1".into()));
    }
    for (i, s) in sources.iter().enumerate() {
        if !s.is_subset_of(a_prime) {
            return Err(Error::Precondition("source set leaves the cluster".into()));
        }
        for t in sources.iter().skip(i + 1) {
            if !s.is_disjoint_from(t) {
                return Err(Error::Precondition("source sets overlap".into()));
            }
        }
    }
    let n = g.vertex_count();
    let k = sources.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let outside = a_prime.complement(n);
    let anchor_w = eps * lambda_tilde / (10.0 * s0);
    let mut edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .filter(|&&(u, v, _)| u != v && a_prime.contains(u) && a_prime.contains(v))
        .copied()
        .collect();
    let t_star = n + k;
    for v in a_prime.iter() {
        let w = anchor_w * g.weighted_degree(v);
        if w > 0.0 {
            edges.push((v, t_star, w));
        }
    }
    for (i, s) in sources.iter().enumerate() {
        for v in s.iter() {
            let w = (1.0 - 2.0 * eps) * g.weight_vertex_to_set(v, &outside);
            if w > 0.0 {
                edges.push((v, n + i, w));
            }
        }
    }
    let h = WeightedGraph::new(n + k + 1, edges)?;
    let terminals: Vec<usize> = (n..=n + k).collect();
    let cuts = exact_isolating_cuts(&h, &terminals)?;
    let mut out = Vec::with_capacity(k);
    for (i, (side, _)) in cuts.iter().enumerate().take(k) {
        let c: VertexSet = VertexSet::from_iter(side.iter().filter(|&v| v < n));
        // Property 1: volume bounded by the source volume.
        if !approx_le(
            g.volume(&c),
            (10.0 * s0 / (eps * lambda_tilde)) * g.volume(&sources[i]),
        ) {
            return Err(Error::Assertion(
                "isolating cut volume bound violated".into(),
            ));
        }
        // Property 2: internal boundary at most (1 - eps) of the outside tie.
        let internal = g.boundary_within(a_prime, &c);
        let outside_tie = g.weight_between(&c, &outside);
        if !approx_le(internal, (1.0 - eps) * outside_tie) {
            return Err(Error::Assertion(
                "isolating cut internal boundary exceeds (1-eps) outside tie".into(),
            ));
        }
        out.push(c);
    }
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if !out[i].is_disjoint_from(&out[j]) {
                return Err(Error::Assertion("isolating cuts overlap".into()));
            }
        }
    }
    Ok(out)
}

/// The large-cluster decomposition result.
#[derive(Clone, Debug)]
pub struct LargeDecomposition {
    pub a0: VertexSet,
    pub small: Vec<VertexSet>,
    pub inter_weight: f64,
}

/// The driver: build sources, color them into disjoint families, and cycle
/// isolating-cut rounds that peel small clusters off the cluster until the
/// leftover cannot host a cheap low-volume crossing cut.
pub fn large_cluster_decomposition(
    g: &WeightedGraph,
    a: &VertexSet,
    eps: f64,
    lambda_tilde: f64,
    s0: f64,
    cfg: &LargeConfig,
    budget: &mut Budget,
) -> Result<LargeDecomposition> {
    if !(eps > 0.0 && eps <= 0.1 + crate::REL_TOL) {
        return Err(Error::Precondition(
            "large cluster eps must be in (0, 0.1]".into(),
        ));
    }
    let gamma = eps * lambda_tilde / (100.0 * s0);
    let xs = build_cover(g, a, s0, lambda_tilde, budget)?;
    let sources = stitch_sources(g, a, &xs, gamma, s0, lambda_tilde, cfg, budget)?;
    let mut a_prime = a.clone();
    let mut small: Vec<VertexSet> = Vec::new();
    let boundary_a = g.boundary_weight(a);
    let cycles = ((a.len().max(2) as f64).log2().ceil() as usize).max(1) + cfg.extra_cycles;
    'outer: for _ in 0..cycles {
        for family in &sources.families {
            budget.charge(4, "isolating round")?;
            let live: Vec<VertexSet> = family
                .iter()
                .map(|&si| sources.sets[si].intersection(&a_prime))
                .filter(|s| !s.is_empty())
                .collect();
            if live.is_empty() {
                continue;
            }
            let before = g.boundary_weight(&a_prime);
            let cuts = isolating_cuts(g, &a_prime, &live, eps / 2.0, s0, lambda_tilde)?;
            let mut internal_sum = 0.0;
            let mut any = false;
            for c in cuts {
                if c.is_empty() {
                    continue;
                }
                // Property 1 of the decomposition, asserted literally.
                if !approx_le(g.volume(&c), (10.0 * s0 / (eps * lambda_tilde)) * s0) {
                    return Err(Error::Assertion(
                        "small-cluster volume bound violated".into(),
                    ));
                }
                internal_sum += g.boundary_within(&a_prime, &c);
                a_prime = a_prime.difference(&c);
                small.push(c);
                any = true;
            }
            if any {
                // Charging audit: the net boundary loss per round is at
                // least (eps/2) times the internal boundary removed.
                let after = g.boundary_weight(&a_prime);
                if !approx_le((eps / 2.0) * internal_sum, before - after) {
                    return Err(Error::Assertion(
                        "isolating round did not pay for its new boundary".into(),
                    ));
                }
            }
            if a_prime.is_empty() {
                break 'outer;
            }
        }
    }
    // Inter-cluster weight within the original cluster.
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for v in a_prime.iter() {
        owner.insert(v, usize::MAX);
    }
    for (ci, c) in small.iter().enumerate() {
        for v in c.iter() {
            owner.insert(v, ci);
        }
    }
    let inter_weight: f64 = g
        .edges()
        .iter()
        .filter(|&&(u, v, _)| {
            u != v && a.contains(u) && a.contains(v) && owner.get(&u) != owner.get(&v)
        })
        .map(|&(_, _, w)| w)
        .sum();
    if boundary_a > 0.0 && !approx_le(inter_weight, (2.0 / eps) * boundary_a) {
        return Err(Error::Assertion(format!(
            "inter-cluster weight {inter_weight} exceeds (2/eps) * boundary {boundary_a}"
        )));
    }
    small.sort();
    Ok(LargeDecomposition {
        a0: a_prime,
        small,
        inter_weight,
    })
}

/// Exhaustive verification of the uncrossing property: for every enumerated
/// set U inside `a` with small induced boundary and volume at most s0,
/// search for U* inside U minus A0 with
/// w(U \ U*, V \ A) + boundary_{G[A]}(U*) <= (1 + eps) boundary_{G[A]}(U).
pub fn verify_uncrossing_property(
    g: &WeightedGraph,
    a: &VertexSet,
    a0: &VertexSet,
    eps: f64,
    lambda_tilde: f64,
    s0: f64,
    budget: &mut Budget,
) -> Result<bool> {
    let candidates = enumerate_small_boundary_sets(g, a, lambda_tilde, budget)?;
    let outside = a.complement(g.vertex_count());
    for u in &candidates {
        if !approx_le(g.volume(u), s0) {
            continue;
        }
        let target = (1.0 + eps) * g.boundary_within(a, u);
        let free: Vec<usize> = u.difference(a0).to_vec();
        if free.len() > 22 {
            return Err(Error::BudgetExceeded(
                "uncrossing search space too large".into(),
            ));
        }
        let mut ok = false;
        for mask in 0..(1u64 << free.len()) {
            budget.charge(4, "uncrossing search")?;
            let u_star = VertexSet::from_iter(free.iter().enumerate().filter_map(|(i, &v)| {
                if mask >> i & 1 == 1 {
                    Some(v)
                } else {
                    None
                }
            }));
            let lost = u.difference(&u_star);
            let cost = g.weight_between(&lost, &outside) + g.boundary_within(a, &u_star);
            if approx_le(cost, target) {
                ok = true;
                break;
            }
        }
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All cuts U of G[a] with boundary at most 1.01 lambda_tilde, via the
/// enumeration machinery when the induced minimum cut allows it, plus an
/// exhaustive fallback for tiny clusters.
pub fn enumerate_small_boundary_sets(
    g: &WeightedGraph,
    a: &VertexSet,
    lambda_tilde: f64,
    budget: &mut Budget,
) -> Result<Vec<VertexSet>> {
    if a.len() < 2 {
        return Ok(Vec::new());
    }
    let induced = g.induced_subgraph(a);
    if a.len() <= 16 {
        let members = a.to_vec();
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << (members.len() - 1)) {
            budget.charge(2, "exhaustive small-boundary scan")?;
            let side = VertexSet::from_iter(members.iter().enumerate().filter_map(|(i, &v)| {
                if mask >> i & 1 == 1 {
                    Some(v)
                } else {
                    None
                }
            }));
            if approx_le(induced.boundary_within(a, &side), 1.01 * lambda_tilde) {
                let comp = a.difference(&side);
                out.push(side);
                out.push(comp);
            }
        }
        return Ok(out);
    }
    let coll = crate::small_cluster::enumerate_approx_mincuts(&induced, a, 2.1, budget)?;
    let mut out = Vec::new();
    for c in &coll.cuts {
        if approx_le(induced.boundary_within(a, c), 1.01 * lambda_tilde) {
            out.push(c.clone());
            out.push(a.difference(c));
        }
    }
    Ok(out)
}
