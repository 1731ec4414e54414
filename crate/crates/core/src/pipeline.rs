//! End-to-end driver: estimate the minimum cut within a factor of three,
//! sweep guesses over powers of 1.01, build the contraction hierarchy and
//! skeleton per guess, run the tree-packing dynamic program on the skeleton
//! with cut values read in the original graph, and return the best cut.
//!
//! Guesses that fail a parameter regime, exhaust their work budget, or rest
//! on machinery-trusted strength certificates are recorded and trigger an
//! oracle fallback under the desk profile; they are hard errors under the
//! paper profile.

use crate::graph::{Clustering, ContractionHierarchy, HierarchyLevel, VertexSet, WeightedGraph};
use crate::large_cluster::{large_cluster_decomposition, LargeConfig};
use crate::oracle::{canonical_side, stoer_wagner};
use crate::packing::{greedy_tree_packing, RespectingDp};
use crate::small_cluster::small_cluster_decomposition;
use crate::sparsifier::{build_skeleton, SkeletonGraph};
use crate::strong::{strong_partition, StrongConfig};
use crate::{approx_le, Budget, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Paper,
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub profile: Profile,
    /// Uncrossing accuracy; the full-scale default is 1/log^1.1 |V|.
    pub eps: f64,
    /// Overrides tau in the strength machinery.
    pub tau: Option<f64>,
    /// s0 = s0_mult * delta_tilde.
    pub s0_mult: f64,
    /// Refuse small-cluster decomposition beyond this many vertices.
    pub small_vertex_cap: usize,
    pub level_cap: usize,
    /// Deterministic per-guess work budget.
    pub guess_budget: u64,
    /// Worker threads for the guess loop.
    pub jobs: usize,
}

impl PipelineConfig {
    pub fn desk() -> Self {
        PipelineConfig {
            profile: Profile::Desk,
            eps: 0.1,
            tau: None,
            s0_mult: 40.0,
            small_vertex_cap: 14,
            level_cap: 40,
            guess_budget: 8_000_000,
            jobs: 1,
        }
    }

    pub fn paper(n: usize) -> Self {
        let ln = (n.max(3) as f64).ln();
        PipelineConfig {
            profile: Profile::Paper,
            eps: (1.0 / ln.powf(1.1)).min(0.1),
            tau: None,
            s0_mult: f64::NAN, // the 1e11 delta tau^2 default applies
            small_vertex_cap: usize::MAX,
            level_cap: 64,
            guess_budget: u64::MAX,
            jobs: 1,
        }
    }

    pub fn strong_config(&self, g: &WeightedGraph) -> StrongConfig {
        let mut cfg = match self.profile {
            Profile::Desk => StrongConfig::desk(g.edge_count()),
            Profile::Paper => StrongConfig::paper_profile(g.vertex_count(), g.edge_count()),
        };
        if let Some(tau) = self.tau {
            cfg.tau = tau;
        }
        cfg
    }

    pub fn s0(&self, cfg: &StrongConfig, delta_tilde: f64) -> f64 {
        if self.profile == Profile::Paper {
            cfg.default_s0(delta_tilde)
        } else if self.s0_mult.is_finite() {
            self.s0_mult * delta_tilde
        } else {
            cfg.default_s0(delta_tilde)
        }
    }
}

/// Deterministic (2+eps)-style lower-sandwich estimate lambda <= lambda0
/// <= 3 lambda: peel maximum-adjacency orderings, contracting certified
/// well-connected pairs, and take the smallest pendant-like (single
/// super-vertex) cut seen.
pub fn matula_estimate(g: &WeightedGraph) -> Result<(f64, VertexSet)> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::Precondition("estimate requires n >= 2".into()));
    }
    if !g.is_connected() {
        let comp = g.component_of(0);
        return Ok((0.0, canonical_side(comp, n)));
    }
    // Dense merged-weight matrix plus super-vertex groups.
    let mut w = vec![vec![0.0f64; n]; n];
    for &(u, v, wt) in g.edges() {
        if u != v {
            w[u][v] += wt;
            w[v][u] += wt;
        }
    }
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    let mut best_side: Vec<usize> = vec![0];
    while active.len() > 1 {
        // Pendant-like candidates: super-vertex degrees.
        for &v in &active {
            let deg: f64 = active.iter().map(|&u| w[v][u]).sum();
            if deg < best {
                best = deg;
                best_side = groups[v].clone();
            }
        }
        // Maximum-adjacency order; the final pair is certified to be at
        // least as connected as the last attachment value, so contracting
        // it never destroys a strictly smaller cut.
        let mut in_a = vec![false; n];
        in_a[active[0]] = true;
        let mut attach: Vec<f64> = vec![0.0; n];
        for &v in &active {
            attach[v] = w[active[0]][v];
        }
        let mut order = vec![active[0]];
        while order.len() < active.len() {
            let mut pick = usize::MAX;
            let mut bw = f64::NEG_INFINITY;
            for &v in &active {
                if !in_a[v] && attach[v] > bw {
                    bw = attach[v];
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
    Ok((best, canonical_side(VertexSet::from_iter(best_side), n)))
}

#[derive(Clone, Debug, Default)]
pub struct LevelStats {
    pub vertices: usize,
    pub volume: f64,
    pub cross_weight: f64,
    pub max_strong_vol: f64,
    pub max_small_vol: f64,
    pub cluster_count: usize,
    pub trusted_certificates: bool,
}

/// One decomposition level: strong partition, large-cluster refinement,
/// small-cluster refinement, contraction.
pub fn decompose_level(
    g_j: &WeightedGraph,
    lambda_tilde: f64,
    cfg: &PipelineConfig,
    budget: &mut Budget,
) -> Result<(Clustering, WeightedGraph, Vec<usize>, LevelStats)> {
    if g_j.vertex_count() < 2 {
        return Err(Error::Precondition(
            "decompose_level needs at least 2 vertices".into(),
        ));
    }
    let delta_tilde = lambda_tilde / 1.01;
    let strong_cfg = cfg.strong_config(g_j);
    let s0 = cfg.s0(&strong_cfg, delta_tilde);
    let eps = cfg.eps;
    let sp = strong_partition(g_j, delta_tilde, s0, &strong_cfg, budget)?;
    let trusted = sp.certificates.iter().all(|c| c.vacuous) || cfg.profile == Profile::Paper;
    let mut stats = LevelStats {
        vertices: g_j.vertex_count(),
        volume: g_j.volume_total(),
        cross_weight: sp.cross_weight,
        trusted_certificates: trusted,
        ..LevelStats::default()
    };
    let small_threshold = (10.0 * s0 / (eps * lambda_tilde)) * s0;
    let large_cfg = match cfg.profile {
        Profile::Desk => LargeConfig::desk(),
        Profile::Paper => LargeConfig::paper_profile(),
    };
    let mut final_clusters: Vec<VertexSet> = Vec::new();
    let eps_small = eps.min(0.01);
    for cert in &sp.certificates {
        let cluster = &cert.component;
        stats.max_strong_vol = stats.max_strong_vol.max(g_j.volume(cluster));
        let mut smalls: Vec<VertexSet> = Vec::new();
        if g_j.volume(cluster) > small_threshold {
            let dec = large_cluster_decomposition(
                g_j,
                cluster,
                eps.min(0.1),
                lambda_tilde,
                s0,
                &large_cfg,
                budget,
            )?;
            if !dec.a0.is_empty() {
                final_clusters.push(dec.a0.clone());
            }
            smalls.extend(dec.small);
        } else {
            smalls.push(cluster.clone());
        }
        for small in smalls {
            if small.len() > cfg.small_vertex_cap {
                return Err(Error::BudgetExceeded(format!(
                    "small cluster of {} vertices exceeds the cap {}",
                    small.len(),
                    cfg.small_vertex_cap
                )));
            }
            if small.len() <= 1 {
                stats.max_small_vol = stats.max_small_vol.max(g_j.volume(&small));
                final_clusters.push(small);
                continue;
            }
            let dec = small_cluster_decomposition(g_j, &small, eps_small, lambda_tilde, budget)?;
            for c in dec.clusters {
                stats.max_small_vol = stats.max_small_vol.max(g_j.volume(&c));
                final_clusters.push(c);
            }
        }
    }
    final_clusters.sort();
    let clustering = Clustering::new(final_clusters);
    let (next, map) = g_j.contract(&clustering)?;
    stats.cluster_count = clustering.clusters.len();
    Ok((clustering, next, map, stats))
}

/// Representation budget for the sparsifier: a bound on the total level
/// degree needed to rewrite a minimum cut as a symmetric difference of
/// pullbacks, from the per-level shift bounds of the decomposition.
pub fn representation_budget(
    cfg: &PipelineConfig,
    hierarchy: &ContractionHierarchy,
    level_stats: &[LevelStats],
    lambda_tilde: f64,
) -> f64 {
    let mut d_cap = 2.0 * lambda_tilde;
    for (j, st) in level_stats.iter().enumerate() {
        let strong_cfg = cfg.strong_config(hierarchy.graph_at(j));
        let s0 = cfg.s0(&strong_cfg, lambda_tilde / 1.01);
        d_cap += 3.0 * s0.min(st.max_strong_vol) + 3.0 * st.max_small_vol;
    }
    d_cap
}

/// The outcome of one guess.
#[derive(Clone, Debug)]
pub enum GuessOutcome {
    Computed {
        value: f64,
        side: VertexSet,
        degraded: bool,
        levels: usize,
    },
    Infeasible {
        reason: String,
    },
}

#[derive(Clone, Debug)]
pub struct GuessRecord {
    pub lambda_tilde: f64,
    pub outcome: GuessOutcome,
}

/// Run the full hierarchy + skeleton + dynamic program for one guess.
pub fn run_guess(g: &WeightedGraph, lambda_tilde: f64, cfg: &PipelineConfig) -> GuessRecord {
    let mut budget = Budget::new(cfg.guess_budget);
    match run_guess_inner(g, lambda_tilde, cfg, &mut budget) {
        Ok((value, side, degraded, levels)) => GuessRecord {
            lambda_tilde,
            outcome: GuessOutcome::Computed {
                value,
                side,
                degraded,
                levels,
            },
        },
        Err(e) => GuessRecord {
            lambda_tilde,
            outcome: GuessOutcome::Infeasible {
                reason: e.to_string(),
            },
        },
    }
}

fn run_guess_inner(
    g: &WeightedGraph,
    lambda_tilde: f64,
    cfg: &PipelineConfig,
    budget: &mut Budget,
) -> Result<(f64, VertexSet, bool, usize)> {
    let delta_tilde = lambda_tilde / 1.01;
    let min_deg = g.min_weighted_degree();
    if !approx_le(delta_tilde, min_deg) {
        return Err(Error::ParameterRegime(format!(
            "guess {lambda_tilde} puts delta above the minimum degree {min_deg}"
        )));
    }
    // When the whole graph is trivially strong (volume at most 2 s0) the
    // first level emits it as a single small cluster, so a vertex count
    // above the cap is decidable without running any flows.
    if cfg.profile == Profile::Desk && g.vertex_count() > cfg.small_vertex_cap {
        let strong_cfg = cfg.strong_config(g);
        let s0 = cfg.s0(&strong_cfg, delta_tilde);
        if approx_le(g.volume_total(), 2.0 * s0) {
            return Err(Error::BudgetExceeded(format!(
                "small cluster of {} vertices exceeds the cap {}",
                g.vertex_count(),
                cfg.small_vertex_cap
            )));
        }
    }
    let mut levels: Vec<HierarchyLevel> = Vec::new();
    let mut level_stats: Vec<LevelStats> = Vec::new();
    let mut current = g.clone();
    let mut degraded = false;
    while current.vertex_count() >= 2 {
        if levels.len() >= cfg.level_cap {
            return Err(Error::BudgetExceeded("level cap reached".into()));
        }
        let vol_before = current.volume_total();
        let (clustering, next, map, stats) = decompose_level(&current, lambda_tilde, cfg, budget)?;
        if !stats.trusted_certificates {
            degraded = true;
        }
        let shrunk = next.vertex_count() < current.vertex_count();
        if !shrunk {
            // Stalled level: contract everything in one final step and mark
            // the run; the skeleton's lower bound survives this, the upper
            // bound may not, which the degraded flag records.
            if cfg.profile == Profile::Paper {
                return Err(Error::Assertion("level failed to shrink the graph".into()));
            }
            degraded = true;
            let all = Clustering::new(vec![VertexSet::full(current.vertex_count())]);
            let (top, map) = current.contract(&all)?;
            level_stats.push(LevelStats {
                vertices: current.vertex_count(),
                volume: vol_before,
                cross_weight: 0.0,
                max_strong_vol: vol_before,
                max_small_vol: 0.0,
                cluster_count: 1,
                trusted_certificates: true,
            });
            levels.push(HierarchyLevel {
                graph: current,
                clustering: all,
                map,
            });
            current = top;
            break;
        }
        if cfg.profile == Profile::Paper && !approx_le(next.volume_total(), vol_before / 2.0) {
            return Err(Error::Assertion("volume failed to halve".into()));
        }
        levels.push(HierarchyLevel {
            graph: current,
            clustering,
            map,
        });
        level_stats.push(stats);
        current = next;
    }
    let hierarchy = ContractionHierarchy {
        levels,
        top: current,
    };
    let depth = hierarchy.depth();
    let d_cap = representation_budget(cfg, &hierarchy, &level_stats, lambda_tilde);
    let skeleton = build_skeleton(g, &hierarchy, cfg.eps, lambda_tilde, d_cap, budget)?;
    let (value, side) = karger_mincut_on_skeleton(&skeleton, g, budget)?;
    Ok((value, side, degraded, depth))
}

/// Karger's step on the skeleton: greedy tree packing over the unit
/// multiplicities, then for each support tree the minimum over all cuts
/// crossing at most two tree edges, with values evaluated in the original
/// weighted graph.
pub fn karger_mincut_on_skeleton(
    skeleton: &SkeletonGraph,
    g: &WeightedGraph,
    budget: &mut Budget,
) -> Result<(f64, VertexSet)> {
    let n = g.vertex_count();
    if !skeleton.is_connected() || skeleton.n != n {
        return Err(Error::Precondition("skeleton is disconnected".into()));
    }
    let weighted = skeleton.to_weighted();
    let within = VertexSet::full(n);
    let packing = greedy_tree_packing(&weighted, &within, 0.07, 0.41, 300_000, budget)?;
    if !packing.converged {
        return Err(Error::BudgetExceeded(
            "skeleton packing did not converge".into(),
        ));
    }
    let mut best = f64::INFINITY;
    let mut best_side = VertexSet::new();
    for tree in &packing.trees {
        budget.charge(32 + g.edge_count() as u64, "skeleton dynamic program")?;
        let tree_edges: Vec<(usize, usize)> = tree
            .iter()
            .map(|&ei| (packing.pairs[ei].0, packing.pairs[ei].1))
            .collect();
        let dp = RespectingDp::new(&tree_edges, g.edges(), n);
        let (value, side) = dp.best_cut();
        if value < best {
            best = value;
            best_side = side;
        }
    }
    if !best.is_finite() {
        return Err(Error::Assertion("dynamic program found no cut".into()));
    }
    Ok((best, canonical_side(best_side, n)))
}

#[derive(Clone, Debug)]
pub struct MinCutResult {
    pub value: f64,
    pub side: VertexSet,
    pub ledger: Vec<GuessRecord>,
    pub fallback_used: bool,
    pub lambda0: f64,
}

/// Exact deterministic minimum cut: guess loop, per-guess pipeline, oracle
/// fallback whenever any guess could not be trusted end to end.
pub fn min_cut(g: &WeightedGraph, cfg: &PipelineConfig) -> Result<MinCutResult> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::Precondition("minimum cut requires n >= 2".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let (lambda0, _) = matula_estimate(g)?;
    if lambda0 <= 0.0 {
        return Err(Error::Disconnected);
    }
    // Powers of 1.01 relative to lambda0 covering [lambda0/3, 1.01*lambda0],
    // both boundary powers included. Relative powers keep the returned cut
    // invariant under uniform weight scaling.
    let k_lo = -((3.0f64.ln() / 1.01f64.ln()).ceil() as i32);
    let k_hi = 1;
    let guesses: Vec<f64> = (k_lo..=k_hi).map(|k| lambda0 * 1.01f64.powi(k)).collect();
    let ledger: Vec<GuessRecord> = if cfg.jobs > 1 {
        run_guesses_parallel(g, &guesses, cfg)
    } else {
        guesses.iter().map(|&lt| run_guess(g, lt, cfg)).collect()
    };
    let mut best: Option<(f64, VertexSet)> = None;
    let mut fallback_needed = false;
    for rec in &ledger {
        match &rec.outcome {
            GuessOutcome::Computed {
                value,
                side,
                degraded,
                ..
            } => {
                if *degraded {
                    fallback_needed = true;
                }
                if best.as_ref().is_none_or(|b| *value < b.0) {
                    best = Some((*value, side.clone()));
                }
            }
            GuessOutcome::Infeasible { .. } => fallback_needed = true,
        }
    }
    if best.is_none() {
        fallback_needed = true;
    }
    let mut fallback_used = false;
    if fallback_needed {
        if cfg.profile == Profile::Paper {
            return Err(Error::Assertion(
                "paper profile forbids the oracle fallback".into(),
            ));
        }
        let (side, value) = stoer_wagner(g)?;
        fallback_used = true;
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, side));
        }
    }
    let (_, side) = best.expect("some cut was produced");
    // Report the exact value of the returned side.
    let side = canonical_side(side, n);
    let value = g.boundary_weight(&side);
    Ok(MinCutResult {
        value,
        side,
        ledger,
        fallback_used,
        lambda0,
    })
}

fn run_guesses_parallel(
    g: &WeightedGraph,
    guesses: &[f64],
    cfg: &PipelineConfig,
) -> Vec<GuessRecord> {
    let jobs = cfg.jobs.max(1).min(guesses.len().max(1));
    let mut out: Vec<Option<GuessRecord>> = vec![None; guesses.len()];
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<GuessRecord>>> = guesses
        .iter()
        .map(|_| std::sync::Mutex::new(None))
        .collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= guesses.len() {
                    break;
                }
                let rec = run_guess(g, guesses[i], cfg);
                *slots[i].lock().unwrap() = Some(rec);
            });
        }
    });
    for (i, slot) in slots.into_iter().enumerate() {
        out[i] = slot.into_inner().unwrap();
    }
    out.into_iter()
        .map(|r| r.expect("guess computed"))
        .collect()
}

/// Exhaustive per-level uncrossing audit: every cut of G_j with
/// boundary at most 1.01 lambda admits a union-of-clusters shift S' with
/// boundary at most (1 + 3 eps) times the original. Returns the largest
/// observed shifted volume vol(S xor S') for reporting.
pub fn audit_structure_level(
    g_j: &WeightedGraph,
    clustering: &Clustering,
    lambda: f64,
    eps: f64,
) -> Result<f64> {
    let n = g_j.vertex_count();
    if n > 14 {
        return Err(Error::BudgetExceeded(
            "structure audit is exhaustive; n <= 14".into(),
        ));
    }
    let k = clustering.clusters.len();
    if k > 16 {
        return Err(Error::BudgetExceeded(
            "structure audit needs <= 16 clusters".into(),
        ));
    }
    // Precompute all union-of-cluster candidates.
    let mut candidates: Vec<(VertexSet, f64)> = Vec::with_capacity(1 << k);
    for mask in 0u64..(1 << k) {
        let mut s = VertexSet::with_capacity(n);
        for (ci, cluster) in clustering.clusters.iter().enumerate() {
            if mask >> ci & 1 == 1 {
                for v in cluster.iter() {
                    s.insert(v);
                }
            }
        }
        let b = g_j.boundary_weight(&s);
        candidates.push((s, b));
    }
    let mut worst_shift = 0.0f64;
    for mask in 1u64..(1u64 << (n - 1)) {
        let s = VertexSet::from_iter((0..n - 1).filter(|&v| mask >> v & 1 == 1));
        let b = g_j.boundary_weight(&s);
        if !approx_le(b, 1.01 * lambda) {
            continue;
        }
        let mut found = None;
        for (cand, cb) in &candidates {
            if approx_le(*cb, (1.0 + 3.0 * eps) * b) {
                let shift = g_j.volume(&s.symmetric_difference(cand));
                let shift_c = g_j.volume(&s.symmetric_difference(&cand.complement(n)));
                let shift = shift.min(shift_c);
                if found.is_none_or(|f| shift < f) {
                    found = Some(shift);
                }
            }
        }
        match found {
            None => {
                return Err(Error::Assertion(format!(
                    "no non-crossing shift for cut {:?}",
                    s.to_vec()
                )))
            }
            Some(shift) => worst_shift = worst_shift.max(shift),
        }
    }
    Ok(worst_shift)
}
