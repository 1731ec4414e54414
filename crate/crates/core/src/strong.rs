//! Strength certification: staged, batched, excess-scaled flow problems that
//! either certify a component is s/2-strong or split it along a
//! low-conductance cut, iterated until every component is s0-strong.
//!
//! All flow quantities inside a stage are measured in that stage's unit;
//! sink capacities are weighted degrees and edge capacities are U_j * w_e,
//! so the numeric volume W_C doubles as the total sink capacity. Stage-L
//! units equal physical weight by the choice of L.

use crate::graph::{Clustering, VertexSet, WeightedGraph};
use crate::unit_flow::{FlowCase, FlowSpec, UnitFlow};
use crate::{approx_le, Budget, Error, Result};

/// Coefficients of the certification procedure. The `desk` profile scales
/// the full-scale constants down so the machinery executes nontrivially at
/// small sizes; assertions that rely on those magnitudes are gated on `paper`.
#[derive(Clone, Debug)]
pub struct StrongConfig {
    pub tau: f64,
    /// Stage-0 per-problem supply is `supply_coeff * delta_tilde * tau` units.
    pub supply_coeff: f64,
    /// U_0 = u0_coeff * tau^2.
    pub u0_coeff: f64,
    /// U_j = uj_coeff * tau for stages j >= 1 and the final flood.
    pub uj_coeff: f64,
    /// Successful batches required = ceil(batch_coeff * tau).
    pub batch_coeff: f64,
    /// Check-2 threshold = W_C / (excess_coeff * tau * (L+1)).
    pub excess_coeff: f64,
    /// Final-flood scale-down = pif_scale_coeff * tau.
    pub pif_scale_coeff: f64,
    /// Relatively balanced: min side volume >= W_C/(rb_coeff * tau^2 ln m).
    pub rb_coeff: f64,
    /// Height constant: h0 = ceil(height_coeff * tau^2 * ln m) for stage 0,
    /// h = ceil(height_coeff * tau * ln m) later. The conductance threshold
    /// of the level-cut sweep is 20 ln(vol)/h + beta/U, so the coefficient
    /// must be large enough for the threshold to sit well below 1.
    pub height_coeff: f64,
    /// Height constant of the final flood, whose cut only needs conductance
    /// at most tau; a small multiple of ln(vol) suffices.
    pub flood_height_coeff: f64,
    pub paper: bool,
    /// ln of the edge count of the original input graph (at least 1).
    pub ln_m_g: f64,
}

impl StrongConfig {
    pub fn desk(m_g: usize) -> Self {
        StrongConfig {
            tau: 2.0,
            supply_coeff: 1.0,
            u0_coeff: 40.0,
            uj_coeff: 10.0,
            batch_coeff: 2.0,
            excess_coeff: 200.0,
            pif_scale_coeff: 0.2,
            rb_coeff: 1.0,
            height_coeff: 50.0,
            flood_height_coeff: 4.0,
            paper: false,
            ln_m_g: (m_g.max(3) as f64).ln(),
        }
    }

    pub fn paper_profile(n: usize, m_g: usize) -> Self {
        StrongConfig {
            tau: ((n.max(3) as f64).ln().powi(3)).max(2.0),
            supply_coeff: 1e7,
            u0_coeff: 1e8,
            uj_coeff: 100.0,
            batch_coeff: 5000.0,
            excess_coeff: 1e6,
            pif_scale_coeff: 500.0,
            rb_coeff: 1.0,
            height_coeff: 4.0,
            flood_height_coeff: 4.0,
            paper: true,
            ln_m_g: (m_g.max(3) as f64).ln(),
        }
    }

    /// Default strength target: 10^11 delta tau^2 under the paper profile,
    /// 40 delta under the desk profile.
    pub fn default_s0(&self, delta_tilde: f64) -> f64 {
        if self.paper {
            1e11 * delta_tilde * self.tau * self.tau
        } else {
            40.0 * delta_tilde
        }
    }

    /// L: the smallest stage whose unit reaches 1, i.e. the number of
    /// halvings from the per-problem supply scale up to 2s.
    pub fn stage_count(&self, s: f64, delta_tilde: f64) -> u32 {
        let base = self.supply_coeff * delta_tilde * self.tau;
        let ratio = 2.0 * s / base;
        if ratio <= 1.0 {
            0
        } else {
            (ratio.log2().ceil() as u32).min(200)
        }
    }

    /// Stage unit mu_j = 2^(L-j); exact powers of two with mu_L = 1. The
    /// stage-0 per-problem supply is rounded down to 2s / 2^L so that the
    /// physical per-problem supply is exactly 2s at every stage.
    pub fn stage_unit(&self, s: f64, delta_tilde: f64, j: u32) -> f64 {
        let l = self.stage_count(s, delta_tilde);
        2f64.powi(l as i32 - j as i32)
    }

    /// Per-problem stage-0 supply in stage-0 units.
    pub fn stage0_supply(&self, s: f64, delta_tilde: f64) -> f64 {
        2.0 * s / 2f64.powi(self.stage_count(s, delta_tilde) as i32)
    }

    fn height0(&self, vol: f64) -> u32 {
        let base = (self.height_coeff * self.tau * self.tau * self.ln_m_g).ceil();
        (base.max(vol.max(1.0).ln().ceil() + 1.0)) as u32
    }

    fn height(&self, vol: f64) -> u32 {
        let base = (self.height_coeff * self.tau * self.ln_m_g).ceil();
        (base.max(vol.max(1.0).ln().ceil() + 1.0)) as u32
    }

    fn height_flood(&self, vol: f64) -> u32 {
        let base = (self.flood_height_coeff * self.tau * self.ln_m_g).ceil();
        (base.max(vol.max(1.0).ln().ceil() + 1.0)) as u32
    }
}

/// Attests that `component` is `s`-strong for `delta_tilde`. `vacuous` marks
/// certificates that hold unconditionally because the component's volume is
/// at most 2s (the smaller overlap side can never exceed s).
#[derive(Clone, Debug)]
pub struct StrengthCertificate {
    pub component: VertexSet,
    pub s: f64,
    pub delta_tilde: f64,
    pub vacuous: bool,
}

/// One stage-L-successful flow problem: its source vertex together with the
/// per-vertex absorbed amounts of its final stage (in physical units).
#[derive(Clone, Debug)]
pub struct EdgeBundle {
    pub center: usize,
    pub absorbed: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Default)]
pub struct BatchStats {
    pub problems_per_stage: Vec<u64>,
    pub batches_completed: u64,
    pub supplybound_violations: u64,
    pub saturated_anomalies: u64,
}

/// Outcome of the batched phase.
#[derive(Debug)]
pub enum BatchesOutcome {
    /// Every batch collected its quota of stage-L successes.
    SuccessAllBatches { bundles: Vec<EdgeBundle> },
    /// Check 2 fired: some aggregate flow accumulated too much excess and
    /// yielded a level cut.
    ExcessTriggered {
        stage: u32,
        batch: usize,
        side: VertexSet,
        excess: f64,
    },
}

/// Virtual source pool per the enough-sources assumption: heavy vertices
/// are split into virtual sources each reserving degree in [delta, 2*delta].
struct SourcePool {
    order: Vec<usize>,
    next: usize,
}

impl SourcePool {
    fn new(gc: &WeightedGraph, comp: &VertexSet, delta_tilde: f64) -> Self {
        let mut order = Vec::new();
        for v in comp.iter() {
            let k = (gc.weighted_degree(v) / delta_tilde).floor().max(1.0) as usize;
            for _ in 0..k {
                order.push(v);
            }
        }
        SourcePool { order, next: 0 }
    }

    fn draw(&mut self) -> Result<usize> {
        if self.next >= self.order.len() {
            return Err(Error::Assertion(
                "virtual source pool exhausted (sized to make this unreachable)".into(),
            ));
        }
        let v = self.order[self.next];
        self.next += 1;
        Ok(v)
    }
}

/// The batched, staged certification flows for one component at strength s.
pub fn run_batches(
    gc: &WeightedGraph,
    comp: &VertexSet,
    s: f64,
    delta_tilde: f64,
    cfg: &StrongConfig,
    budget: &mut Budget,
) -> Result<(BatchesOutcome, BatchStats)> {
    let w_c = gc.volume(comp);
    let members: Vec<usize> = comp.to_vec();
    let stage_l = cfg.stage_count(s, delta_tilde);
    debug_assert!(crate::approx_eq(
        cfg.stage_unit(s, delta_tilde, stage_l),
        1.0
    ));
    let supply0 = cfg.stage0_supply(s, delta_tilde);
    let quota = ((w_c / (10.0 * s)).ceil() as usize).max(1);
    let batches = ((cfg.batch_coeff * cfg.tau).ceil() as usize).max(1);
    let excess_threshold = w_c / (cfg.excess_coeff * cfg.tau * (stage_l as f64 + 1.0));
    let beta0 = (cfg.supply_coeff * cfg.tau).max(2.0);
    let mut stats = BatchStats {
        problems_per_stage: vec![0; stage_l as usize + 1],
        ..BatchStats::default()
    };
    let mut pool = SourcePool::new(gc, comp, delta_tilde);
    // Paper-profile cap on how many stage-0 problems a batch may draw.
    let stage0_cap = w_c / (1e11 * delta_tilde * cfg.tau * cfg.tau);

    let mut flow0 = UnitFlow::new(FlowSpec {
        graph: gc.clone(),
        source: vec![],
        height_cap: cfg.height0(w_c),
        capacity_factor: cfg.u0_coeff * cfg.tau * cfg.tau,
        beta: beta0,
    })?;
    let mut bundles = Vec::new();
    for batch_i in 0..batches {
        let mut stage_flows: Vec<Option<UnitFlow>> = (0..stage_l).map(|_| None).collect();
        let mut successes = 0usize;
        while successes < quota {
            let center = pool.draw()?;
            let mut carried: Vec<(usize, f64)> = vec![(center, supply0)];
            for j in 0..=stage_l {
                stats.problems_per_stage[j as usize] += 1;
                if cfg.paper && j == 0 && stats.problems_per_stage[0] as f64 > stage0_cap {
                    return Err(Error::Assertion(
                        "stage-0 flow-problem count exceeds its cap".into(),
                    ));
                }
                let flow: &mut UnitFlow = if j == 0 {
                    &mut flow0
                } else {
                    let slot = &mut stage_flows[(j - 1) as usize];
                    if slot.is_none() {
                        *slot = Some(UnitFlow::new(FlowSpec {
                            graph: gc.clone(),
                            source: vec![],
                            height_cap: cfg.height(w_c),
                            capacity_factor: cfg.uj_coeff * cfg.tau,
                            beta: 2.0,
                        })?);
                    }
                    slot.as_mut().unwrap()
                };
                // Total supply per shared copy should stay below half the
                // sink capacity; a hard error under the paper profile.
                let incoming: f64 = carried.iter().map(|c| c.1).sum();
                if !approx_le(flow.total_supply() + incoming, 0.5 * w_c) {
                    if cfg.paper {
                        return Err(Error::Assertion(
                            "aggregate supply exceeds half the sink capacity".into(),
                        ));
                    }
                    stats.supplybound_violations += 1;
                }
                let before: Vec<f64> = members.iter().map(|&v| flow.absorbed_at(v)).collect();
                let case = flow.add_source(&carried, budget)?;
                // Check 2 on the aggregate flow of this copy.
                if flow.total_excess() > excess_threshold {
                    flow.check_invariants()?;
                    match case {
                        FlowCase::Cut { side, excess } => {
                            return Ok((
                                BatchesOutcome::ExcessTriggered {
                                    stage: j,
                                    batch: batch_i,
                                    side,
                                    excess,
                                },
                                stats,
                            ));
                        }
                        FlowCase::Saturated => {
                            // Every sink saturated despite the excess; only
                            // reachable when the desk supply bound slipped.
                            stats.saturated_anomalies += 1;
                        }
                        FlowCase::Absorbed => {
                            return Err(Error::Assertion(
                                "excess above threshold in an absorbed flow".into(),
                            ));
                        }
                    }
                }
                let absorbed_delta: Vec<(usize, f64)> = members
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &v)| {
                        let d = flow.absorbed_at(v) - before[i];
                        if d > 1e-11 * (1.0 + supply0) {
                            Some((v, d))
                        } else {
                            None
                        }
                    })
                    .collect();
                let absorbed_total: f64 = absorbed_delta.iter().map(|a| a.1).sum();
                let ideal = 2f64.powi(j as i32) * supply0;
                let need = (1.0 - (j as f64 + 1.0) / (10.0 * (stage_l as f64 + 1.0))) * ideal;
                if !crate::approx_ge(absorbed_total, need) {
                    break; // unsuccessful at stage j; draw a new problem
                }
                if j == stage_l {
                    // Stage-L units are physical by the choice of L.
                    bundles.push(EdgeBundle {
                        center,
                        absorbed: absorbed_delta,
                    });
                    successes += 1;
                } else {
                    carried = absorbed_delta.iter().map(|&(v, a)| (v, 2.0 * a)).collect();
                }
            }
        }
        stats.batches_completed += 1;
    }
    Ok((BatchesOutcome::SuccessAllBatches { bundles }, stats))
}

/// Aggregate the stage-L bundles into the final flood problem: scale the
/// absorbed supply down by pif_scale_coeff * tau, check the totals, and set
/// up the flow spec.
pub fn build_pi_f(
    gc: &WeightedGraph,
    comp: &VertexSet,
    bundles: &[EdgeBundle],
    s: f64,
    _delta_tilde: f64,
    cfg: &StrongConfig,
) -> Result<FlowSpec> {
    let w_c = gc.volume(comp);
    let quota = ((w_c / (10.0 * s)).ceil() as usize).max(1);
    let batches = ((cfg.batch_coeff * cfg.tau).ceil() as usize).max(1);
    if bundles.len() < quota * batches {
        return Err(Error::Precondition(format!(
            "need {} bundles, have {}",
            quota * batches,
            bundles.len()
        )));
    }
    let scale = cfg.pif_scale_coeff * cfg.tau;
    let n = gc.vertex_count();
    let mut delta = vec![0.0f64; n];
    for b in bundles {
        for &(v, a) in &b.absorbed {
            delta[v] += a / scale;
        }
    }
    let total: f64 = delta.iter().sum();
    if !crate::approx_ge(total, w_c) {
        return Err(Error::Assertion(format!(
            "flood supply {total} does not exceed sink capacity {w_c}"
        )));
    }
    let beta = cfg.batch_coeff / cfg.pif_scale_coeff;
    for v in comp.iter() {
        if !approx_le(delta[v], beta * gc.weighted_degree(v)) {
            return Err(Error::Assertion(format!(
                "flood supply at {v} exceeds {beta} times its degree"
            )));
        }
    }
    Ok(FlowSpec {
        graph: gc.clone(),
        source: (0..n)
            .filter(|&v| delta[v] > 0.0)
            .map(|v| (v, delta[v]))
            .collect(),
        height_cap: cfg.height_flood(w_c),
        capacity_factor: cfg.uj_coeff * cfg.tau,
        beta: beta.max(2.0),
    })
}

/// Result of one certification round on an s-strong component.
#[derive(Debug)]
pub enum CertifyOutcome {
    /// The whole component is s/2-strong.
    Certified,
    /// The returned side is s/2-strong; split along it.
    LargeSideCertified(VertexSet),
    /// A relatively balanced low-conductance cut; both sides stay s-strong.
    BalancedCut(VertexSet),
}

/// Either certify `comp` is s/2-strong or find a cut per the two checks.
pub fn certify_or_cut(
    gc: &WeightedGraph,
    comp: &VertexSet,
    s: f64,
    delta_tilde: f64,
    cfg: &StrongConfig,
    budget: &mut Budget,
    stats: &mut StrongStats,
) -> Result<CertifyOutcome> {
    let w_c = gc.volume(comp);
    if approx_le(w_c, s) {
        // The smaller overlap side of any cut is at most vol/2 <= s/2.
        return Ok(CertifyOutcome::Certified);
    }
    let (outcome, bstats) = run_batches(gc, comp, s, delta_tilde, cfg, budget)?;
    stats.absorb_batch(&bstats);
    match outcome {
        BatchesOutcome::ExcessTriggered { side, .. } => {
            stats.excess_cuts += 1;
            Ok(CertifyOutcome::BalancedCut(side))
        }
        BatchesOutcome::SuccessAllBatches { bundles } => {
            let spec = build_pi_f(gc, comp, &bundles, s, delta_tilde, cfg)?;
            let mut flood = UnitFlow::new(spec)?;
            let case = flood.run(budget)?;
            flood.check_invariants()?;
            match case {
                FlowCase::Absorbed => Err(Error::Assertion(
                    "flood absorbed although its supply exceeds all sinks".into(),
                )),
                FlowCase::Saturated => {
                    stats.certified_rounds += 1;
                    Ok(CertifyOutcome::Certified)
                }
                FlowCase::Cut { side, .. } => {
                    // Every vertex of the returned side is saturated, so the
                    // side inherits the s/2 certificate.
                    for v in side.iter() {
                        if !crate::approx_ge(flood.supply_at(v), gc.weighted_degree(v)) {
                            return Err(Error::Assertion(
                                "flood cut side contains an unsaturated vertex".into(),
                            ));
                        }
                    }
                    stats.flood_cuts += 1;
                    Ok(CertifyOutcome::LargeSideCertified(side))
                }
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct StrongStats {
    pub problems_per_stage: Vec<u64>,
    pub batches_completed: u64,
    pub supplybound_violations: u64,
    pub saturated_anomalies: u64,
    pub excess_cuts: u64,
    pub flood_cuts: u64,
    pub certified_rounds: u64,
    pub trivial_emits: u64,
    pub certified_emits: u64,
    /// Total self-loop weight added by duplicating cut edges on both sides.
    pub duplicated_loop_weight: f64,
    /// Smallest observed balance of an excess-triggered cut, measured as
    /// min-side volume times tau^2 ln m over W_C (the hidden constant of
    /// the relatively-balanced guarantee).
    pub excess_cut_min_balance: f64,
}

impl StrongStats {
    fn absorb_batch(&mut self, b: &BatchStats) {
        if self.problems_per_stage.len() < b.problems_per_stage.len() {
            self.problems_per_stage
                .resize(b.problems_per_stage.len(), 0);
        }
        for (i, &c) in b.problems_per_stage.iter().enumerate() {
            self.problems_per_stage[i] += c;
        }
        self.batches_completed += b.batches_completed;
        self.supplybound_violations += b.supplybound_violations;
        self.saturated_anomalies += b.saturated_anomalies;
    }
}

#[derive(Debug)]
pub struct StrongPartition {
    pub clustering: Clustering,
    pub certificates: Vec<StrengthCertificate>,
    pub cross_weight: f64,
    /// Measured constant of the inter-cluster weight bound: cross weight
    /// divided by sqrt(delta/s0) * ln|V| * vol.
    pub cross_bound_ratio: f64,
    pub stats: StrongStats,
}

/// Partition the vertex set into s0-strong components for delta_tilde.
/// Components of volume at most s0 are certified trivially; larger ones go
/// through certify-or-cut rounds, splitting along returned cuts (cut edges
/// are duplicated as self-loops on both sides) until the certified strength
/// reaches s0.
pub fn strong_partition(
    g: &WeightedGraph,
    delta_tilde: f64,
    s0: f64,
    cfg: &StrongConfig,
    budget: &mut Budget,
) -> Result<StrongPartition> {
    if delta_tilde <= 0.0 {
        return Err(Error::Precondition("delta_tilde must be positive".into()));
    }
    let n = g.vertex_count();
    for v in 0..n {
        if !approx_le(delta_tilde, g.weighted_degree(v)) {
            return Err(Error::Precondition(format!(
                "delta_tilde {delta_tilde} exceeds the degree of vertex {v}"
            )));
        }
    }
    let mut stats = StrongStats::default();
    let mut work: Vec<(WeightedGraph, VertexSet, f64)> = g
        .connected_components()
        .into_iter()
        .map(|comp| {
            let gc = g.loopy_subgraph(&comp);
            let s = gc.volume(&comp) / 2.0;
            (gc, comp, s)
        })
        .collect();
    let mut clusters: Vec<StrengthCertificate> = Vec::new();
    while let Some((gc, comp, s)) = work.pop() {
        let vol = gc.volume(&comp);
        if approx_le(vol, s0) || approx_le(s, s0) {
            let vacuous = approx_le(vol, 2.0 * s0);
            if approx_le(vol, s0) {
                stats.trivial_emits += 1;
            } else {
                stats.certified_emits += 1;
            }
            clusters.push(StrengthCertificate {
                component: comp,
                s: s0,
                delta_tilde,
                vacuous,
            });
            continue;
        }
        match certify_or_cut(&gc, &comp, s, delta_tilde, cfg, budget, &mut stats)? {
            CertifyOutcome::Certified => {
                work.push((gc, comp, s / 2.0));
            }
            CertifyOutcome::LargeSideCertified(side) => {
                record_cut_stats(&gc, &comp, &side, cfg, &mut stats, false);
                push_split(&gc, &comp, &side, s, Some(s / 2.0), &mut work);
            }
            CertifyOutcome::BalancedCut(side) => {
                record_cut_stats(&gc, &comp, &side, cfg, &mut stats, true);
                push_split(&gc, &comp, &side, s, None, &mut work);
            }
        }
    }
    if cfg.paper && stats.duplicated_loop_weight > 0.001 * g.volume_total() * (1.0 + crate::REL_TOL)
    {
        return Err(Error::Assertion(
            "duplicated cut-edge weight exceeds a thousandth of the volume".into(),
        ));
    }
    clusters.sort_by(|a, b| a.component.cmp(&b.component));
    let clustering = Clustering::new(clusters.iter().map(|c| c.component.clone()).collect());
    clustering.validate(n)?;
    // Inter-cluster weight in the original graph.
    let mut owner = vec![usize::MAX; n];
    for (ci, c) in clusters.iter().enumerate() {
        for v in c.component.iter() {
            owner[v] = ci;
        }
    }
    let cross_weight: f64 = g
        .edges()
        .iter()
        .filter(|&&(u, v, _)| u != v && owner[u] != owner[v])
        .map(|&(_, _, w)| w)
        .sum();
    let denom = (delta_tilde / s0).sqrt() * (n.max(2) as f64).ln() * g.volume_total();
    let cross_bound_ratio = if denom > 0.0 { cross_weight / denom } else { 0.0 };
    Ok(StrongPartition {
        clustering,
        certificates: clusters,
        cross_weight,
        cross_bound_ratio,
        stats,
    })
}

fn record_cut_stats(
    gc: &WeightedGraph,
    comp: &VertexSet,
    side: &VertexSet,
    cfg: &StrongConfig,
    stats: &mut StrongStats,
    excess_cut: bool,
) {
    let side = side.intersection(comp);
    let cut_w = gc.boundary_weight(&side);
    // Each cut edge becomes a self-loop on both sides.
    stats.duplicated_loop_weight += 2.0 * cut_w;
    if excess_cut {
        let w_c = gc.volume(comp);
        let min_side = gc.volume(&side).min(w_c - gc.volume(&side));
        let balance = min_side * cfg.tau * cfg.tau * cfg.ln_m_g / w_c.max(1e-300);
        if stats.excess_cut_min_balance == 0.0 || balance < stats.excess_cut_min_balance {
            stats.excess_cut_min_balance = balance;
        }
    }
}

/// Split a component along `side`, duplicating cut edges as self-loops on
/// both halves, and enqueue each connected piece. `side_strength` overrides
/// the generic min(s, vol/2) bound for pieces inside `side`.
fn push_split(
    gc: &WeightedGraph,
    comp: &VertexSet,
    side: &VertexSet,
    s: f64,
    side_strength: Option<f64>,
    work: &mut Vec<(WeightedGraph, VertexSet, f64)>,
) {
    let side = side.intersection(comp);
    let rest = comp.difference(&side);
    for (piece_host, strength_cap) in [(side, side_strength), (rest, None)] {
        if piece_host.is_empty() {
            continue;
        }
        let sub = gc.loopy_subgraph(&piece_host);
        for piece in sub.components_within(&piece_host) {
            let gpiece = sub.loopy_subgraph(&piece);
            let vol = gpiece.volume(&piece);
            let mut strength = s.min(vol / 2.0);
            if let Some(cap) = strength_cap {
                strength = strength.min(cap);
            }
            work.push((gpiece, piece, strength));
        }
    }
}
