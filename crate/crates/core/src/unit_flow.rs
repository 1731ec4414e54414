//! Height-capped FIFO push-relabel ("Unit-Flow") with incremental sources
//! and level-cut extraction.
//!
//! Every vertex is a sink of capacity equal to its weighted degree, every
//! edge has capacity `U * w_e`, and vertex labels are capped at `h`. A node
//! that reaches label `h` with excess is parked and never re-queued. On
//! termination exactly one of three cases holds: all supply absorbed, all
//! sinks saturated, or a low-conductance level cut exists.

use crate::graph::{VertexSet, WeightedGraph};
use crate::{approx_ge, approx_le, Budget, Error, Result};
use std::collections::{BTreeMap, VecDeque};

/// Specification of one Unit-Flow problem.
#[derive(Clone, Debug)]
pub struct FlowSpec {
    pub graph: WeightedGraph,
    /// Initial source supply per vertex (sparse).
    pub source: Vec<(usize, f64)>,
    /// Label cap h; must be at least ln(vol(G)).
    pub height_cap: u32,
    /// Edge capacity factor U: edge e gets capacity U * w_e.
    pub capacity_factor: f64,
    /// Bound beta >= 2 with Delta(v) <= beta * d(v) for all v.
    pub beta: f64,
}

/// The trichotomy of outcomes.
#[derive(Clone, Debug)]
pub enum FlowCase {
    /// Case 1: a feasible flow; every unit of supply is absorbed.
    Absorbed,
    /// Case 2: not feasible, but every sink is saturated: f(v) >= d(v).
    Saturated,
    /// Case 3: a level cut with bounded conductance.
    Cut { side: VertexSet, excess: f64 },
}

impl FlowCase {
    pub fn is_cut(&self) -> bool {
        matches!(self, FlowCase::Cut { .. })
    }
}

/// Mutable Unit-Flow state; single-owner, resumable via `add_source`.
#[derive(Clone, Debug)]
pub struct UnitFlow {
    graph: WeightedGraph,
    // Merged non-loop edges: endpoints, capacity, signed flow (u -> v > 0).
    pair_u: Vec<usize>,
    pair_v: Vec<usize>,
    cap: Vec<f64>,
    flow: Vec<f64>,
    // Per-vertex incident pair indices in fixed order.
    padj: Vec<Vec<usize>>,
    current: Vec<usize>,
    label: Vec<u32>,
    delta: Vec<f64>,
    fv: Vec<f64>,
    h: u32,
    u_factor: f64,
    beta: f64,
    total_delta: f64,
    vol_total: f64,
    pub pushes: u64,
    pub relabels: u64,
}

impl UnitFlow {
    pub fn new(spec: FlowSpec) -> Result<Self> {
        let n = spec.graph.vertex_count();
        if !(spec.capacity_factor > 0.0 && spec.capacity_factor.is_finite()) {
            return Err(Error::Precondition(
                "capacity factor must be positive".into(),
            ));
        }
        if spec.beta < 2.0 {
            return Err(Error::Precondition("beta must be at least 2".into()));
        }
        let vol_total = spec.graph.volume_total();
        if vol_total > 1.0 && (spec.height_cap as f64) < vol_total.ln() {
            return Err(Error::Precondition(format!(
                "height cap {} below ln vol = {:.3}",
                spec.height_cap,
                vol_total.ln()
            )));
        }
        let mut delta = vec![0.0; n];
        for &(v, amt) in &spec.source {
            if v >= n || amt < 0.0 || !amt.is_finite() {
                return Err(Error::Precondition(format!(
                    "bad source entry ({v}, {amt})"
                )));
            }
            delta[v] += amt;
        }
        for v in 0..n {
            if !approx_le(delta[v], spec.beta * spec.graph.weighted_degree(v)) {
                return Err(Error::Precondition(format!(
                    "source at {v} exceeds beta * degree"
                )));
            }
        }
        // Merge parallel edges; drop self-loops (they carry no flow but do
        // count toward degrees / sink capacities via the graph itself).
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, w) in spec.graph.edges() {
            if u != v {
                *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
            }
        }
        let mut pair_u = Vec::with_capacity(merged.len());
        let mut pair_v = Vec::with_capacity(merged.len());
        let mut cap = Vec::with_capacity(merged.len());
        let mut padj = vec![Vec::new(); n];
        for (i, ((u, v), w)) in merged.into_iter().enumerate() {
            pair_u.push(u);
            pair_v.push(v);
            cap.push(spec.capacity_factor * w);
            padj[u].push(i);
            padj[v].push(i);
        }
        let total_delta: f64 = delta.iter().sum();
        let fv = delta.clone();
        let flow = vec![0.0; cap.len()];
        Ok(UnitFlow {
            graph: spec.graph,
            pair_u,
            pair_v,
            cap,
            flow,
            padj,
            current: vec![0; n],
            label: vec![0; n],
            delta,
            fv,
            h: spec.height_cap,
            u_factor: spec.capacity_factor,
            beta: spec.beta,
            total_delta,
            vol_total,
            pushes: 0,
            relabels: 0,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn height_cap(&self) -> u32 {
        self.h
    }

    pub fn capacity_factor(&self) -> f64 {
        self.u_factor
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn label(&self, v: usize) -> u32 {
        self.label[v]
    }

    /// f(v): supply ending at v.
    pub fn supply_at(&self, v: usize) -> f64 {
        self.fv[v]
    }

    /// min(f(v), d(v)): supply absorbed by the sink at v. Non-decreasing
    /// over the run and across incremental sources.
    pub fn absorbed_at(&self, v: usize) -> f64 {
        self.fv[v].min(self.graph.weighted_degree(v))
    }

    pub fn excess_at(&self, v: usize) -> f64 {
        (self.fv[v] - self.graph.weighted_degree(v)).max(0.0)
    }

    pub fn total_excess(&self) -> f64 {
        (0..self.graph.vertex_count())
            .map(|v| self.excess_at(v))
            .sum()
    }

    pub fn total_supply(&self) -> f64 {
        self.total_delta
    }

    fn eps(&self) -> f64 {
        1e-12 * (1.0 + self.total_delta)
    }

    fn residual_from(&self, pid: usize, v: usize) -> f64 {
        if self.pair_u[pid] == v {
            self.cap[pid] - self.flow[pid]
        } else {
            self.cap[pid] + self.flow[pid]
        }
    }

    fn other(&self, pid: usize, v: usize) -> usize {
        if self.pair_u[pid] == v {
            self.pair_v[pid]
        } else {
            self.pair_u[pid]
        }
    }

    /// Run push-relabel to termination with the current sources.
    pub fn run(&mut self, budget: &mut Budget) -> Result<FlowCase> {
        let n = self.graph.vertex_count();
        let eps = self.eps();
        let mut queue: VecDeque<usize> = VecDeque::new();
        let mut in_queue = vec![false; n];
        for v in 0..n {
            if self.label[v] < self.h && self.excess_at(v) > eps {
                queue.push_back(v);
                in_queue[v] = true;
            }
        }
        while let Some(v) = queue.pop_front() {
            in_queue[v] = false;
            if self.label[v] >= self.h {
                continue;
            }
            let label_before = self.label[v];
            loop {
                if self.excess_at(v) <= eps || self.label[v] != label_before {
                    break;
                }
                if self.padj[v].is_empty() {
                    // No edges: park by raising straight to h.
                    budget.charge(self.h as u64, "unit-flow relabel")?;
                    self.relabels += u64::from(self.h);
                    self.label[v] = self.h;
                    break;
                }
                let pid = self.padj[v][self.current[v]];
                let w = self.other(pid, v);
                if self.label[v] == self.label[w] + 1 && self.residual_from(pid, v) > eps {
                    // Push.
                    let amount = self.excess_at(v).min(self.residual_from(pid, v));
                    if self.pair_u[pid] == v {
                        self.flow[pid] += amount;
                    } else {
                        self.flow[pid] -= amount;
                    }
                    self.fv[v] -= amount;
                    self.fv[w] += amount;
                    self.pushes += 1;
                    budget.charge(1, "unit-flow push")?;
                    if self.label[w] < self.h && self.excess_at(w) > eps && !in_queue[w] {
                        queue.push_back(w);
                        in_queue[w] = true;
                    }
                } else if self.current[v] + 1 < self.padj[v].len() {
                    self.current[v] += 1;
                } else {
                    // Scanned the whole list: relabel.
                    self.current[v] = 0;
                    self.label[v] += 1;
                    self.relabels += 1;
                    budget.charge(1, "unit-flow relabel")?;
                }
            }
            if self.label[v] < self.h && self.excess_at(v) > eps && !in_queue[v] {
                queue.push_back(v);
                in_queue[v] = true;
            }
        }
        self.classify()
    }

    /// Incremental sources: extend Delta and resume from the prior labels
    /// and pre-flow. Previously absorbed supply stays absorbed; previously
    /// parked excess stays parked.
    pub fn add_source(&mut self, extra: &[(usize, f64)], budget: &mut Budget) -> Result<FlowCase> {
        for &(v, amt) in extra {
            if v >= self.graph.vertex_count() || amt < 0.0 || !amt.is_finite() {
                return Err(Error::Precondition(format!(
                    "bad source entry ({v}, {amt})"
                )));
            }
            if !approx_le(
                self.delta[v] + amt,
                self.beta * self.graph.weighted_degree(v),
            ) {
                return Err(Error::Precondition(format!(
                    "cumulative source at {v} exceeds beta * degree"
                )));
            }
        }
        for &(v, amt) in extra {
            self.delta[v] += amt;
            self.fv[v] += amt;
            self.total_delta += amt;
        }
        self.run(budget)
    }

    fn classify(&self) -> Result<FlowCase> {
        let n = self.graph.vertex_count();
        let eps_cls = 1e-9 * (1.0 + self.total_delta);
        let total_ex = self.total_excess();
        // Any leftover excess must be parked at height h.
        for v in 0..n {
            if self.excess_at(v) > eps_cls && self.label[v] != self.h {
                return Err(Error::Assertion(format!(
                    "excess at {v} with label {} < h",
                    self.label[v]
                )));
            }
        }
        if total_ex <= eps_cls {
            return Ok(FlowCase::Absorbed);
        }
        let saturated = (0..n).all(|v| approx_ge(self.fv[v], self.graph.weighted_degree(v)));
        if saturated {
            return Ok(FlowCase::Saturated);
        }
        let (side, excess) = self.extract_level_cut()?;
        Ok(FlowCase::Cut { side, excess })
    }

    /// Sweep the level sets S_i = {v : l(v) >= i} from h down to 1 and
    /// return the first with conductance at most 20 ln(vol)/h + beta/U,
    /// together with the total parked excess.
    pub fn extract_level_cut(&self) -> Result<(VertexSet, f64)> {
        let n = self.graph.vertex_count();
        let h = self.h as usize;
        let eps_cls = 1e-9 * (1.0 + self.total_delta);
        let has_top = (0..n).any(|v| self.label[v] == self.h && self.excess_at(v) > eps_cls);
        let has_bottom = (0..n).any(|v| self.graph.weighted_degree(v) > 0.0 && self.label[v] == 0);
        if !has_top || !has_bottom {
            return Err(Error::Precondition("not in cut case".into()));
        }
        // Volume per label and boundary weight per level in one pass.
        let mut vol_at = vec![0.0f64; h + 2];
        for v in 0..n {
            vol_at[self.label[v] as usize] += self.graph.weighted_degree(v);
        }
        // z[i] = total weight of edges crossing S_i.
        let mut zdiff = vec![0.0f64; h + 2];
        for pid in 0..self.cap.len() {
            let (lu, lv) = (
                self.label[self.pair_u[pid]] as usize,
                self.label[self.pair_v[pid]] as usize,
            );
            let (lo, hi) = (lu.min(lv), lu.max(lv));
            if lo != hi {
                let w = self.cap[pid] / self.u_factor;
                // Crossed by S_i for i in (lo, hi].
                zdiff[lo + 1] += w;
                zdiff[hi + 1] -= w;
            }
        }
        let mut z = vec![0.0f64; h + 2];
        for i in 1..=h {
            z[i] = z[i - 1] + zdiff[i];
        }
        let threshold =
            20.0 * self.vol_total.max(1.0).ln() / self.h as f64 + self.beta / self.u_factor;
        let mut vol_suffix = 0.0;
        let mut suffix_sets: Vec<f64> = vec![0.0; h + 2];
        for i in (1..=h).rev() {
            vol_suffix += vol_at[i];
            suffix_sets[i] = vol_suffix;
        }
        for i in (1..=h).rev() {
            let vs = suffix_sets[i];
            let denom = vs.min(self.vol_total - vs);
            if denom <= 0.0 {
                continue;
            }
            let phi = z[i] / denom;
            if approx_le(phi, threshold) {
                let side = VertexSet::from_iter((0..n).filter(|&v| self.label[v] as usize >= i));
                return Ok((side, self.total_excess()));
            }
        }
        Err(Error::Assertion(
            "no level cut met the conductance threshold".into(),
        ))
    }

    /// Structural invariants: capacity feasibility, source feasibility,
    /// conservation, label validity, and the label classes at termination.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.graph.vertex_count();
        let scale = 1.0 + self.total_delta;
        for pid in 0..self.cap.len() {
            if self.flow[pid].abs() > self.cap[pid] * (1.0 + 1e-9) {
                return Err(Error::Assertion(format!("capacity violated on pair {pid}")));
            }
        }
        let sum_fv: f64 = self.fv.iter().sum();
        if (sum_fv - self.total_delta).abs() > 1e-7 * scale {
            return Err(Error::Assertion(format!(
                "conservation violated: {sum_fv} vs {}",
                self.total_delta
            )));
        }
        for v in 0..n {
            if self.fv[v] < -1e-9 * scale {
                return Err(Error::Assertion(format!("negative supply at {v}")));
            }
        }
        // Label validity: positive residual from v to u implies
        // l(v) <= l(u) + 1; equivalently a 2-step drop means saturation.
        let eps = self.eps();
        for pid in 0..self.cap.len() {
            for (a, b) in [
                (self.pair_u[pid], self.pair_v[pid]),
                (self.pair_v[pid], self.pair_u[pid]),
            ] {
                if self.residual_from(pid, a) > eps && self.label[a] > self.label[b] + 1 {
                    return Err(Error::Assertion(format!(
                        "label validity violated on pair {pid}"
                    )));
                }
            }
        }
        // Label classes (termination only; harmless mid-run if quiescent).
        let tol = 1e-7 * scale;
        for v in 0..n {
            let d = self.graph.weighted_degree(v);
            let l = self.label[v];
            if l == self.h {
                if self.fv[v] < d - tol || self.fv[v] > (self.beta + self.u_factor) * d + tol {
                    return Err(Error::Assertion(format!("label-h class violated at {v}")));
                }
            } else if l >= 1 {
                if (self.fv[v] - d).abs() > tol {
                    return Err(Error::Assertion(format!("mid-label class violated at {v}")));
                }
            } else if self.fv[v] > d + tol {
                return Err(Error::Assertion(format!("label-0 class violated at {v}")));
            }
        }
        Ok(())
    }
}

/// One-shot run of Unit-Flow.
pub fn unit_flow(spec: FlowSpec, budget: &mut Budget) -> Result<(UnitFlow, FlowCase)> {
    let mut state = UnitFlow::new(spec)?;
    let case = state.run(budget)?;
    Ok((state, case))
}
