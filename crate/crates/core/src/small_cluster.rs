//! Cut enumeration and the two-stage refinement of small clusters, so that
//! every near-minimum cut restricted to a decomposed cluster admits a
//! witnessing partition whose parts it cannot cheaply cross.

use crate::graph::{Clustering, VertexSet, WeightedGraph};
use crate::packing::greedy_tree_packing;
use crate::{approx_le, Budget, Error, Result};
use std::collections::BTreeMap;

/// The canonical orientation of a cut inside `within`: whichever of the two
/// sides is lexicographically smaller.
pub fn canonical_cut(side: &VertexSet, within: &VertexSet) -> VertexSet {
    let side = side.intersection(within);
    let comp = within.difference(&side);
    if side <= comp {
        side
    } else {
        comp
    }
}

/// Every cut of value at most alpha times the minimum, deduplicated under
/// complementation. `values[i]` is the boundary of `cuts[i]` inside the
/// enumeration graph.
#[derive(Clone, Debug)]
pub struct CutCollection {
    pub cuts: Vec<VertexSet>,
    pub values: Vec<f64>,
    pub lambda: f64,
    pub alpha: f64,
}

impl CutCollection {
    pub fn contains(&self, side: &VertexSet, within: &VertexSet) -> bool {
        let c = canonical_cut(side, within);
        self.cuts.binary_search(&c).is_ok()
    }
}

/// Enumerate all alpha-approximate minimum cuts of the subgraph induced by
/// `within`: pack spanning trees greedily, then for each support tree try
/// every way to delete at most floor(2 alpha) tree edges and bipartition the
/// resulting components.
pub fn enumerate_approx_mincuts(
    g: &WeightedGraph,
    within: &VertexSet,
    alpha: f64,
    budget: &mut Budget,
) -> Result<CutCollection> {
    if alpha < 1.0 {
        return Err(Error::Precondition("alpha must be at least 1".into()));
    }
    let k = within.len();
    if k < 2 {
        return Err(Error::Precondition(
            "cut enumeration needs at least 2 vertices".into(),
        ));
    }
    let packing = greedy_tree_packing(g, within, 0.07, 0.42, 400_000, budget)?;
    if !packing.converged {
        return Err(Error::BudgetExceeded(
            "tree packing did not reach the witness value".into(),
        ));
    }
    let pairs = &packing.pairs;
    let members: Vec<usize> = within.to_vec();
    let index_of: BTreeMap<usize, usize> =
        members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // Pairs in compact index space, resolved once.
    let local_pairs: Vec<(usize, usize, f64)> = pairs
        .iter()
        .map(|&(u, v, w)| (index_of[&u], index_of[&v], w))
        .collect();
    let max_del = (2.0 * alpha).floor() as usize;
    // The packing's self-estimate is exact once the witness property holds,
    // so candidates above alpha times it can be dropped immediately.
    let mut best = packing.lambda_hat;
    let mut found: BTreeMap<VertexSet, f64> = BTreeMap::new();
    let mut deleted = vec![false; k];
    let mut comp_of = vec![usize::MAX; k];
    for tree in &packing.trees {
        let t = tree.len();
        // Iterate over all nonempty subsets of tree edges of size <= max_del
        // via bounded combinations.
        let mut choose: Vec<usize> = Vec::new();
        enumerate_combinations(
            t,
            max_del,
            &mut choose,
            &mut |dele: &[usize]| -> Result<()> {
                budget.charge(1 + k as u64, "cut enumeration case")?;
                // Components of the tree after deleting the chosen edges.
                let mut dsu = Dsu::new(k);
                deleted[..t].fill(false);
                for &d in dele {
                    deleted[d] = true;
                }
                for (i, &ei) in tree.iter().enumerate() {
                    if !deleted[i] {
                        let (u, v, _) = local_pairs[ei];
                        dsu.union(u, v);
                    }
                }
                comp_of[..k].fill(usize::MAX);
                let mut comps = 0usize;
                for i in 0..k {
                    let r = dsu.find(i);
                    if comp_of[r] == usize::MAX {
                        comp_of[r] = comps;
                        comps += 1;
                    }
                }
                let labels: Vec<usize> = (0..k).map(|i| comp_of[dsu.find(i)]).collect();
                // Quotient weights between components.
                let mut q = vec![0.0f64; comps * comps];
                for &(u, v, w) in &local_pairs {
                    let (a, b) = (labels[u], labels[v]);
                    if a != b {
                        q[a * comps + b] += w;
                        q[b * comps + a] += w;
                    }
                }
                // All bipartitions with the component of member 0 fixed aside.
                let anchor = labels[0];
                let free: Vec<usize> = (0..comps).filter(|&c| c != anchor).collect();
                for mask in 1u64..(1u64 << free.len()) {
                    let mut side_comps = vec![false; comps];
                    for (bi, &c) in free.iter().enumerate() {
                        if mask >> bi & 1 == 1 {
                            side_comps[c] = true;
                        }
                    }
                    let mut value = 0.0;
                    for a in 0..comps {
                        if side_comps[a] {
                            for b in 0..comps {
                                if !side_comps[b] {
                                    value += q[a * comps + b];
                                }
                            }
                        }
                    }
                    if value < best {
                        best = value;
                    }
                    if approx_le(value, alpha * best) {
                        let side = VertexSet::from_iter(
                            (0..k)
                                .filter(|&i| side_comps[labels[i]])
                                .map(|i| members[i]),
                        );
                        let c = canonical_cut(&side, within);
                        found.entry(c).or_insert(value);
                    }
                }
                Ok(())
            },
        )?;
    }
    let lambda = best;
    let mut cuts = Vec::new();
    let mut values = Vec::new();
    for (c, v) in found {
        if approx_le(v, alpha * lambda) {
            cuts.push(c);
            values.push(v);
        }
    }
    Ok(CutCollection {
        cuts,
        values,
        lambda,
        alpha,
    })
}

/// Per-call memo of alpha = 2.1 collections keyed by the part, so the
/// post-pass and second stage reuse the enumeration done for the same part.
#[derive(Default)]
struct EnumCache {
    map: BTreeMap<Vec<usize>, std::rc::Rc<CutCollection>>,
}

impl EnumCache {
    fn collection(
        &mut self,
        g: &WeightedGraph,
        part: &VertexSet,
        budget: &mut Budget,
    ) -> Result<std::rc::Rc<CutCollection>> {
        let key = part.to_vec();
        if let Some(hit) = self.map.get(&key) {
            return Ok(hit.clone());
        }
        let induced = g.induced_subgraph(part);
        let coll = std::rc::Rc::new(enumerate_approx_mincuts(&induced, part, 2.1, budget)?);
        self.map.insert(key, coll.clone());
        Ok(coll)
    }
}

fn enumerate_combinations<F: FnMut(&[usize]) -> Result<()>>(
    n: usize,
    max_size: usize,
    current: &mut Vec<usize>,
    f: &mut F,
) -> Result<()> {
    fn rec<F: FnMut(&[usize]) -> Result<()>>(
        start: usize,
        n: usize,
        left: usize,
        current: &mut Vec<usize>,
        f: &mut F,
    ) -> Result<()> {
        if !current.is_empty() {
            f(current)?;
        }
        if left == 0 {
            return Ok(());
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, left - 1, current, f)?;
            current.pop();
        }
        Ok(())
    }
    rec(0, n, max_size, current, f)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            false
        } else {
            self.parent[ra] = rb;
            true
        }
    }
}

/// First stage: split until every part either has boundary at most
/// 3 lambda_tilde or contains no (1-eps)-boundary-sparse set of small
/// internal boundary; then a post-pass forces induced minimum cut at least
/// 0.49 lambda_tilde in every part.
pub fn decompose_stage1(
    g: &WeightedGraph,
    a: &VertexSet,
    eps: f64,
    lambda_tilde: f64,
    budget: &mut Budget,
) -> Result<Clustering> {
    decompose_stage1_cached(g, a, eps, lambda_tilde, &mut EnumCache::default(), budget)
}

fn decompose_stage1_cached(
    g: &WeightedGraph,
    a: &VertexSet,
    eps: f64,
    lambda_tilde: f64,
    cache: &mut EnumCache,
    budget: &mut Budget,
) -> Result<Clustering> {
    let mut processed: Vec<VertexSet> = Vec::new();
    let mut queue: std::collections::VecDeque<VertexSet> =
        std::collections::VecDeque::from([a.clone()]);
    let phi = |parts: &[&VertexSet]| -> f64 {
        parts
            .iter()
            .map(|p| (g.boundary_weight(p) - 2.1 * lambda_tilde).max(0.0))
            .sum()
    };
    while let Some(part) = queue.pop_front() {
        budget.charge(8, "stage1 part")?;
        if part.len() <= 1 || approx_le(g.boundary_weight(&part), 3.0 * lambda_tilde) {
            processed.push(part);
            continue;
        }
        let induced = g.induced_subgraph(&part);
        // A disconnected part splits along a zero-weight internal cut.
        let comps = induced.components_within(&part);
        let split: Option<VertexSet> = if comps.len() > 1 {
            Some(comps[0].clone())
        } else {
            let coll = cache.collection(g, &part, budget)?;
            let min_cut_side = coll
                .cuts
                .iter()
                .zip(&coll.values)
                .map(|(c, &v)| (v, c))
                .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(y.1)))
                .map(|(v, c)| (v, c.clone()));
            match min_cut_side {
                Some((v, c)) if approx_le(v, 0.49 * lambda_tilde) => Some(c),
                _ => coll
                    .cuts
                    .iter()
                    .zip(&coll.values)
                    .find(|(c, &v)| {
                        approx_le(v, 1.01 * lambda_tilde)
                            && g.is_boundary_sparse(&part, c, 1.0 - eps)
                    })
                    .map(|(c, _)| c.clone()),
            }
        };
        match split {
            None => processed.push(part),
            Some(u) => {
                let rest = part.difference(&u);
                // Potential audit: Phi never increases; creating a part with
                // boundary at most 2.2 lambda drops it by Omega(eps lambda).
                let before = phi(&[&part]);
                let after = phi(&[&u, &rest]);
                if !approx_le(after, before) {
                    return Err(Error::Assertion("stage-1 potential increased".into()));
                }
                let bu = g.boundary_weight(&u);
                let br = g.boundary_weight(&rest);
                if bu.min(br) <= 2.2 * lambda_tilde {
                    let need = (0.01f64).min(0.49 * eps) * lambda_tilde;
                    if !crate::approx_ge(before - after, need) {
                        return Err(Error::Assertion(format!(
                            "stage-1 potential drop {} below {need}",
                            before - after
                        )));
                    }
                }
                queue.push_back(u);
                queue.push_back(rest);
            }
        }
    }
    // Property-3 post-pass: force induced minimum cut >= 0.49 lambda.
    let phi2 = |parts: &[&VertexSet]| -> f64 {
        parts
            .iter()
            .map(|p| g.boundary_weight(p) - 0.98 * lambda_tilde)
            .sum()
    };
    let mut final_parts: Vec<VertexSet> = Vec::new();
    let mut queue: std::collections::VecDeque<VertexSet> = processed.into();
    while let Some(part) = queue.pop_front() {
        budget.charge(8, "stage1 post-pass part")?;
        if part.len() <= 1 {
            final_parts.push(part);
            continue;
        }
        let induced = g.induced_subgraph(&part);
        let comps = induced.components_within(&part);
        let split: Option<VertexSet> = if comps.len() > 1 {
            Some(comps[0].clone())
        } else {
            let coll = cache.collection(g, &part, budget)?;
            if coll.lambda < 0.49 * lambda_tilde {
                coll.cuts
                    .iter()
                    .zip(&coll.values)
                    .map(|(c, &v)| (v, c))
                    .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(y.1)))
                    .map(|(_, c)| c.clone())
            } else {
                None
            }
        };
        match split {
            None => final_parts.push(part),
            Some(u) => {
                let rest = part.difference(&u);
                let before = phi2(&[&part]);
                let after = phi2(&[&u, &rest]);
                if !approx_le(after, before) {
                    return Err(Error::Assertion(
                        "stage-1 post-pass potential increased".into(),
                    ));
                }
                queue.push_back(u);
                queue.push_back(rest);
            }
        }
    }
    final_parts.sort();
    Ok(Clustering::new(final_parts))
}

/// The recursion tree of stage 2, kept so witnessing partitions can be
/// replayed for any candidate cut.
#[derive(Clone, Debug)]
pub struct Stage2Tree {
    nodes: Vec<Stage2Node>,
    root: usize,
}

#[derive(Clone, Debug)]
struct Stage2Node {
    set: VertexSet,
    children: Option<(usize, usize)>,
    /// Leaf order index (within the final decomposition) when a leaf.
    leaf: Option<usize>,
}

impl Stage2Tree {
    pub fn leaves(&self) -> Vec<VertexSet> {
        let mut out = Vec::new();
        self.collect_leaves(self.root, &mut out);
        out
    }

    fn collect_leaves(&self, node: usize, out: &mut Vec<VertexSet>) {
        match self.nodes[node].children {
            None => out.push(self.nodes[node].set.clone()),
            Some((l, r)) => {
                self.collect_leaves(l, out);
                self.collect_leaves(r, out);
            }
        }
    }

    /// Group leaves for the cut `s`: descend while s crosses the node
    /// sparsely, stop (and emit one part) as soon as s-cap-node is
    /// non-(1-eps)-boundary-sparse in the node.
    fn witness_groups(
        &self,
        g: &WeightedGraph,
        s: &VertexSet,
        eps: f64,
        node: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = &self.nodes[node];
        let stop = match n.children {
            None => true,
            Some(_) => {
                let overlap = s.intersection(&n.set);
                !g.is_boundary_sparse(&n.set, &overlap, 1.0 - eps)
            }
        };
        if stop {
            let mut leaves = Vec::new();
            self.collect_leaf_ids(node, &mut leaves);
            out.push(leaves);
        } else if let Some((l, r)) = n.children {
            self.witness_groups(g, s, eps, l, out);
            self.witness_groups(g, s, eps, r, out);
        }
    }

    fn collect_leaf_ids(&self, node: usize, out: &mut Vec<usize>) {
        match self.nodes[node].children {
            None => out.push(self.nodes[node].leaf.expect("leaf indexed")),
            Some((l, r)) => {
                self.collect_leaf_ids(l, out);
                self.collect_leaf_ids(r, out);
            }
        }
    }
}

/// Second stage per the pruning recursion: repeatedly split along surviving
/// enumerated cuts, preferring those with small internal boundary, else the
/// crossing cut with the smallest intersection.
pub fn decompose_stage2(
    g: &WeightedGraph,
    a: &VertexSet,
    eps: f64,
    lambda_tilde: f64,
    budget: &mut Budget,
) -> Result<Stage2Tree> {
    decompose_stage2_cached(g, a, eps, lambda_tilde, &mut EnumCache::default(), budget)
}

fn decompose_stage2_cached(
    g: &WeightedGraph,
    a: &VertexSet,
    eps: f64,
    lambda_tilde: f64,
    cache: &mut EnumCache,
    budget: &mut Budget,
) -> Result<Stage2Tree> {
    if !approx_le(g.boundary_weight(a), 3.0 * lambda_tilde) {
        return Err(Error::Precondition(
            "stage 2 requires boundary <= 3 lambda".into(),
        ));
    }
    let mut tree = Stage2Tree {
        nodes: Vec::new(),
        root: 0,
    };
    if a.len() == 1 {
        tree.nodes.push(Stage2Node {
            set: a.clone(),
            children: None,
            leaf: Some(0),
        });
        return Ok(tree);
    }
    let induced = g.induced_subgraph(a);
    if induced.components_within(a).len() > 1 {
        return Err(Error::Precondition(
            "stage 2 requires a connected induced graph".into(),
        ));
    }
    let coll = cache.collection(g, a, budget)?;
    if coll.lambda < 0.49 * lambda_tilde * (1.0 - 1e-9) {
        return Err(Error::Precondition(format!(
            "stage 2 requires induced minimum cut >= 0.49 lambda, got {}",
            coll.lambda
        )));
    }
    let cset: Vec<VertexSet> = coll
        .cuts
        .iter()
        .zip(&coll.values)
        .filter(|(_, &v)| approx_le(v, 1.01 * lambda_tilde))
        .map(|(c, _)| c.clone())
        .collect();
    let b0 = g.boundary_weight(a);
    let root = stage2_recurse(g, a.clone(), &cset, eps, lambda_tilde, &mut tree, budget)?;
    tree.root = root;
    // Number the leaves and audit the recursion-count bound.
    let mut count = 0usize;
    number_leaves(&mut tree, root, &mut count);
    let d = a.len() as f64;
    let bound = (b0 / (0.4 * eps * lambda_tilde)).powi(2)
        * (2.0 + 2.0 * d.log2()).powf(6.0 * b0 / lambda_tilde);
    if (count as f64) > bound.max(1.0) * (1.0 + 1e-9) {
        return Err(Error::Assertion(format!(
            "stage-2 produced {count} clusters, above the recursion bound {bound}"
        )));
    }
    Ok(tree)
}

fn number_leaves(tree: &mut Stage2Tree, node: usize, count: &mut usize) {
    match tree.nodes[node].children {
        None => {
            tree.nodes[node].leaf = Some(*count);
            *count += 1;
        }
        Some((l, r)) => {
            number_leaves(tree, l, count);
            number_leaves(tree, r, count);
        }
    }
}

fn stage2_recurse(
    g: &WeightedGraph,
    a_cur: VertexSet,
    cset: &[VertexSet],
    eps: f64,
    lambda_tilde: f64,
    tree: &mut Stage2Tree,
    budget: &mut Budget,
) -> Result<usize> {
    budget.charge(4 + cset.len() as u64, "stage2 node")?;
    // Pruning: keep only cuts whose intersection is still boundary-sparse.
    let survivors: Vec<VertexSet> = cset
        .iter()
        .filter(|c| {
            let overlap = c.intersection(&a_cur);
            g.is_boundary_sparse(&a_cur, &overlap, 1.0 - eps)
        })
        .cloned()
        .collect();
    // Case (a): small internal boundary first.
    let pick = survivors
        .iter()
        .find(|c| {
            approx_le(
                g.boundary_within(&a_cur, &c.intersection(&a_cur)),
                0.4 * lambda_tilde,
            )
        })
        .cloned()
        .or_else(|| {
            // Case (b): minimize |C cap A'|, ties toward the smaller set.
            survivors
                .iter()
                .map(|c| c.intersection(&a_cur))
                .min_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)))
                .map(|_| {
                    survivors
                        .iter()
                        .min_by(|x, y| {
                            let ix = x.intersection(&a_cur);
                            let iy = y.intersection(&a_cur);
                            ix.len().cmp(&iy.len()).then(ix.cmp(&iy))
                        })
                        .unwrap()
                        .clone()
                })
        });
    match pick {
        None => {
            let id = tree.nodes.len();
            tree.nodes.push(Stage2Node {
                set: a_cur,
                children: None,
                leaf: None,
            });
            Ok(id)
        }
        Some(c) => {
            let left_set = c.intersection(&a_cur);
            let right_set = a_cur.difference(&c);
            // Boundary decrease audit.
            let drop = (0.19f64 * lambda_tilde).min(0.4 * eps * lambda_tilde);
            let b_cur = g.boundary_weight(&a_cur);
            for side in [&left_set, &right_set] {
                if !approx_le(g.boundary_weight(side), b_cur - drop) {
                    return Err(Error::Assertion(
                        "stage-2 boundary failed to decrease".into(),
                    ));
                }
            }
            let survivors_arc: Vec<VertexSet> = survivors;
            let l = stage2_recurse(g, left_set, &survivors_arc, eps, lambda_tilde, tree, budget)?;
            let r = stage2_recurse(
                g,
                right_set,
                &survivors_arc,
                eps,
                lambda_tilde,
                tree,
                budget,
            )?;
            let id = tree.nodes.len();
            tree.nodes.push(Stage2Node {
                set: a_cur,
                children: Some((l, r)),
                leaf: None,
            });
            Ok(id)
        }
    }
}

/// How a final cluster participates in witnessing partitions.
#[derive(Clone, Debug)]
enum PartSource {
    /// A stage-1 part with boundary above 3 lambda: always its own part.
    Rigid(usize),
    /// A stage-2 tree over a stage-1 part; leaf ids are offset into the
    /// final cluster list.
    Tree {
        tree: Stage2Tree,
        first_cluster: usize,
    },
}

/// The full small-cluster decomposition with its witness machinery.
#[derive(Clone, Debug)]
pub struct SmallDecomposition {
    pub clusters: Vec<VertexSet>,
    pub stage1_boundary_sum: f64,
    eps: f64,
    sources: Vec<PartSource>,
}

impl SmallDecomposition {
    /// The witnessing partition for a candidate cut `s`: groups of cluster
    /// indices such that s restricted to each group's union is
    /// non-(1-eps)-boundary-sparse there.
    pub fn witness_partition(&self, g: &WeightedGraph, s: &VertexSet) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for src in &self.sources {
            match src {
                PartSource::Rigid(idx) => out.push(vec![*idx]),
                PartSource::Tree {
                    tree,
                    first_cluster,
                } => {
                    let mut groups = Vec::new();
                    tree.witness_groups(g, s, self.eps, tree.root, &mut groups);
                    for grp in groups {
                        out.push(grp.into_iter().map(|l| l + first_cluster).collect());
                    }
                }
            }
        }
        out
    }

    /// Check that every part of the witnessing partition is
    /// non-(1-eps)-boundary-sparse against `s`.
    pub fn verify_witness(&self, g: &WeightedGraph, s: &VertexSet) -> bool {
        for part in self.witness_partition(g, s) {
            let mut union = VertexSet::new();
            for idx in part {
                union = union.union(&self.clusters[idx]);
            }
            let overlap = s.intersection(&union);
            if g.is_boundary_sparse(&union, &overlap, 1.0 - self.eps) {
                return false;
            }
        }
        true
    }
}

/// Stage 1 followed by stage 2 on every part with small boundary.
pub fn small_cluster_decomposition(
    g: &WeightedGraph,
    a: &VertexSet,
    eps: f64,
    lambda_tilde: f64,
    budget: &mut Budget,
) -> Result<SmallDecomposition> {
    if eps > 0.01 + crate::REL_TOL {
        return Err(Error::Precondition(
            "small-cluster eps must be at most 0.01".into(),
        ));
    }
    if a.is_empty() {
        return Err(Error::Precondition("empty cluster".into()));
    }
    let mut cache = EnumCache::default();
    let stage1 = decompose_stage1_cached(g, a, eps, lambda_tilde, &mut cache, budget)?;
    let stage1_boundary_sum: f64 = stage1.clusters.iter().map(|p| g.boundary_weight(p)).sum();
    let mut clusters = Vec::new();
    let mut sources = Vec::new();
    for part in &stage1.clusters {
        if approx_le(g.boundary_weight(part), 3.0 * lambda_tilde) {
            let tree = decompose_stage2_cached(g, part, eps, lambda_tilde, &mut cache, budget)?;
            let first_cluster = clusters.len();
            clusters.extend(tree.leaves());
            sources.push(PartSource::Tree {
                tree,
                first_cluster,
            });
        } else {
            sources.push(PartSource::Rigid(clusters.len()));
            clusters.push(part.clone());
        }
    }
    Ok(SmallDecomposition {
        clusters,
        stage1_boundary_sum,
        eps,
        sources,
    })
}
