//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measurements. Tolerances are pinned in code; run with --nocapture to
//! see the lines.

use mincut_core::graph::{VertexSet, WeightedGraph};
use mincut_core::large_cluster::{
    coarse_multigraph, forest_packing, isolating_cuts, large_cluster_decomposition,
    verify_uncrossing_property, LargeConfig,
};
use mincut_core::oracle::{
    enumerate_cuts_exhaustive, mincut_exhaustive, stoer_wagner, OracleBudget,
};
use mincut_core::pipeline::{
    audit_structure_level, decompose_level, min_cut, representation_budget, GuessOutcome,
    PipelineConfig,
};
use mincut_core::rng::{cycle, dumbbell, random_connected_graph, SplitMix64};
use mincut_core::small_cluster::{
    canonical_cut, enumerate_approx_mincuts, small_cluster_decomposition,
};
use mincut_core::sparsifier::build_skeleton;
use mincut_core::unit_flow::{unit_flow, FlowCase, FlowSpec, UnitFlow};
use mincut_core::{approx_le, Budget, Error};
use std::time::Instant;

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Criterion 1: exactness against the reference on at least 500 random
/// connected weighted graphs, n <= 50, weights in [1, 100], mixed
/// densities, within five minutes.
#[test]
fn acceptance_1_exactness() {
    let started = Instant::now();
    let mut cfg = PipelineConfig::desk();
    cfg.jobs = std::thread::available_parallelism().map_or(1, |p| p.get().min(4));
    let mut rng = SplitMix64::new(0xACCE_0001);
    let total = 500;
    let mut fallbacks = 0;
    let mut full_pipeline = 0;
    for trial in 0..total {
        let n = 4 + rng.next_below(47); // 4..=50
        let p = [0.08, 0.2, 0.4, 0.7, 0.95][rng.next_below(5)];
        let g = random_connected_graph(&mut rng, n, p, 1.0, 100.0);
        let res = min_cut(&g, &cfg).expect("pipeline runs");
        let (_, want) = stoer_wagner(&g).expect("reference runs");
        assert!(
            rel_eq(res.value, want, 1e-6),
            "trial {trial} (n={n}, p={p}): got {} want {want}",
            res.value
        );
        if res.fallback_used {
            fallbacks += 1;
        } else {
            full_pipeline += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed <= 300.0,
        "exactness sweep took {elapsed:.1}s > 300s"
    );
    println!(
        "ACCEPTANCE 1 exactness: PASS ({total} graphs, {full_pipeline} pure pipeline, \
         {fallbacks} with recorded fallback, {elapsed:.1}s)"
    );
}

/// Criterion 2: the Unit-Flow trichotomy and every clause of the flow
/// termination contract on at least 200 fuzzed specs, plus incremental
/// equivalence.
#[test]
fn acceptance_2_unit_flow_trichotomy() {
    let mut rng = SplitMix64::new(0xACCE_0002);
    let mut cases = [0usize; 3];
    for trial in 0..200 {
        let n = 3 + rng.next_below(10);
        let g = random_connected_graph(&mut rng, n, 0.4, 0.2, 8.0);
        let vol = g.volume_total();
        let h = ((vol.ln().max(1.0) * (1.0 + 3.0 * rng.next_f64())).ceil()) as u32;
        let u = 0.5 + 5.0 * rng.next_f64();
        let beta = 2.0 + 4.0 * rng.next_f64();
        let source: Vec<(usize, f64)> = (0..n)
            .map(|v| (v, rng.next_f64() * beta * g.weighted_degree(v)))
            .collect();
        let spec = FlowSpec {
            graph: g.clone(),
            source: source.clone(),
            height_cap: h,
            capacity_factor: u,
            beta,
        };
        let (state, case) = unit_flow(spec.clone(), &mut Budget::unlimited()).unwrap();
        state.check_invariants().expect("flow invariants");
        match &case {
            FlowCase::Absorbed => {
                cases[0] += 1;
                assert!(state.total_excess() <= 1e-7 * (1.0 + state.total_supply()));
            }
            FlowCase::Saturated => {
                cases[1] += 1;
                for v in 0..n {
                    assert!(approx_le(g.weighted_degree(v), state.supply_at(v)));
                }
            }
            FlowCase::Cut { side, excess } => {
                cases[2] += 1;
                // (3)(a): all parked excess lives at height h inside the side.
                for v in 0..n {
                    if state.excess_at(v) > 1e-9 * (1.0 + state.total_supply()) {
                        assert_eq!(state.label(v), h);
                        assert!(side.contains(v));
                    }
                    if side.contains(v) {
                        assert!(approx_le(g.weighted_degree(v), state.supply_at(v)));
                        assert!(approx_le(
                            state.supply_at(v),
                            (beta + u) * g.weighted_degree(v)
                        ));
                    } else {
                        assert!(approx_le(state.supply_at(v), g.weighted_degree(v)));
                    }
                }
                // (3)(b) and (3)(c) evaluated numerically.
                let phi = g.conductance(side).unwrap();
                assert!(
                    approx_le(phi, 20.0 * vol.ln() / h as f64 + beta / u),
                    "trial {trial}"
                );
                let denom = (beta - 1.0) + 10.0 * u * vol.ln() / h as f64;
                assert!(approx_le(excess / denom, g.volume(side)));
            }
        }
        // Incremental equals one-shot, vertexwise, on the absorbed map:
        // min(f(v), d(v)) is the schedule-independent quantity the flow
        // contract tracks (raw pre-flow values depend on push order; in the
        // all-absorbed case the two coincide).
        let mut inc = UnitFlow::new(FlowSpec {
            source: source.iter().map(|&(v, a)| (v, a * 0.4)).collect(),
            ..spec.clone()
        })
        .unwrap();
        inc.run(&mut Budget::unlimited()).unwrap();
        let inc_case = inc
            .add_source(
                &source
                    .iter()
                    .map(|&(v, a)| (v, a - a * 0.4))
                    .collect::<Vec<_>>(),
                &mut Budget::unlimited(),
            )
            .unwrap();
        assert_eq!(
            std::mem::discriminant(&inc_case),
            std::mem::discriminant(&case),
            "trial {trial}: case differs between one-shot and incremental"
        );
        let tol = 1e-6 * (1.0 + state.total_supply());
        for v in 0..n {
            assert!(
                (inc.absorbed_at(v) - state.absorbed_at(v)).abs() <= tol,
                "trial {trial}: absorbed at {v} differs between one-shot and incremental"
            );
            if matches!(case, FlowCase::Absorbed) {
                assert!(
                    (inc.supply_at(v) - state.supply_at(v)).abs() <= tol,
                    "trial {trial}: f({v}) differs in the all-absorbed case"
                );
            }
        }
        assert!((inc.total_excess() - state.total_excess()).abs() <= tol);
    }
    println!(
        "ACCEPTANCE 2 unit-flow trichotomy: PASS (200 fuzzed specs; cases {}|{}|{})",
        cases[0], cases[1], cases[2]
    );
}

/// Criterion 3: enumeration equals the exhaustive oracle for n <= 14 at
/// alpha in {1, 2.1} over at least 100 seeds, and C6 yields exactly 15.
#[test]
fn acceptance_3_cut_enumeration() {
    let obudget = OracleBudget::default();
    let c6 = cycle(6);
    let coll =
        enumerate_approx_mincuts(&c6, &VertexSet::full(6), 1.0, &mut Budget::unlimited()).unwrap();
    assert_eq!(coll.cuts.len(), 15, "C6 must have exactly 15 minimum cuts");
    let mut rng = SplitMix64::new(0xACCE_0003);
    let mut checked = 0;
    for trial in 0..100 {
        let n = 3 + rng.next_below(12); // 3..=14
        let p = [0.25, 0.5, 0.8][rng.next_below(3)];
        let g = random_connected_graph(&mut rng, n, p, 1.0, 9.0);
        for alpha in [1.0, 2.1] {
            let got =
                enumerate_approx_mincuts(&g, &VertexSet::full(n), alpha, &mut Budget::unlimited())
                    .unwrap();
            let (want_raw, _) = enumerate_cuts_exhaustive(&g, alpha, &obudget).unwrap();
            let within = VertexSet::full(n);
            let mut want: Vec<VertexSet> =
                want_raw.iter().map(|c| canonical_cut(c, &within)).collect();
            want.sort();
            want.dedup();
            assert_eq!(
                got.cuts,
                want,
                "trial {trial} alpha {alpha} n {n}: {} vs {} cuts",
                got.cuts.len(),
                want.len()
            );
            checked += 1;
        }
    }
    println!("ACCEPTANCE 3 cut enumeration: PASS ({checked} collections match the oracle)");
}

/// Criterion 4: forest packing participation bound on every run, and
/// planted well-connected subgraphs stay connected in every forest on at
/// least 50 planted instances.
#[test]
fn acceptance_4_forest_packing() {
    let mut rng = SplitMix64::new(0xACCE_0004);
    let mut planted_checked = 0;
    let mut runs = 0;
    while planted_checked < 50 {
        // Host graph with a planted heavy clique on 4-6 vertices.
        let n = 8 + rng.next_below(6);
        let core = 4 + rng.next_below(3);
        let heavy = 20.0 + rng.next_f64() * 30.0;
        let mut g = random_connected_graph(&mut rng, n, 0.4, 1.0, 4.0);
        let mut edges = g.edges().to_vec();
        for u in 0..core {
            for v in u + 1..core {
                edges.push((u, v, heavy));
            }
        }
        g = WeightedGraph::new(n, edges).unwrap();
        let a = VertexSet::full(n);
        let h = coarse_multigraph(&g, &a, 6.0, 6.0);
        if h.total_copies < 5 {
            continue;
        }
        let kappa = 4.0 + rng.next_f64() * 6.0;
        let packing = forest_packing(&h, kappa, &mut Budget::unlimited()).unwrap();
        runs += 1;
        // Participation audited inside forest_packing; re-check here.
        assert!(
            (packing.max_participation as f64) <= 100.0 * (h.total_copies as f64).ln(),
            "participation bound"
        );
        // The planted clique: verify its coarse min cut is at least kappa by
        // brute force, then require connectivity inside every forest.
        let u = VertexSet::from_iter(0..core);
        let members = u.to_vec();
        let mut coarse_min = u64::MAX;
        for mask in 1u64..(1 << (members.len() - 1)) {
            let side = VertexSet::from_iter(members.iter().enumerate().filter_map(|(i, &v)| {
                if mask >> i & 1 == 1 {
                    Some(v)
                } else {
                    None
                }
            }));
            let cut: u64 = h
                .pairs
                .iter()
                .filter(|&&(x, y, _)| {
                    u.contains(x) && u.contains(y) && (side.contains(x) != side.contains(y))
                })
                .map(|&(_, _, m)| m)
                .sum();
            coarse_min = coarse_min.min(cut);
        }
        if (coarse_min as f64) < kappa {
            continue; // not a valid plant for this kappa; try again
        }
        for forest in &packing.forests {
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            for &ei in forest {
                let (x, y, _) = h.pairs[ei];
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx] = ry;
                }
            }
            let root = find(&mut parent, members[0]);
            for &v in &members {
                assert_eq!(
                    find(&mut parent, v),
                    root,
                    "planted set disconnected in a forest"
                );
            }
        }
        planted_checked += 1;
    }
    println!(
        "ACCEPTANCE 4 forest packing: PASS ({planted_checked} planted instances over {runs} runs)"
    );
}

/// Criterion 5: isolating cuts are pairwise disjoint and satisfy all three
/// properties, property 3 verified by exhaustive search over subsets.
#[test]
fn acceptance_5_isolating_cuts() {
    let mut rng = SplitMix64::new(0xACCE_0005);
    let mut instances = 0;
    while instances < 50 {
        let n = 7 + rng.next_below(5);
        let g = random_connected_graph(&mut rng, n, 0.55, 1.0, 5.0);
        let a_prime = VertexSet::from_iter(0..n - 1);
        let s1 = VertexSet::from_iter([0, 1]);
        let s2 = VertexSet::from_iter([2, 3]);
        let eps = 0.1;
        let s0 = g.volume(&a_prime);
        let lambda_tilde = 1.0 + rng.next_f64() * 4.0;
        let cuts = match isolating_cuts(
            &g,
            &a_prime,
            &[s1.clone(), s2.clone()],
            eps,
            s0,
            lambda_tilde,
        ) {
            Ok(c) => c,
            Err(Error::Assertion(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        // Disjointness and properties 1-2 are asserted inside; re-check 1-2.
        assert!(cuts[0].is_disjoint_from(&cuts[1]));
        let outside = a_prime.complement(n);
        for (i, s) in [&s1, &s2].iter().enumerate() {
            assert!(approx_le(
                g.volume(&cuts[i]),
                (10.0 * s0 / (eps * lambda_tilde)) * g.volume(s)
            ));
            assert!(approx_le(
                g.boundary_within(&a_prime, &cuts[i]),
                (1.0 - eps) * g.weight_between(&cuts[i], &outside)
            ));
        }
        let (_, lambda) = mincut_exhaustive(&g, &OracleBudget::default()).unwrap();
        // Property 3: exhaustive over every U inside S_i.
        for (i, s) in [&s1, &s2].iter().enumerate() {
            let members = s.to_vec();
            for mask in 1u64..(1 << members.len()) {
                let u_dag =
                    VertexSet::from_iter(members.iter().enumerate().filter_map(|(bi, &v)| {
                        if mask >> bi & 1 == 1 {
                            Some(v)
                        } else {
                            None
                        }
                    }));
                if !approx_le(g.volume(&u_dag), s0) {
                    continue;
                }
                let boundary = g.boundary_within(&a_prime, &u_dag);
                if boundary < 0.2 * lambda * (1.0 - 1e-9) {
                    // The moreover clause: the whole set must sit inside C_i.
                    assert!(
                        u_dag.is_subset_of(&cuts[i]),
                        "low-boundary set escaped its isolating cut"
                    );
                    continue;
                }
                let cand = u_dag.intersection(&cuts[i]).to_vec();
                assert!(cand.len() <= 12);
                let mut best = f64::INFINITY;
                for sub in 0..(1u64 << cand.len()) {
                    let u_star =
                        VertexSet::from_iter(cand.iter().enumerate().filter_map(|(bi, &v)| {
                            if sub >> bi & 1 == 1 {
                                Some(v)
                            } else {
                                None
                            }
                        }));
                    let lost = u_dag.difference(&u_star);
                    best = best.min(
                        g.weight_between(&lost, &outside) + g.boundary_within(&a_prime, &u_star),
                    );
                }
                assert!(
                    approx_le(best, (1.0 + eps) * boundary),
                    "instance {instances}: best {best} > (1+eps) * {boundary}"
                );
            }
        }
        instances += 1;
    }
    println!("ACCEPTANCE 5 isolating cuts: PASS ({instances} instances, exhaustive U* search)");
}

/// Criterion 6: the large-cluster uncrossing property verified exhaustively
/// on at least 50 planted instances.
#[test]
fn acceptance_6_large_cluster_uncrossing() {
    let mut rng = SplitMix64::new(0xACCE_0006);
    let cfg = LargeConfig::desk();
    let mut instances = 0;
    let mut peeled = 0;
    while instances < 50 {
        // Cluster: a big clique plus a small blob tied strongly outward.
        let big = 6 + rng.next_below(4);
        let blob = 2 + rng.next_below(2);
        let n = big + blob + 2 + rng.next_below(3);
        let inside_w = 3.0 + rng.next_f64() * 3.0;
        let tie_w = 0.3 + rng.next_f64() * 0.4;
        let out_w = 6.0 + rng.next_f64() * 6.0;
        let mut edges = Vec::new();
        for u in 0..big {
            for v in u + 1..big {
                edges.push((u, v, inside_w));
            }
        }
        for u in big..big + blob {
            for v in u + 1..big + blob {
                edges.push((u, v, inside_w));
            }
        }
        edges.push((0, big, tie_w));
        edges.push((1, big + (blob - 1), tie_w));
        // Outside vertices strongly tied to the blob and to the clique.
        for o in big + blob..n {
            edges.push((big, o, out_w));
            if blob > 1 {
                edges.push((big + 1, o, out_w));
            }
            for v in 2..5.min(big) {
                edges.push((v, o, 2.0 + rng.next_f64() * 2.0));
            }
        }
        for o in big + blob..n {
            for o2 in o + 1..n {
                edges.push((o, o2, out_w));
            }
        }
        let g = WeightedGraph::new(n, edges).unwrap();
        let a = VertexSet::from_iter(0..big + blob);
        if a.len() > 16 {
            continue;
        }
        let (_, lambda) = stoer_wagner(&g).unwrap();
        let lambda_tilde = lambda * 1.005;
        let s0 = g.volume(&VertexSet::from_iter(big..big + blob)) * (1.0 + rng.next_f64());
        let dec = match large_cluster_decomposition(
            &g,
            &a,
            0.1,
            lambda_tilde,
            s0,
            &cfg,
            &mut Budget::unlimited(),
        ) {
            Ok(d) => d,
            Err(Error::Assertion(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let ok = verify_uncrossing_property(
            &g,
            &a,
            &dec.a0,
            0.1,
            lambda_tilde,
            s0,
            &mut Budget::unlimited(),
        )
        .unwrap();
        assert!(
            ok,
            "uncrossing property failed on planted instance {instances}"
        );
        if !dec.small.is_empty() {
            peeled += 1;
        }
        instances += 1;
    }
    println!(
        "ACCEPTANCE 6 large-cluster uncrossing: PASS ({instances} planted instances, \
         {peeled} with nontrivial peels)"
    );
}

/// Criterion 7: witnessing partitions exist for every enumerated
/// 1.01-approximate minimum cut of decomposed clusters; the stage
/// potentials are monotone (asserted inside the decomposition itself).
#[test]
fn acceptance_7_small_cluster_witnesses() {
    let obudget = OracleBudget::default();
    let mut rng = SplitMix64::new(0xACCE_0007);
    let mut cuts_checked = 0;
    for trial in 0..40 {
        let n = 4 + rng.next_below(11); // 4..=14
        let p = [0.4, 0.6, 0.9][rng.next_below(3)];
        // Unit cycles and sparse integer-weight graphs carry many tied
        // near-minimum cuts; dense real-weight graphs carry few.
        let g = if trial % 4 == 0 {
            cycle(4 + rng.next_below(11))
        } else if trial % 2 == 1 {
            let raw = random_connected_graph(&mut rng, n, 0.1, 1.0, 3.0);
            WeightedGraph::new(
                n,
                raw.edges()
                    .iter()
                    .map(|&(u, v, w)| (u, v, w.ceil()))
                    .collect(),
            )
            .unwrap()
        } else {
            random_connected_graph(&mut rng, n, p, 1.0, 6.0)
        };
        let n = g.vertex_count();
        let (_, lambda) = mincut_exhaustive(&g, &obudget).unwrap();
        let lambda_tilde = lambda * 1.005;
        let all = VertexSet::full(n);
        let dec =
            small_cluster_decomposition(&g, &all, 0.01, lambda_tilde, &mut Budget::unlimited())
                .unwrap();
        let (cuts, _) = enumerate_cuts_exhaustive(&g, 1.01, &obudget).unwrap();
        for s in &cuts {
            assert!(
                dec.verify_witness(&g, s),
                "trial {trial}: no witnessing partition for {:?}",
                s.to_vec()
            );
            cuts_checked += 1;
        }
    }
    println!(
        "ACCEPTANCE 7 small-cluster decomposition: PASS ({cuts_checked} near-minimum cuts \
         witnessed across 40 hosts)"
    );
}

/// Criterion 8: skeleton properties over every cut, eps = 0.1, on at least
/// 100 random graphs with n <= 12; parameter-regime rejections reported.
#[test]
fn acceptance_8_skeleton_properties() {
    let obudget = OracleBudget::default();
    let cfg = PipelineConfig::desk();
    let mut rng = SplitMix64::new(0xACCE_0008);
    let eps = 0.1;
    let mut built = 0;
    let mut rejected = 0;
    let mut total_cuts = 0u64;
    for trial in 0..100 {
        let n = 4 + rng.next_below(9); // 4..=12
        let p = [0.3, 0.5, 0.8][rng.next_below(3)];
        let g = random_connected_graph(&mut rng, n, p, 1.0, 5.0);
        let (_, lambda) = mincut_exhaustive(&g, &obudget).unwrap();
        let lambda_tilde = lambda * 1.005;
        // Hierarchy at the correct guess.
        let mut levels = Vec::new();
        let mut level_stats = Vec::new();
        let mut current = g.clone();
        let mut ok = true;
        while current.vertex_count() >= 2 {
            match decompose_level(&current, lambda_tilde, &cfg, &mut Budget::unlimited()) {
                Ok((clustering, next, map, stats)) => {
                    if next.vertex_count() == current.vertex_count() {
                        ok = false;
                        break;
                    }
                    levels.push(mincut_core::graph::HierarchyLevel {
                        graph: current,
                        clustering,
                        map,
                    });
                    level_stats.push(stats);
                    current = next;
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            rejected += 1;
            continue;
        }
        let hierarchy = mincut_core::graph::ContractionHierarchy {
            levels,
            top: current,
        };
        let d_cap = representation_budget(&cfg, &hierarchy, &level_stats, lambda_tilde);
        let skel = match build_skeleton(
            &g,
            &hierarchy,
            eps,
            lambda_tilde,
            d_cap,
            &mut Budget::unlimited(),
        ) {
            Ok(s) => s,
            Err(Error::ParameterRegime(_)) => {
                rejected += 1;
                continue;
            }
            Err(e) => panic!("trial {trial}: {e}"),
        };
        built += 1;
        let (all_cuts, _) = enumerate_cuts_exhaustive(&g, f64::INFINITY, &obudget).unwrap();
        let (min_cuts, _) = enumerate_cuts_exhaustive(&g, 1.0, &obudget).unwrap();
        for s in &min_cuts {
            assert!(
                skel.scaled_boundary(s) <= (1.0 + eps) * lambda * (1.0 + 1e-9),
                "trial {trial}: minimum cut read {} above (1+eps) {lambda}",
                skel.scaled_boundary(s)
            );
        }
        for s in &all_cuts {
            assert!(
                skel.scaled_boundary(s) >= (1.0 - eps) * lambda * (1.0 - 1e-9),
                "trial {trial}: cut read {} below (1-eps) {lambda}",
                skel.scaled_boundary(s)
            );
            total_cuts += 1;
        }
    }
    assert!(
        built >= 60,
        "only {built} skeletons built; too many rejections to be meaningful"
    );
    println!(
        "ACCEPTANCE 8 skeleton: PASS ({built} skeletons over {total_cuts} cuts, \
         {rejected} parameter-regime rejections reported)"
    );
}

/// Criterion 9: per-level uncrossing audit on desk runs with
/// n <= 12 at the correct guess. Failures are hard errors.
#[test]
fn acceptance_9_uncrossing_audit() {
    let obudget = OracleBudget::default();
    let cfg = PipelineConfig::desk();
    let mut rng = SplitMix64::new(0xACCE_0009);
    let mut audited_levels = 0;
    let mut worst_shift_ratio: f64 = 0.0;
    for trial in 0..30 {
        let n = 5 + rng.next_below(8); // 5..=12
        let p = [0.4, 0.7][rng.next_below(2)];
        let g = if trial % 7 == 0 {
            dumbbell(5, 1.0, 1.0)
        } else {
            random_connected_graph(&mut rng, n, p, 1.0, 4.0)
        };
        let n = g.vertex_count();
        let (_, lambda) = mincut_exhaustive(&g, &obudget).unwrap();
        let lambda_tilde = lambda * 1.005;
        let mut current = g.clone();
        while current.vertex_count() >= 2 {
            let (clustering, next, _, _) =
                match decompose_level(&current, lambda_tilde, &cfg, &mut Budget::unlimited()) {
                    Ok(x) => x,
                    Err(Error::BudgetExceeded(_)) => break,
                    Err(e) => panic!("trial {trial}: {e}"),
                };
            // Every enumerated near-minimum cut of this level must admit a
            // union-of-clusters shift within (1 + 3 eps); hard error inside
            // on failure.
            let level_lambda = mincut_exhaustive(&current, &obudget).unwrap().1;
            let worst = audit_structure_level(&current, &clustering, level_lambda, cfg.eps)
                .expect("uncrossing audit");
            let s0 = cfg.s0_mult * (lambda_tilde / 1.01);
            if level_lambda > 0.0 {
                worst_shift_ratio =
                    worst_shift_ratio.max(worst / (s0 * s0 / (cfg.eps * level_lambda)));
            }
            audited_levels += 1;
            if next.vertex_count() == current.vertex_count() {
                break;
            }
            // The next level's minimum cut grows by at most (1 + 3 eps).
            if next.vertex_count() >= 2 {
                let next_lambda = mincut_exhaustive(&next, &obudget).unwrap().1;
                assert!(
                    next_lambda <= (1.0 + 3.0 * cfg.eps) * level_lambda * (1.0 + 1e-9),
                    "trial {trial}: contraction grew the minimum cut from {level_lambda} to {next_lambda}"
                );
            }
            current = next;
        }
        let _ = n;
    }
    assert!(audited_levels >= 30, "audited only {audited_levels} levels");
    println!(
        "ACCEPTANCE 9 uncrossing audit: PASS ({audited_levels} levels audited; \
         measured shift constant {worst_shift_ratio:.4} of s0^2/(eps lambda))"
    );
}

/// Criterion 10: determinism of the library pipeline across reruns and
/// thread counts (the command-level byte-identity of reports is exercised
/// in the CLI suite on the real binary).
#[test]
fn acceptance_10_determinism() {
    let mut rng = SplitMix64::new(0xACCE_0010);
    let mut compared = 0;
    for trial in 0..6 {
        let g = if trial == 0 {
            dumbbell(5, 1.0, 1.0)
        } else {
            let n = 5 + rng.next_below(10);
            random_connected_graph(&mut rng, n, 0.5, 1.0, 20.0)
        };
        let mut cfg = PipelineConfig::desk();
        let runs: Vec<_> = (0..3).map(|_| min_cut(&g, &cfg).unwrap()).collect();
        cfg.jobs = 4;
        let threaded = min_cut(&g, &cfg).unwrap();
        for other in runs.iter().skip(1).chain(std::iter::once(&threaded)) {
            assert_eq!(runs[0].value.to_bits(), other.value.to_bits());
            assert_eq!(runs[0].side, other.side);
            assert_eq!(runs[0].fallback_used, other.fallback_used);
            assert_eq!(runs[0].ledger.len(), other.ledger.len());
            for (a, b) in runs[0].ledger.iter().zip(&other.ledger) {
                assert_eq!(a.lambda_tilde.to_bits(), b.lambda_tilde.to_bits());
                match (&a.outcome, &b.outcome) {
                    (
                        GuessOutcome::Computed {
                            value: v1,
                            side: s1,
                            ..
                        },
                        GuessOutcome::Computed {
                            value: v2,
                            side: s2,
                            ..
                        },
                    ) => {
                        assert_eq!(v1.to_bits(), v2.to_bits());
                        assert_eq!(s1, s2);
                    }
                    (
                        GuessOutcome::Infeasible { reason: r1 },
                        GuessOutcome::Infeasible { reason: r2 },
                    ) => assert_eq!(r1, r2),
                    _ => panic!("outcome kinds differ"),
                }
                compared += 1;
            }
        }
    }
    println!("ACCEPTANCE 10 determinism: PASS ({compared} ledger entries bit-identical)");
}
