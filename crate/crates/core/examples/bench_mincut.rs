use mincut_core::pipeline::{min_cut, PipelineConfig};
use mincut_core::rng::{random_connected_graph, SplitMix64};
use std::time::Instant;

fn main() {
    let cfg = PipelineConfig::desk();
    let mut rng = SplitMix64::new(1);
    for &n in &[8usize, 12, 16, 24, 36, 50] {
        let mut total = 0.0;
        let mut fallbacks = 0;
        let trials = 5;
        for _ in 0..trials {
            let g = random_connected_graph(&mut rng, n, 0.4, 1.0, 100.0);
            let t = Instant::now();
            let res = min_cut(&g, &cfg).unwrap();
            total += t.elapsed().as_secs_f64();
            if res.fallback_used {
                fallbacks += 1;
            }
        }
        println!(
            "n={n}: avg {:.3}s per graph, {fallbacks}/{trials} fallbacks",
            total / trials as f64
        );
    }
}
