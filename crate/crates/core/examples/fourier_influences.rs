//! Influences of a dictator against two non-dictator strategies.

use std::sync::Arc;

use cosetlin::dictator::{Evaluator, Strategy, TestConfig};
use cosetlin::fourier::{fourier_transform, modified_influence, Characters};
use cosetlin::{compute_hs, make_group};

fn main() {
    let g = Arc::new(make_group("Z4").unwrap());
    let n = 3;
    let chars = Characters::new(&g).unwrap();
    let hs = compute_hs(&g, &[1, 3]).unwrap();

    for strategy in [Strategy::Dictator(1), Strategy::QuotientLift, Strategy::UniformRandom] {
        let cfg = TestConfig::new(Arc::clone(&g), &[1, 3], n, 0, 5, strategy).unwrap();
        let f = Evaluator::new(&cfg).unwrap().table(n);
        let t = fourier_transform(&g, &f, n, 1).unwrap();
        let infl: Vec<String> = (0..n)
            .map(|i| {
                let r = modified_influence(&chars, &t, i, n, &hs.subgroup);
                format!("{:.3}/{:.3}", r.modified, r.plain)
            })
            .collect();
        println!("{:<16} influences (modified/plain) {}", cfg.strategy.name(), infl.join("  "));
    }
}
