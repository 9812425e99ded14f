//! Generate a satisfiable instance over D4 and compare the solvers.

use std::sync::Arc;

use cosetlin::approx::{solve_pipeline, Mode};
use cosetlin::instance::generate_planted;
use cosetlin::make_group;

fn main() {
    let g = Arc::new(make_group("D4").unwrap());
    // S = {r, r^2}
    let (inst, planted) = generate_planted(g, &[1, 2], 3, 7, 40, 17).unwrap();
    println!("planted assignment satisfies {}", inst.evaluate(&planted).unwrap());
    for mode in [Mode::Derandomized, Mode::Randomized, Mode::BaselineRandom, Mode::BruteForce] {
        let r = solve_pipeline(&inst, 3, mode).unwrap();
        println!(
            "{:<16} value {:<6} guarantee {:<5} ({}/{})",
            mode.as_str(),
            r.value,
            r.guarantee,
            r.satisfied,
            r.constraints
        );
    }
}
