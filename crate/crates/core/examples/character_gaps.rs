//! Character and operator-norm gaps for a few (G, S) pairs.

use std::sync::Arc;

use cosetlin::reps::{gap_report, Catalog};
use cosetlin::{compute_hs, make_group};

fn main() {
    let catalog = Catalog::builtin();
    for (name, s) in [("S3", vec![2, 5]), ("S3", vec![0, 2]), ("D4", vec![4, 5]), ("Q8", vec![2, 4]), ("Z4xZ4", vec![1, 4])] {
        let g = Arc::new(make_group(name).unwrap());
        let hs = compute_hs(&g, &s).unwrap();
        let r = gap_report(&g, &s, &hs, &catalog);
        let eps = r.epsilon.gap.map_or("vacuous".to_string(), |x| format!("{x:.4}"));
        let op = match &r.operator_norm {
            Some(op) if op.hypothesis_met => op.gap.map_or("none".to_string(), |x| format!("{x:.4}")),
            Some(op) => format!("hypothesis not met (norm {:.3})", op.max_norm.unwrap_or(f64::NAN)),
            None => "no catalog entry".to_string(),
        };
        println!("{name:<6} S = {s:?}  |H_S| = {}  character gap {eps}  operator gap {op}", r.hs_order);
    }
}
