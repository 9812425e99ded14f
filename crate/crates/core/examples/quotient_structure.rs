//! Commutator subgroups, H_S and the cyclic decomposition of G/H_S.

use std::sync::Arc;

use cosetlin::{commutator_subgroup, compute_hs, make_group, quotient};

fn main() {
    for (name, s) in [("S3", vec![2]), ("D4", vec![1]), ("Q8", vec![2, 4]), ("Z2xZ4", vec![1]), ("S4", vec![1])] {
        let g = Arc::new(make_group(name).unwrap());
        let comm = commutator_subgroup(&g);
        let hs = compute_hs(&g, &s).unwrap();
        let q = quotient(&g, &hs.subgroup).unwrap();
        println!(
            "{name:<6} |[G,G]| = {:<3} |H_S| = {:<3} G/H_S = Z{:?}",
            comm.order(),
            hs.subgroup.order(),
            q.abelian_invariants().unwrap_or(&[])
        );
    }
}
