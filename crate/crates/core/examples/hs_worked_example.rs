//! H_S for S = {(0,1), (1,0)} in Z4 x Z4.

use cosetlin::{compute_hs, make_group};

fn main() {
    let g = make_group("Z4xZ4").unwrap();
    let hs = compute_hs(&g, &[1, 4]).unwrap();
    let labels: Vec<String> = hs.subgroup.elements().iter().map(|&x| g.label(x)).collect();
    println!("H_S       = {{{}}}", labels.join(", "));
    println!("coset rep = {}", g.label(hs.coset_rep));
    println!("ratio     = {}", hs.ratio);
    println!("|S|/|G|     = 2/{}", g.order());
}
