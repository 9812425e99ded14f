//! Text round trip of an instance.

use std::sync::Arc;

use cosetlin::instance::{generate_noisy, parse_instance};
use cosetlin::make_group;

fn main() {
    let g = Arc::new(make_group("S3").unwrap());
    let (inst, planted) = generate_noisy(g, &[2, 5], 3, 4, 5, 0.4, 8).unwrap();
    let text = inst.to_text();
    print!("{text}");
    let back = parse_instance(&text).unwrap();
    assert_eq!(back, inst);
    println!("planted value after noise: {}", back.evaluate(&planted).unwrap());
}
