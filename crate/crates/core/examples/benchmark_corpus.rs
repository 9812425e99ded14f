//! Build a small corpus in a temp directory and write the benchmark CSV to stdout.

use std::sync::Arc;

use cosetlin::approx::Mode;
use cosetlin::bench::{corpus_files, run_corpus, write_csv};
use cosetlin::instance::generate_noisy;
use cosetlin::make_group;

fn main() {
    let dir = std::env::temp_dir().join(format!("cosetlin-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (i, (name, s)) in [("Z4xZ4", vec![1, 4]), ("S3", vec![2, 5]), ("Q8", vec![2])].iter().enumerate() {
        let g = Arc::new(make_group(name).unwrap());
        let (inst, _) = generate_noisy(g, s, 3, 5, 30, 0.2, i as u64).unwrap();
        std::fs::write(dir.join(format!("{i:02}-{name}.lin")), inst.to_text()).unwrap();
    }
    let files = corpus_files(&dir).unwrap();
    let modes = [Mode::Derandomized, Mode::BaselineRandom, Mode::BruteForce];
    let records = run_corpus(&files, &modes, 1).unwrap();
    write_csv(&records, std::io::stdout()).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
}
