//! Linear equations over Z2 x Z4 solved through the Smith normal form.

use cosetlin::abelian::{solve, verify, AbelianSystem, SolveOutcome};

fn main() {
    // x0 + x1 = (1, 3), 2 x0 + x2 = (0, 2)
    let sys = AbelianSystem::new(
        3,
        vec![2, 4],
        vec![vec![1, 1, 0], vec![2, 0, 1]],
        vec![vec![1, 3], vec![0, 2]],
    )
    .unwrap();
    match solve(&sys, 0) {
        SolveOutcome::Solved(sol) => {
            println!("solution   {:?}", sol.assignment);
            println!("free dims  {:?}", sol.free_dims);
            println!("verified   {}", verify(&sys, &sol.assignment));
        }
        SolveOutcome::Unsat { factor } => println!("unsatisfiable in factor {factor}"),
    }

    // 2 x = 1 has no solution in Z4
    let bad = AbelianSystem::new(1, vec![4], vec![vec![2]], vec![vec![1]]).unwrap();
    println!("2x = 1 in Z4: unsat = {}", solve(&bad, 0).is_unsat());
}
