//! Linear systems over a finite abelian group `Z_{d_1} × … × Z_{d_m}`.
//!
//! Coefficients are integers, so a system splits into one congruence system
//! `A x ≡ b (mod d_i)` per cyclic factor. Each factor is solved through the
//! Smith form `U A V = D` of the shared coefficient matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::snf::{smith_normal_form, IntMatrix, SmithForm};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("malformed system: {0}")]
    MalformedSystem(String),
}

/// `coeffs · y = rhs` over `Z_{d_1} × … × Z_{d_m}`; one row per equation,
/// each right-hand side a tuple with one component per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianSystem {
    num_vars: usize,
    invariants: Vec<u64>,
    coeffs: Vec<Vec<u64>>,
    rhs: Vec<Vec<u64>>,
}

impl AbelianSystem {
    pub fn new(
        num_vars: usize,
        invariants: Vec<u64>,
        coeffs: Vec<Vec<u64>>,
        rhs: Vec<Vec<u64>>,
    ) -> Result<Self, SolverError> {
        if invariants.contains(&0) {
            return Err(SolverError::MalformedSystem("cyclic factor of order 0".into()));
        }
        if coeffs.len() != rhs.len() {
            return Err(SolverError::MalformedSystem(format!(
                "{} coefficient rows but {} right-hand sides",
                coeffs.len(),
                rhs.len()
            )));
        }
        for (i, (row, b)) in coeffs.iter().zip(&rhs).enumerate() {
            if row.len() != num_vars {
                return Err(SolverError::MalformedSystem(format!(
                    "equation {i} has {} coefficients, expected {num_vars}",
                    row.len()
                )));
            }
            if b.len() != invariants.len() {
                return Err(SolverError::MalformedSystem(format!(
                    "equation {i} right-hand side has {} components, expected {}",
                    b.len(),
                    invariants.len()
                )));
            }
        }
        let rhs = rhs
            .into_iter()
            .map(|b| b.iter().zip(&invariants).map(|(x, d)| x % d).collect())
            .collect();
        Ok(AbelianSystem {
            num_vars,
            invariants,
            coeffs,
            rhs,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_equations(&self) -> usize {
        self.coeffs.len()
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn coeffs(&self) -> &[Vec<u64>] {
        &self.coeffs
    }

    pub fn rhs(&self) -> &[Vec<u64>] {
        &self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianSolution {
    /// One tuple in `Z_{d_1} × … × Z_{d_m}` per variable.
    pub assignment: Vec<Vec<u64>>,
    /// Per factor, the number of transformed coordinates left undetermined.
    pub free_dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(AbelianSolution),
    /// No solution; `factor` is the first cyclic factor found inconsistent.
    Unsat { factor: usize },
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&AbelianSolution> {
        match self {
            SolveOutcome::Solved(s) => Some(s),
            SolveOutcome::Unsat { .. } => None,
        }
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveOutcome::Unsat { .. })
    }
}

/// Solves the system; free parameters are drawn from a ChaCha RNG seeded
/// with `seed`, so results are reproducible.
pub fn solve(system: &AbelianSystem, seed: u64) -> SolveOutcome {
    let n = system.num_vars;
    let m = system.num_equations();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![vec![0u64; system.invariants.len()]; n];
    let mut free_dims = Vec::with_capacity(system.invariants.len());

    if system.invariants.is_empty() {
        return SolveOutcome::Solved(AbelianSolution {
            assignment,
            free_dims,
        });
    }

    let a = IntMatrix::from_rows(&system.coeffs);
    let smith = if m == 0 || n == 0 {
        SmithForm {
            u: IntMatrix::identity(m),
            d: a.clone(),
            v: IntMatrix::identity(n),
        }
    } else {
        smith_normal_form(&a)
    };

    for (f, &d) in system.invariants.iter().enumerate() {
        let b: Vec<BigInt> = system.rhs.iter().map(|r| BigInt::from(r[f])).collect();
        match solve_factor(&smith, &b, d, n, &mut rng) {
            Some((x, free)) => {
                for (var, value) in x.into_iter().enumerate() {
                    assignment[var][f] = value;
                }
                free_dims.push(free);
            }
            None => return SolveOutcome::Unsat { factor: f },
        }
    }
    SolveOutcome::Solved(AbelianSolution {
        assignment,
        free_dims,
    })
}

/// Solves `A x ≡ b (mod d)` given `U A V = D`; returns `x` and the number
/// of free transformed coordinates.
fn solve_factor(
    smith: &SmithForm,
    b: &[BigInt],
    d: u64,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(Vec<u64>, usize)> {
    let modulus = BigInt::from(d);
    let c: Vec<u64> = smith
        .u
        .mul_vec(b)
        .iter()
        .map(|x| x.mod_floor(&modulus).to_u64().unwrap())
        .collect();
    let m = c.len();

    let mut y = Vec::with_capacity(n);
    let mut free = 0;
    for j in 0..n {
        if j < m {
            let djj = smith.d[(j, j)].mod_floor(&modulus).to_u64().unwrap();
            let g = djj.gcd(&d);
            if c[j] % g != 0 {
                return None;
            }
            let step = d / g;
            let base = if step == 1 {
                0
            } else {
                let inv = mod_inverse(djj / g % step, step);
                ((c[j] / g) as u128 * inv as u128 % step as u128) as u64
            };
            let t = if g > 1 { rng.gen_range(0..g) } else { 0 };
            if g > 1 {
                free += 1;
            }
            y.push(BigInt::from(base + t * step));
        } else {
            if d > 1 {
                free += 1;
            }
            y.push(BigInt::from(rng.gen_range(0..d)));
        }
    }
    if c[n.min(m)..].iter().any(|&cj| cj != 0) {
        return None;
    }

    let x = smith
        .v
        .mul_vec(&y)
        .iter()
        .map(|v| v.mod_floor(&modulus).to_u64().unwrap())
        .collect();
    Some((x, free))
}

/// Inverse of `a` modulo `m` for coprime `a`, `m > 1`.
fn mod_inverse(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

/// `true` iff every equation holds componentwise.
pub fn verify(system: &AbelianSystem, assignment: &[Vec<u64>]) -> bool {
    if assignment.len() != system.num_vars {
        return false;
    }
    system.coeffs.iter().zip(&system.rhs).all(|(row, b)| {
        system.invariants.iter().enumerate().all(|(f, &d)| {
            let lhs = row
                .iter()
                .zip(assignment)
                .fold(0u128, |acc, (&a, x)| {
                    (acc + a as u128 * x[f] as u128) % d as u128
                });
            lhs == b[f] as u128
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_system() -> AbelianSystem {
        AbelianSystem::new(
            3,
            vec![2],
            vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
            vec![vec![1], vec![1], vec![0]],
        )
        .unwrap()
    }

    #[test]
    fn small_z2_system() {
        let sys = z2_system();
        // oracle: exactly the assignments (1,0,1) and (0,1,0) satisfy it
        let sols: Vec<Vec<u64>> = (0..8u64)
            .map(|m| vec![m & 1, m >> 1 & 1, m >> 2 & 1])
            .filter(|x| {
                let a: Vec<Vec<u64>> = x.iter().map(|&v| vec![v]).collect();
                verify(&sys, &a)
            })
            .collect();
        assert_eq!(sols, vec![vec![0, 1, 0], vec![1, 0, 1]]);
        for seed in 0..20 {
            let sol = solve(&sys, seed);
            let sol = sol.solution().expect("solvable");
            assert!(verify(&sys, &sol.assignment));
        }
        assert!(verify(&sys, &[vec![1], vec![0], vec![1]]));
        assert!(!verify(&sys, &[vec![0], vec![0], vec![0]]));
    }

    #[test]
    fn two_x_equals_one_mod_four() {
        let sys = AbelianSystem::new(1, vec![4], vec![vec![2]], vec![vec![1]]).unwrap();
        assert_eq!(solve(&sys, 0), SolveOutcome::Unsat { factor: 0 });
    }

    #[test]
    fn empty_system() {
        let sys = AbelianSystem::new(2, vec![3], vec![], vec![]).unwrap();
        let sol = solve(&sys, 7);
        assert!(verify(&sys, &sol.solution().unwrap().assignment));
        assert!(verify(&sys, &[vec![2], vec![1]]));
        assert_eq!(sol.solution().unwrap().free_dims, vec![2]);
    }

    #[test]
    fn trivial_group() {
        let sys = AbelianSystem::new(2, vec![], vec![vec![1, 1]], vec![vec![]]).unwrap();
        let sol = solve(&sys, 0);
        assert_eq!(sol.solution().unwrap().assignment, vec![Vec::<u64>::new(); 2]);
    }

    #[test]
    fn multi_factor_unsat_reports_factor() {
        // x = 1 in Z2, and 2x = 1 in Z4 (second factor inconsistent)
        let sys = AbelianSystem::new(1, vec![2, 4], vec![vec![2]], vec![vec![0, 1]]).unwrap();
        assert_eq!(solve(&sys, 0), SolveOutcome::Unsat { factor: 1 });
    }

    #[test]
    fn malformed() {
        assert!(AbelianSystem::new(2, vec![3], vec![vec![1]], vec![vec![0]]).is_err());
        assert!(AbelianSystem::new(1, vec![3], vec![vec![1]], vec![]).is_err());
        assert!(AbelianSystem::new(1, vec![3], vec![vec![1]], vec![vec![0, 0]]).is_err());
        assert!(AbelianSystem::new(1, vec![0], vec![], vec![]).is_err());
    }

    #[test]
    fn overdetermined_consistent_rows() {
        // x + y = 1, x + y = 1, 2x + 2y = 2 over Z6
        let sys = AbelianSystem::new(
            2,
            vec![6],
            vec![vec![1, 1], vec![1, 1], vec![2, 2]],
            vec![vec![1], vec![1], vec![2]],
        )
        .unwrap();
        let sol = solve(&sys, 3);
        assert!(verify(&sys, &sol.solution().unwrap().assignment));
        let bad = AbelianSystem::new(
            2,
            vec![6],
            vec![vec![1, 1], vec![2, 2]],
            vec![vec![1], vec![3]],
        )
        .unwrap();
        assert!(solve(&bad, 3).is_unsat());
    }
}
