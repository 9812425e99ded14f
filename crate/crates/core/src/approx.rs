//! The coset-rounding approximation algorithm and its baselines.
//!
//! Pipeline: compute `H_S`, project every constraint to an equation over the
//! abelian quotient `Q = G/H_S`, solve that system, then lift each variable to
//! an element of its prescribed coset, either uniformly at random or by the
//! method of conditional expectations.

use std::sync::Arc;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{solve, AbelianSolution, AbelianSystem, SolveOutcome, SolverError};
use crate::group::{Elem, FiniteGroup, GroupError};
use crate::hs::{compute_hs, HsError, HsResult};
use crate::instance::{Assignment, Constraint, Instance, InstanceError};
use crate::quotient::{quotient, QuotientGroup};
use crate::rational::{as_string, Rational};

/// Largest search space (`|G|^n`) the exact solver accepts.
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error(transparent)]
    Hs(#[from] HsError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("quotient G/H is not abelian")]
    NonAbelianQuotient,
    #[error("search space |G|^n = {0:e} exceeds the exact-solver limit")]
    TooLarge(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Derandomized,
    Randomized,
    BaselineRandom,
    BruteForce,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Derandomized => "derandomized",
            Mode::Randomized => "randomized",
            Mode::BaselineRandom => "baseline-random",
            Mode::BruteForce => "brute-force",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    #[serde(with = "as_string")]
    pub value: Rational,
    #[serde(with = "as_string")]
    pub guarantee: Rational,
    pub satisfied: usize,
    pub constraints: usize,
    pub assignment: Vec<Elem>,
    pub mode: Mode,
    /// The quotient system was unsatisfiable and the uniform baseline was used.
    pub quotient_unsat: bool,
    /// The instance has no constraints; `value` is 1 by convention.
    pub vacuous: bool,
}

impl SolveReport {
    fn new(
        inst: &Instance,
        assignment: Assignment,
        guarantee: Rational,
        mode: Mode,
        quotient_unsat: bool,
    ) -> Self {
        let value = inst
            .evaluate(&assignment)
            .expect("solver produced an assignment of the right length");
        SolveReport {
            value,
            guarantee,
            satisfied: inst.satisfied_count(assignment.values()),
            constraints: inst.num_constraints(),
            assignment: assignment.0,
            mode,
            quotient_unsat,
            vacuous: inst.num_constraints() == 0,
        }
    }
}

/// `|S| / |G|`, the guarantee of a uniformly random assignment.
pub fn baseline_guarantee(inst: &Instance) -> Rational {
    Ratio::new(inst.s().len() as u64, inst.group().order() as u64)
}

/// Everything the rounding stage needs about `G/H_S`.
#[derive(Clone, Debug)]
pub struct Projection {
    pub hs: HsResult,
    pub quotient: QuotientGroup,
    pub system: AbelianSystem,
}

/// Computes `H_S` and `Q = G/H_S` and projects the instance to `Q`.
pub fn prepare(inst: &Instance) -> Result<Projection, ApproxError> {
    let hs = compute_hs(inst.group(), inst.s())?;
    let q = quotient(inst.group(), &hs.subgroup)?;
    let system = project_instance(inst, &hs, &q)?;
    Ok(Projection {
        hs,
        quotient: q,
        system,
    })
}

/// One equation per constraint: `Σ_j y_{i_j} = [S]_Q − Σ_j [a_{i_j}]_Q`,
/// in the coordinates of the quotient's cyclic decomposition. Repeated
/// variables add up in the coefficient matrix.
pub fn project_instance(
    inst: &Instance,
    hs: &HsResult,
    q: &QuotientGroup,
) -> Result<AbelianSystem, ApproxError> {
    let dec = q.decomposition().ok_or(ApproxError::NonAbelianQuotient)?;
    let inv = dec.invariants().to_vec();
    let target = dec.to_vec(q.project(hs.coset_rep));

    let mut coeffs = Vec::with_capacity(inst.num_constraints());
    let mut rhs = Vec::with_capacity(inst.num_constraints());
    for c in inst.constraints() {
        let mut row = vec![0u64; inst.num_vars()];
        let mut b: Vec<u64> = target.to_vec();
        for lit in c {
            row[lit.var] += 1;
            let a = dec.to_vec(q.project(lit.shift));
            for ((bf, af), d) in b.iter_mut().zip(a).zip(&inv) {
                *bf = (*bf + d - af) % d;
            }
        }
        coeffs.push(row);
        rhs.push(b);
    }
    Ok(AbelianSystem::new(inst.num_vars(), inv, coeffs, rhs)?)
}

/// The coset of `H_S` each variable must be lifted into, as sorted elements.
pub fn coset_candidates(proj: &Projection, sol: &AbelianSolution) -> Vec<Vec<Elem>> {
    let g = proj.quotient.parent();
    let dec = proj
        .quotient
        .decomposition()
        .expect("projection exists only for abelian quotients");
    sol.assignment
        .iter()
        .map(|tuple| {
            let rep = proj.quotient.coset_rep(dec.from_vec(tuple));
            let mut coset: Vec<Elem> = proj
                .hs
                .subgroup
                .elements()
                .iter()
                .map(|&h| g.op(rep, h))
                .collect();
            coset.sort_unstable();
            coset
        })
        .collect()
}

/// Sets each `x_i = rep_i ∗ h_i` with `h_i` uniform in `H_S`.
pub fn round(proj: &Projection, sol: &AbelianSolution, seed: u64) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cands = coset_candidates(proj, sol);
    Assignment(
        cands
            .iter()
            .map(|c| c[rng.gen_range(0..c.len())])
            .collect(),
    )
}

/// Method of conditional expectations over the coset lifts.
pub fn derandomize(inst: &Instance, proj: &Projection, sol: &AbelianSolution) -> Assignment {
    derandomize_traced(inst, proj, sol).0
}

/// Like [`derandomize`], also returning the conditional expectation of the
/// number of satisfied constraints before the first and after every fixing.
pub fn derandomize_traced(
    inst: &Instance,
    proj: &Projection,
    sol: &AbelianSolution,
) -> (Assignment, Vec<Rational>) {
    let cands = coset_candidates(proj, sol);
    conditional_expectations(inst, &cands, proj.hs.ratio)
}

/// Fixes variables in index order, each to the candidate maximizing the
/// conditional expectation
/// `#(closed satisfied constraints) + p · #(constraints with a free variable)`.
/// Ties go to the smallest element ID.
///
/// `p` must be the exact satisfaction probability of a constraint that still
/// has a free variable; it is the same whichever variables are already fixed.
fn conditional_expectations(
    inst: &Instance,
    candidates: &[Vec<Elem>],
    p: Rational,
) -> (Assignment, Vec<Rational>) {
    let n = inst.num_vars();
    let mut closes_at: Vec<Vec<&Constraint>> = vec![Vec::new(); n];
    for c in inst.constraints() {
        let last = c.iter().map(|l| l.var).max().expect("arity >= 2");
        closes_at[last].push(c);
    }

    let mut values = vec![inst.group().identity(); n];
    let mut satisfied = 0u64;
    let mut open = inst.num_constraints() as u64;
    let mut trace = Vec::with_capacity(n + 1);
    trace.push(p * open);

    for var in 0..n {
        let mut best = (0usize, candidates[var][0]);
        for (idx, &x) in candidates[var].iter().enumerate() {
            values[var] = x;
            let hits = closes_at[var]
                .iter()
                .filter(|c| inst.is_satisfied(c, &values))
                .count();
            if idx == 0 || hits > best.0 {
                best = (hits, x);
            }
        }
        values[var] = best.1;
        satisfied += best.0 as u64;
        open -= closes_at[var].len() as u64;
        let expectation = p * open + satisfied;
        debug_assert!(
            expectation >= *trace.last().unwrap(),
            "conditional expectation decreased at variable {var}"
        );
        trace.push(expectation);
    }
    (Assignment(values), trace)
}

/// Monte-Carlo mean of the instance value under random coset rounding.
pub fn estimate_rounding_value(
    inst: &Instance,
    proj: &Projection,
    sol: &AbelianSolution,
    trials: usize,
    seed: u64,
) -> f64 {
    let cands = coset_candidates(proj, sol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0; inst.num_vars()];
    let mut total = 0usize;
    for _ in 0..trials {
        for (v, c) in values.iter_mut().zip(&cands) {
            *v = c[rng.gen_range(0..c.len())];
        }
        total += inst.satisfied_count(&values);
    }
    total as f64 / (trials as f64 * inst.num_constraints().max(1) as f64)
}

/// Exact probability that constraint `c` is satisfied when every variable in
/// `free` is lifted uniformly into its coset and the rest take `fixed`.
/// Enumerates all `|H_S|^{|free|}` lifts.
pub fn constraint_lift_probability(
    inst: &Instance,
    c: &Constraint,
    candidates: &[Vec<Elem>],
    fixed: &[Elem],
    free: &[usize],
) -> Rational {
    let mut values = fixed.to_vec();
    let mut hits = 0u64;
    let mut total = 0u64;
    let mut digits = vec![0usize; free.len()];
    loop {
        for (&var, &d) in free.iter().zip(&digits) {
            values[var] = candidates[var][d];
        }
        total += 1;
        hits += u64::from(inst.is_satisfied(c, &values));
        // odometer
        let mut pos = 0;
        loop {
            if pos == free.len() {
                return Ratio::new(hits, total);
            }
            digits[pos] += 1;
            if digits[pos] < candidates[free[pos]].len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Uniformly random assignment, or its derandomization over all of `G`.
pub fn baseline_random(inst: &Instance, seed: u64, derandomize: bool) -> SolveReport {
    let g = inst.group();
    let assignment = if derandomize {
        let all: Vec<Elem> = g.elements().collect();
        let cands = vec![all; inst.num_vars()];
        conditional_expectations(inst, &cands, baseline_guarantee(inst)).0
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Assignment((0..inst.num_vars()).map(|_| rng.gen_range(0..g.order())).collect())
    };
    SolveReport::new(inst, assignment, baseline_guarantee(inst), Mode::BaselineRandom, false)
}

/// Exact optimum by depth-first enumeration in lexicographic order with
/// bound pruning; the first optimal assignment found is returned.
pub fn brute_force(inst: &Instance) -> Result<SolveReport, ApproxError> {
    let g: &FiniteGroup = inst.group();
    let space = (g.order() as f64).powi(inst.num_vars() as i32);
    if space > BRUTE_FORCE_LIMIT {
        return Err(ApproxError::TooLarge(space));
    }
    let n = inst.num_vars();
    let mut closes_at: Vec<Vec<&Constraint>> = vec![Vec::new(); n];
    for c in inst.constraints() {
        closes_at[c.iter().map(|l| l.var).max().unwrap()].push(c);
    }
    // constraints still open after fixing variables 0..=i
    let mut open_after = vec![0usize; n];
    let mut open = inst.num_constraints();
    for i in 0..n {
        open -= closes_at[i].len();
        open_after[i] = open;
    }

    struct Search<'a> {
        inst: &'a Instance,
        closes_at: Vec<Vec<&'a Constraint>>,
        open_after: Vec<usize>,
        values: Vec<Elem>,
        best: Option<(usize, Vec<Elem>)>,
        total: usize,
    }

    impl Search<'_> {
        fn run(&mut self, var: usize, satisfied: usize) {
            if let Some((b, _)) = &self.best {
                if *b == self.total {
                    return;
                }
            }
            if var == self.values.len() {
                if self.best.as_ref().is_none_or(|(b, _)| satisfied > *b) {
                    self.best = Some((satisfied, self.values.clone()));
                }
                return;
            }
            for x in self.inst.group().elements() {
                self.values[var] = x;
                let gained = self.closes_at[var]
                    .iter()
                    .filter(|c| self.inst.is_satisfied(c, &self.values))
                    .count();
                let bound = satisfied + gained + self.open_after[var];
                if self.best.as_ref().is_some_and(|(b, _)| bound <= *b) {
                    continue;
                }
                self.run(var + 1, satisfied + gained);
            }
        }
    }

    let mut search = Search {
        inst,
        closes_at,
        open_after,
        values: vec![g.identity(); n],
        best: None,
        total: inst.num_constraints(),
    };
    search.run(0, 0);
    let (_, values) = search.best.expect("search visits at least one assignment");
    Ok(SolveReport::new(
        inst,
        Assignment(values),
        Ratio::from_integer(1),
        Mode::BruteForce,
        false,
    ))
}

/// Full pipeline. In the coset modes an unsatisfiable quotient system (so an
/// unsatisfiable instance) falls back to the derandomized uniform baseline,
/// with `quotient_unsat` set and guarantee `|S|/|G|`.
pub fn solve_pipeline(inst: &Instance, seed: u64, mode: Mode) -> Result<SolveReport, ApproxError> {
    match mode {
        Mode::BruteForce => brute_force(inst),
        Mode::BaselineRandom => Ok(baseline_random(inst, seed, false)),
        Mode::Derandomized | Mode::Randomized => {
            let proj = prepare(inst)?;
            match solve(&proj.system, seed) {
                SolveOutcome::Unsat { .. } => {
                    let fallback = baseline_random(inst, seed, true);
                    Ok(SolveReport {
                        mode,
                        quotient_unsat: true,
                        ..fallback
                    })
                }
                SolveOutcome::Solved(sol) => {
                    let assignment = if mode == Mode::Derandomized {
                        derandomize(inst, &proj, &sol)
                    } else {
                        round(&proj, &sol, seed.wrapping_add(1))
                    };
                    Ok(SolveReport::new(inst, assignment, proj.hs.ratio, mode, false))
                }
            }
        }
    }
}

/// Convenience for callers holding only a group handle.
pub fn guarantee_for(group: &Arc<FiniteGroup>, s: &[Elem]) -> Result<Rational, ApproxError> {
    Ok(compute_hs(group, s)?.ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::verify;
    use crate::group::make_group;
    use crate::instance::{generate_planted, Literal};

    fn arc(name: &str) -> Arc<FiniteGroup> {
        Arc::new(make_group(name).unwrap())
    }

    #[test]
    fn z4xz4_pair_meets_one_half() {
        let g = arc("Z4xZ4");
        for seed in 0..20 {
            let (inst, _) = generate_planted(Arc::clone(&g), &[1, 4], 3, 12, 40, seed).unwrap();
            let r = solve_pipeline(&inst, seed, Mode::Derandomized).unwrap();
            assert_eq!(r.guarantee, Ratio::new(1, 2));
            assert!(r.value >= r.guarantee, "seed {seed}: {}", r.value);
            assert!(!r.quotient_unsat);
        }
    }

    #[test]
    fn max3lin_is_solved_exactly() {
        let g = arc("Z6");
        for seed in 0..10 {
            let (inst, _) = generate_planted(Arc::clone(&g), &[0], 3, 8, 30, seed).unwrap();
            let r = solve_pipeline(&inst, seed, Mode::Derandomized).unwrap();
            assert_eq!(r.guarantee, Ratio::from_integer(1));
            assert_eq!(r.value, Ratio::from_integer(1));
            let r = solve_pipeline(&inst, seed, Mode::Randomized).unwrap();
            assert_eq!(r.value, Ratio::from_integer(1));
        }
    }

    #[test]
    fn s_equal_g_guarantee_one() {
        let g = arc("S3");
        let all: Vec<Elem> = g.elements().collect();
        let (inst, _) = generate_planted(Arc::clone(&g), &all, 3, 5, 10, 1).unwrap();
        let r = solve_pipeline(&inst, 0, Mode::Derandomized).unwrap();
        assert_eq!(r.guarantee, Ratio::from_integer(1));
        assert_eq!(r.value, Ratio::from_integer(1));
    }

    #[test]
    fn projected_planted_assignment_satisfies_system() {
        for (name, s) in [("Z4xZ4", vec![1, 4]), ("S3", vec![1, 2]), ("Q8", vec![2, 4])] {
            let g = arc(name);
            let (inst, planted) = generate_planted(Arc::clone(&g), &s, 4, 9, 25, 9).unwrap();
            let proj = prepare(&inst).unwrap();
            let dec = proj.quotient.decomposition().unwrap();
            let image: Vec<Vec<u64>> = planted
                .values()
                .iter()
                .map(|&x| dec.to_vec(proj.quotient.project(x)).to_vec())
                .collect();
            assert!(verify(&proj.system, &image), "{name}");
        }
    }

    #[test]
    fn single_constraint_projection_matches_exhaustive_check() {
        // S3 with S = {e}: H_S = A3, Q ≅ Z2
        let g = arc("S3");
        let c = vec![
            Literal { shift: 1, var: 0 },
            Literal { shift: 3, var: 1 },
            Literal { shift: 5, var: 2 },
        ];
        let inst = Instance::new(Arc::clone(&g), &[0], 3, 3, vec![c.clone()]).unwrap();
        let proj = prepare(&inst).unwrap();
        assert_eq!(proj.system.invariants(), &[2]);
        let dec = proj.quotient.decomposition().unwrap();
        for x in g.elements() {
            for y in g.elements() {
                for z in g.elements() {
                    if inst.is_satisfied(&c, &[x, y, z]) {
                        let img: Vec<Vec<u64>> = [x, y, z]
                            .iter()
                            .map(|&v| dec.to_vec(proj.quotient.project(v)).to_vec())
                            .collect();
                        assert!(verify(&proj.system, &img));
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_hs_lift_is_exact() {
        // |H_S| = 1: only possible for abelian G with |S| = 1
        let g = arc("Z4xZ4");
        let (inst, _) = generate_planted(Arc::clone(&g), &[5], 3, 7, 20, 2).unwrap();
        let proj = prepare(&inst).unwrap();
        assert_eq!(proj.hs.subgroup.order(), 1);
        let sol = solve(&proj.system, 4);
        let a = round(&proj, sol.solution().unwrap(), 0);
        assert_eq!(inst.evaluate(&a).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn conditional_expectation_never_decreases() {
        let g = arc("D4");
        for seed in 0..30 {
            let (inst, _) = generate_planted(Arc::clone(&g), &[4, 6], 3, 8, 30, seed).unwrap();
            let proj = prepare(&inst).unwrap();
            let sol = solve(&proj.system, seed);
            let (a, trace) = derandomize_traced(&inst, &proj, sol.solution().unwrap());
            for w in trace.windows(2) {
                assert!(w[1] >= w[0]);
            }
            let m = inst.num_constraints() as u64;
            assert_eq!(*trace.last().unwrap(), Ratio::from_integer(inst.satisfied_count(a.values()) as u64));
            assert_eq!(trace[0], proj.hs.ratio * m);
        }
    }

    #[test]
    fn hs_equal_g_reduces_to_baseline() {
        // S = {e, r, s} in D4 generates the whole group
        let g = arc("D4");
        let (inst, _) = generate_planted(Arc::clone(&g), &[0, 1, 4], 3, 6, 20, 8).unwrap();
        let proj = prepare(&inst).unwrap();
        assert_eq!(proj.hs.subgroup.order(), 8);
        let r = solve_pipeline(&inst, 0, Mode::Derandomized).unwrap();
        let b = baseline_random(&inst, 0, true);
        assert_eq!(r.guarantee, b.guarantee);
        assert_eq!(r.assignment, b.assignment);
        assert!(r.value >= Ratio::new(3, 8));
    }

    #[test]
    fn brute_force_small_cases() {
        let g = arc("Z3");
        let (inst, _) = generate_planted(Arc::clone(&g), &[0], 3, 5, 12, 6).unwrap();
        let r = brute_force(&inst).unwrap();
        assert_eq!(r.value, Ratio::from_integer(1));

        let empty = Instance::new(Arc::clone(&g), &[0], 2, 2, vec![]).unwrap();
        let r = brute_force(&empty).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.value, Ratio::from_integer(1));
        assert_eq!(r.assignment, vec![0, 0]);

        let big = Instance::new(arc("Z4xZ4"), &[0], 2, 8, vec![]).unwrap();
        assert!(matches!(brute_force(&big), Err(ApproxError::TooLarge(_))));
    }

    #[test]
    fn brute_force_matches_plain_enumeration() {
        // contradictory constraints force OPT < 1
        let g = arc("Z3");
        let lit = |shift, var| Literal { shift, var };
        let cons = vec![
            vec![lit(0, 0), lit(0, 1)],
            vec![lit(1, 0), lit(0, 1)],
            vec![lit(2, 0), lit(0, 1)],
            vec![lit(0, 1), lit(0, 2)],
        ];
        let inst = Instance::new(Arc::clone(&g), &[0], 2, 3, cons).unwrap();
        let r = brute_force(&inst).unwrap();
        let mut best = (0, vec![]);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let k = inst.satisfied_count(&[a, b, c]);
                    if k > best.0 {
                        best = (k, vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(r.satisfied, best.0);
        assert_eq!(r.assignment, best.1);
        assert_eq!(r.value, Ratio::new(2, 4));
    }

    #[test]
    fn unsat_instance_falls_back() {
        let g = arc("Z2");
        let lit = |shift, var| Literal { shift, var };
        // x0 + x1 = 0 and x0 + x1 = 1
        let cons = vec![vec![lit(0, 0), lit(0, 1)], vec![lit(1, 0), lit(0, 1)]];
        let inst = Instance::new(Arc::clone(&g), &[0], 2, 2, cons).unwrap();
        let r = solve_pipeline(&inst, 0, Mode::Derandomized).unwrap();
        assert!(r.quotient_unsat);
        assert_eq!(r.guarantee, Ratio::new(1, 2));
        assert_eq!(r.value, Ratio::new(1, 2));
    }

    #[test]
    fn derandomized_baseline_meets_uniform_guarantee() {
        let g = arc("Q8");
        for seed in 0..10 {
            let (inst, _) = generate_planted(Arc::clone(&g), &[2, 5], 3, 6, 25, seed).unwrap();
            let r = baseline_random(&inst, seed, true);
            assert!(r.value >= Ratio::new(2, 8));
        }
    }
}
