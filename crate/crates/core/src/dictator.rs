//! Monte-Carlo simulation of the three-query dictatorship test.
//!
//! A trial draws `x, y` uniformly from `G^n` and `s` from `S^n`, sets
//! `z_i = y_i⁻¹ x_i⁻¹ s_i` and accepts iff `f(x) f(y) f(z) ∈ S`.

use std::sync::Arc;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::{Elem, FiniteGroup, GroupError};
use crate::hs::{compute_hs, HsError};
use crate::quotient::{quotient, QuotientGroup};
use crate::rational::Rational;

/// Trials per independently seeded block. Fixed so that results do not
/// depend on the number of worker threads.
const BLOCK: usize = 4096;

/// Largest `|G|^{2n} |S|^n` the exhaustive evaluator accepts.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 26;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid test configuration: {0}")]
    InvalidConfig(String),
    #[error("search space {0} exceeds the exhaustive limit")]
    TooLarge(u64),
    #[error(transparent)]
    Hs(#[from] HsError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The function `f: G^n → G` under test.
#[derive(Clone, Debug)]
pub enum Strategy {
    /// `f(x) = x_j`.
    Dictator(usize),
    /// `f(x) = lift(Σ_i w_i [x_i]) ∗ h_x`: a weighted sum in `G/H_S`, lifted
    /// to its canonical representative and multiplied by an element of `H_S`
    /// chosen by hashing `x`. The weights alternate `+1, −1` (the first is `2`
    /// when `n` is even) so they sum to 1.
    QuotientLift,
    /// `f(x)` uniform in `G`, chosen by hashing `x`.
    UniformRandom,
    /// Dense table indexed by `Σ_i x_i |G|^i`.
    Custom(Arc<Vec<Elem>>),
}

impl Strategy {
    pub fn name(&self) -> String {
        match self {
            Strategy::Dictator(j) => format!("dictator({j})"),
            Strategy::QuotientLift => "quotient_lift".into(),
            Strategy::UniformRandom => "uniform_random".into(),
            Strategy::Custom(_) => "custom".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TestConfig {
    pub group: Arc<FiniteGroup>,
    pub s: Vec<Elem>,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub strategy: Strategy,
    /// Per-coordinate probability of resampling `(x_i, y_i, z_i)` uniformly
    /// from `G³`. Zero gives the plain test.
    pub noise: f64,
}

impl TestConfig {
    pub fn new(
        group: Arc<FiniteGroup>,
        s: &[Elem],
        n: usize,
        samples: usize,
        seed: u64,
        strategy: Strategy,
    ) -> Result<Self, SimError> {
        let mut s: Vec<Elem> = s
            .iter()
            .map(|&x| group.check_element(x))
            .collect::<Result<_, _>>()?;
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(SimError::InvalidConfig("S must be non-empty".into()));
        }
        if n == 0 {
            return Err(SimError::InvalidConfig("n must be at least 1".into()));
        }
        match &strategy {
            Strategy::Dictator(j) if *j >= n => {
                return Err(SimError::InvalidConfig(format!(
                    "dictator index {j} out of range for n = {n}"
                )))
            }
            Strategy::Custom(table) => {
                let want = (group.order() as u128).checked_pow(n as u32);
                if want != Some(table.len() as u128) {
                    return Err(SimError::InvalidConfig(format!(
                        "custom table has {} entries, expected |G|^n",
                        table.len()
                    )));
                }
                if let Some(&bad) = table.iter().find(|&&v| !group.contains(v)) {
                    group.check_element(bad)?;
                }
            }
            _ => {}
        }
        Ok(TestConfig {
            group,
            s,
            n,
            samples,
            seed,
            strategy,
            noise: 0.0,
        })
    }

    pub fn with_noise(mut self, eps: f64) -> Result<Self, SimError> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(SimError::InvalidConfig(format!("noise {eps} not in [0, 1]")));
        }
        self.noise = eps;
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub passes: usize,
}

/// Wilson score interval at `z` standard deviations.
pub fn wilson_interval(passes: usize, samples: usize, z: f64) -> (f64, f64) {
    if samples == 0 {
        return (0.0, 1.0);
    }
    let n = samples as f64;
    let p = passes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// A strategy compiled against a group, ready to evaluate.
pub struct Evaluator {
    group: Arc<FiniteGroup>,
    strategy: Strategy,
    seed: u64,
    lift: Option<LiftData>,
}

struct LiftData {
    quotient: QuotientGroup,
    hs: Vec<Elem>,
    weights: Vec<i64>,
}

impl Evaluator {
    pub fn new(cfg: &TestConfig) -> Result<Self, SimError> {
        let lift = match cfg.strategy {
            Strategy::QuotientLift => {
                let hs = compute_hs(&cfg.group, &cfg.s)?;
                let q = quotient(&cfg.group, &hs.subgroup)?;
                Some(LiftData {
                    quotient: q,
                    hs: hs.subgroup.elements().to_vec(),
                    weights: lift_weights(cfg.n),
                })
            }
            _ => None,
        };
        Ok(Evaluator {
            group: Arc::clone(&cfg.group),
            strategy: cfg.strategy.clone(),
            seed: cfg.seed,
            lift,
        })
    }

    pub fn eval(&self, x: &[Elem]) -> Elem {
        let g = &self.group;
        match &self.strategy {
            Strategy::Dictator(j) => x[*j],
            Strategy::UniformRandom => (hash_point(self.seed, x) % g.order() as u64) as Elem,
            Strategy::Custom(table) => table[encode_point(x, g.order())],
            Strategy::QuotientLift => {
                let lift = self.lift.as_ref().expect("built for quotient_lift");
                let dec = lift
                    .quotient
                    .decomposition()
                    .expect("G/H_S is abelian");
                let inv = dec.invariants();
                let mut acc = vec![0i64; inv.len()];
                for (&xi, &w) in x.iter().zip(&lift.weights) {
                    let v = dec.to_vec(lift.quotient.project(xi));
                    for ((a, &c), &d) in acc.iter_mut().zip(v).zip(inv) {
                        *a = (*a + w * c as i64).rem_euclid(d as i64);
                    }
                }
                let acc: Vec<u64> = acc.into_iter().map(|a| a as u64).collect();
                let rep = lift.quotient.coset_rep(dec.from_vec(&acc));
                let h = lift.hs[(hash_point(self.seed, x) % lift.hs.len() as u64) as usize];
                g.op(rep, h)
            }
        }
    }

    /// `f` as a dense table over `G^n`.
    pub fn table(&self, n: usize) -> Vec<Elem> {
        let q = self.group.order();
        let size = q.pow(n as u32);
        (0..size).map(|i| self.eval(&decode_point(i, q, n))).collect()
    }
}

fn lift_weights(n: usize) -> Vec<i64> {
    let mut w: Vec<i64> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
    if n % 2 == 0 {
        w[0] = 2;
    }
    w
}

/// Index of `x ∈ G^n` in a dense table: `Σ_i x_i |G|^i`.
pub fn encode_point(x: &[Elem], order: usize) -> usize {
    x.iter().rev().fold(0, |acc, &v| acc * order + v)
}

/// Inverse of [`encode_point`].
pub fn decode_point(mut idx: usize, order: usize, n: usize) -> Vec<Elem> {
    (0..n)
        .map(|_| {
            let v = idx % order;
            idx /= order;
            v
        })
        .collect()
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A fixed pseudorandom function of `(seed, x)`; plays the role of a
/// memoized per-input random draw.
fn hash_point(seed: u64, x: &[Elem]) -> u64 {
    x.iter()
        .fold(splitmix(seed), |h, &v| splitmix(h ^ v as u64))
}

/// One trial; returns whether the test accepts.
fn trial(cfg: &TestConfig, f: &Evaluator, rng: &mut ChaCha8Rng, buf: &mut [Vec<Elem>; 3]) -> bool {
    let g = &cfg.group;
    let order = g.order();
    for i in 0..cfg.n {
        let (xi, yi, zi) = if cfg.noise > 0.0 && rng.gen_bool(cfg.noise) {
            (
                rng.gen_range(0..order),
                rng.gen_range(0..order),
                rng.gen_range(0..order),
            )
        } else {
            let xi = rng.gen_range(0..order);
            let yi = rng.gen_range(0..order);
            let si = cfg.s[rng.gen_range(0..cfg.s.len())];
            (xi, yi, g.op(g.op(g.inv(yi), g.inv(xi)), si))
        };
        buf[0][i] = xi;
        buf[1][i] = yi;
        buf[2][i] = zi;
    }
    let prod = g.op(g.op(f.eval(&buf[0]), f.eval(&buf[1])), f.eval(&buf[2]));
    cfg.s.binary_search(&prod).is_ok()
}

/// Runs `cfg.samples` trials and reports the acceptance rate with a Wilson
/// 95% interval. Trials run in parallel blocks with fixed per-block seeds.
pub fn run_test(cfg: &TestConfig) -> Result<TestEstimate, SimError> {
    let f = Evaluator::new(cfg)?;
    let blocks = cfg.samples.div_ceil(BLOCK);
    let passes: usize = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let count = BLOCK.min(cfg.samples - b * BLOCK);
            let mut buf = [vec![0; cfg.n], vec![0; cfg.n], vec![0; cfg.n]];
            (0..count)
                .filter(|_| trial(cfg, &f, &mut rng, &mut buf))
                .count()
        })
        .sum();
    let (ci_low, ci_high) = wilson_interval(passes, cfg.samples, 1.959_963_984_540_054);
    Ok(TestEstimate {
        estimate: if cfg.samples == 0 {
            0.0
        } else {
            passes as f64 / cfg.samples as f64
        },
        ci_low,
        ci_high,
        samples: cfg.samples,
        passes,
    })
}

/// Exact acceptance probability of the noiseless test, by enumerating every
/// `(x, y, s)`.
pub fn exact_pass_probability(cfg: &TestConfig) -> Result<Rational, SimError> {
    let g = &cfg.group;
    let q = g.order() as u64;
    let n = cfg.n as u32;
    let space = q
        .checked_pow(2 * n)
        .and_then(|v| v.checked_mul((cfg.s.len() as u64).checked_pow(n)?))
        .unwrap_or(u64::MAX);
    if space > EXHAUSTIVE_LIMIT {
        return Err(SimError::TooLarge(space));
    }
    let f = Evaluator::new(cfg)?;
    let table = f.table(cfg.n);
    let points = g.order().pow(n);
    let s_tuples = cfg.s.len().pow(n);
    let mut hits = 0u64;
    let mut z = vec![0; cfg.n];
    for xi in 0..points {
        let x = decode_point(xi, g.order(), cfg.n);
        for yi in 0..points {
            let y = decode_point(yi, g.order(), cfg.n);
            let fxy = g.op(table[xi], table[yi]);
            for si in 0..s_tuples {
                let sidx = decode_point(si, cfg.s.len(), cfg.n);
                for i in 0..cfg.n {
                    z[i] = g.op(g.op(g.inv(y[i]), g.inv(x[i])), cfg.s[sidx[i]]);
                }
                let prod = g.op(fxy, table[encode_point(&z, g.order())]);
                hits += u64::from(cfg.s.binary_search(&prod).is_ok());
            }
        }
    }
    Ok(Ratio::new(hits, space))
}
