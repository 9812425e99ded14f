//! Max-Ek-LIN_S(G) instances: representation, evaluation, generation and the
//! plain-text instance format.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::group::{make_group, Elem, FiniteGroup};

/// A shifted variable `shift ∗ x_var`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub shift: Elem,
    pub var: usize,
}

/// An ordered tuple of literals; satisfied iff the left-to-right product of
/// the literals lies in `S`.
pub type Constraint = Vec<Literal>;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("assignment has {found} values, instance has {expected} variables")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parameter error: {0}")]
    ParameterError(String),
    #[error("line {line}: {msg}")]
    SyntaxError { line: usize, msg: String },
    #[error("line {line}: unknown group `{name}`: {reason}")]
    UnknownGroup {
        line: usize,
        name: String,
        reason: String,
    },
    #[error("line {line}: element id {id} out of range for a group of order {order}")]
    ElementOutOfRange { line: usize, id: usize, order: usize },
    #[error("reading instance: {0}")]
    Io(#[from] std::io::Error),
}

/// Values for every variable, as element IDs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment(pub Vec<Elem>);

impl Assignment {
    pub fn values(&self) -> &[Elem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    group: Arc<FiniteGroup>,
    s: Vec<Elem>,
    in_s: Vec<bool>,
    arity: usize,
    num_vars: usize,
    constraints: Vec<Constraint>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        *self.group == *other.group
            && self.s == other.s
            && self.arity == other.arity
            && self.num_vars == other.num_vars
            && self.constraints == other.constraints
    }
}

impl Instance {
    pub fn new(
        group: Arc<FiniteGroup>,
        s: &[Elem],
        arity: usize,
        num_vars: usize,
        constraints: Vec<Constraint>,
    ) -> Result<Self, InstanceError> {
        let invalid = |m: String| Err(InstanceError::Invalid(m));
        if arity < 2 {
            return invalid(format!("arity must be at least 2, got {arity}"));
        }
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return invalid("S must be non-empty".into());
        }
        if let Some(&bad) = s.iter().find(|&&x| x >= group.order()) {
            return invalid(format!("S element {bad} out of range"));
        }
        for (i, c) in constraints.iter().enumerate() {
            if c.len() != arity {
                return invalid(format!("constraint {i} has {} literals, expected {arity}", c.len()));
            }
            for lit in c {
                if lit.var >= num_vars {
                    return invalid(format!("constraint {i} uses variable {} of {num_vars}", lit.var));
                }
                if lit.shift >= group.order() {
                    return invalid(format!("constraint {i} has shift {} out of range", lit.shift));
                }
            }
        }
        let mut in_s = vec![false; group.order()];
        for &x in &s {
            in_s[x] = true;
        }
        Ok(Instance {
            group,
            s,
            in_s,
            arity,
            num_vars,
            constraints,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// `S`, sorted and deduplicated.
    pub fn s(&self) -> &[Elem] {
        &self.s
    }

    #[inline]
    pub fn in_s(&self, x: Elem) -> bool {
        self.in_s[x]
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Left-to-right product `(a_1∗x_{i_1})∗…∗(a_k∗x_{i_k})` under `values`.
    #[inline]
    pub fn constraint_product(&self, c: &Constraint, values: &[Elem]) -> Elem {
        let g = &self.group;
        c.iter().fold(g.identity(), |acc, lit| {
            g.op(acc, g.op(lit.shift, values[lit.var]))
        })
    }

    #[inline]
    pub fn is_satisfied(&self, c: &Constraint, values: &[Elem]) -> bool {
        self.in_s[self.constraint_product(c, values)]
    }

    pub fn satisfied_count(&self, values: &[Elem]) -> usize {
        self.constraints
            .iter()
            .filter(|c| self.is_satisfied(c, values))
            .count()
    }

    fn check_len(&self, a: &Assignment) -> Result<(), InstanceError> {
        if a.len() != self.num_vars {
            Err(InstanceError::LengthMismatch {
                expected: self.num_vars,
                found: a.len(),
            })
        } else if let Some(&bad) = a.0.iter().find(|&&x| x >= self.group.order()) {
            Err(InstanceError::Invalid(format!("assignment value {bad} out of range")))
        } else {
            Ok(())
        }
    }

    /// Exact fraction of satisfied constraints; `1` for an empty instance.
    pub fn evaluate(&self, a: &Assignment) -> Result<Ratio<u64>, InstanceError> {
        self.check_len(a)?;
        if self.constraints.is_empty() {
            return Ok(Ratio::from_integer(1));
        }
        Ok(Ratio::new(
            self.satisfied_count(&a.0) as u64,
            self.constraints.len() as u64,
        ))
    }

    /// Writes the instance in the text format read by [`parse_instance`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "group {}", self.group.name()).unwrap();
        let s: Vec<String> = self.s.iter().map(|x| x.to_string()).collect();
        writeln!(out, "S {}", s.join(" ")).unwrap();
        writeln!(
            out,
            "k {} n {} m {}",
            self.arity,
            self.num_vars,
            self.constraints.len()
        )
        .unwrap();
        for c in &self.constraints {
            let parts: Vec<String> = c
                .iter()
                .map(|l| format!("{} {}", l.shift, l.var))
                .collect();
            writeln!(out, "{}", parts.join(" ")).unwrap();
        }
        out
    }
}

fn check_params(
    g: &FiniteGroup,
    s: &[Elem],
    k: usize,
    n: usize,
    m: usize,
) -> Result<(), InstanceError> {
    let err = |m: String| Err(InstanceError::ParameterError(m));
    if k < 2 {
        return err(format!("arity k = {k} must be at least 2"));
    }
    if n < k {
        return err(format!("need n >= k, got n = {n}, k = {k}"));
    }
    if m < 1 {
        return err("need at least one constraint".into());
    }
    if s.is_empty() || s.iter().any(|&x| x >= g.order()) {
        return err("S must be a non-empty set of valid element ids".into());
    }
    Ok(())
}

/// Draws one constraint on distinct variables that the planted values satisfy.
fn planted_constraint(
    g: &FiniteGroup,
    s: &[Elem],
    k: usize,
    planted: &[Elem],
    rng: &mut ChaCha8Rng,
) -> Constraint {
    let vars = sample(rng, planted.len(), k).into_vec();
    let mut lits: Vec<Literal> = vars[..k - 1]
        .iter()
        .map(|&var| Literal {
            shift: rng.gen_range(0..g.order()),
            var,
        })
        .collect();
    let target = s[rng.gen_range(0..s.len())];
    let partial = lits.iter().fold(g.identity(), |acc, l| {
        g.op(acc, g.op(l.shift, planted[l.var]))
    });
    let last = vars[k - 1];
    // partial ∗ a_k ∗ x_last = target
    let shift = g.op(g.op(g.inv(partial), target), g.inv(planted[last]));
    lits.push(Literal { shift, var: last });
    lits
}

/// Random instance together with a hidden assignment satisfying every
/// constraint.
pub fn generate_planted(
    group: Arc<FiniteGroup>,
    s: &[Elem],
    k: usize,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<(Instance, Assignment), InstanceError> {
    generate_noisy(group, s, k, n, m, 0.0, seed)
}

/// Planted instance where each constraint, independently with probability
/// `noise`, gets fresh uniformly random shifts instead.
pub fn generate_noisy(
    group: Arc<FiniteGroup>,
    s: &[Elem],
    k: usize,
    n: usize,
    m: usize,
    noise: f64,
    seed: u64,
) -> Result<(Instance, Assignment), InstanceError> {
    check_params(&group, s, k, n, m)?;
    if !(0.0..=1.0).contains(&noise) {
        return Err(InstanceError::ParameterError(format!(
            "noise {noise} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = group.as_ref();
    let planted: Vec<Elem> = (0..n).map(|_| rng.gen_range(0..g.order())).collect();
    let constraints = (0..m)
        .map(|_| {
            let mut c = planted_constraint(g, s, k, &planted, &mut rng);
            if noise > 0.0 && rng.gen_bool(noise) {
                for lit in c.iter_mut() {
                    lit.shift = rng.gen_range(0..g.order());
                }
            }
            c
        })
        .collect();
    let inst = Instance::new(group, s, k, n, constraints)?;
    Ok((inst, Assignment(planted)))
}

/// Parses the text format:
///
/// ```text
/// group Z4xZ4          # builtin name or file:<path>
/// S 1 4
/// k 3 n 5 m 2
/// 0 0 3 1 2 4          # a1 i1 a2 i2 a3 i3
/// 1 2 0 3 0 4
/// ```
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let syntax = |line: usize, msg: &str| InstanceError::SyntaxError {
        line,
        msg: msg.to_string(),
    };
    let last_line = text.lines().count().max(1);

    let (line, group_line) = lines
        .next()
        .ok_or_else(|| syntax(last_line, "missing `group` line"))?;
    let name = match group_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["group", name] => name.to_string(),
        _ => return Err(syntax(line, "expected `group <name>`")),
    };
    let group = make_group(&name).map_err(|e| InstanceError::UnknownGroup {
        line,
        name: name.clone(),
        reason: e.to_string(),
    })?;
    let order = group.order();

    let parse_num = |line: usize, tok: &str| -> Result<usize, InstanceError> {
        tok.parse::<usize>()
            .map_err(|_| syntax(line, &format!("expected a non-negative integer, found `{tok}`")))
    };
    let parse_elem = |line: usize, tok: &str| -> Result<Elem, InstanceError> {
        let id = parse_num(line, tok)?;
        if id >= order {
            return Err(InstanceError::ElementOutOfRange { line, id, order });
        }
        Ok(id)
    };

    let (line, s_line) = lines
        .next()
        .ok_or_else(|| syntax(last_line, "missing `S` line"))?;
    let mut tokens = s_line.split_whitespace();
    if tokens.next() != Some("S") {
        return Err(syntax(line, "expected `S <id> <id> ...`"));
    }
    let s: Vec<Elem> = tokens
        .map(|t| parse_elem(line, t))
        .collect::<Result<_, _>>()?;
    if s.is_empty() {
        return Err(syntax(line, "S must list at least one element"));
    }

    let (line, dims) = lines
        .next()
        .ok_or_else(|| syntax(last_line, "missing `k <int> n <int> m <int>` line"))?;
    let (k, n, m) = match dims.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["k", k, "n", n, "m", m] => (parse_num(line, k)?, parse_num(line, n)?, parse_num(line, m)?),
        _ => return Err(syntax(line, "expected `k <int> n <int> m <int>`")),
    };
    if k < 2 {
        return Err(syntax(line, "arity k must be at least 2"));
    }

    let mut constraints = Vec::with_capacity(m);
    for (line, body) in lines {
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 2 * k {
            return Err(syntax(
                line,
                &format!("expected {} tokens (k shift/variable pairs), found {}", 2 * k, toks.len()),
            ));
        }
        let c = toks
            .chunks(2)
            .map(|pair| {
                let shift = parse_elem(line, pair[0])?;
                let var = parse_num(line, pair[1])?;
                if var >= n {
                    return Err(syntax(line, &format!("variable index {var} not below n = {n}")));
                }
                Ok(Literal { shift, var })
            })
            .collect::<Result<Constraint, InstanceError>>()?;
        constraints.push(c);
    }
    if constraints.len() != m {
        return Err(syntax(
            last_line,
            &format!("header declares m = {m} constraints, found {}", constraints.len()),
        ));
    }
    Instance::new(Arc::new(group), &s, k, n, constraints)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, InstanceError> {
    parse_instance(&std::fs::read_to_string(path)?)
}
