//! Quotient groups `G/H` and the cyclic decomposition of finite abelian groups.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::group::{Elem, FiniteGroup, GroupError};
use crate::snf::{smith_normal_form, IntMatrix};
use crate::subgroup::{is_normal, Subgroup};

/// An isomorphism between a finite abelian group and `Z_{d_1} × … × Z_{d_m}`
/// with `d_1 | d_2 | … | d_m` and every `d_i > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicDecomposition {
    invariants: Vec<u64>,
    coords: Vec<Vec<u64>>,
    index_of: Vec<Elem>,
}

impl CyclicDecomposition {
    /// Decomposes an abelian group.
    ///
    /// Generators are picked greedily (smallest ID not yet generated). For each
    /// new generator `g_i`, the least `m_i` with `m_i g_i` in the span of the
    /// earlier generators gives one relation row, found by discrete log over
    /// that span. The Smith form `U R V = D` of the relation matrix yields the
    /// invariants and the coordinate change `x ↦ xV mod D`.
    ///
    /// Panics if `group` is not abelian.
    pub fn of_abelian(group: &FiniteGroup) -> Self {
        assert!(group.is_abelian(), "cyclic decomposition needs an abelian group");
        let n = group.order();

        // coefficient vectors (over the greedy generators) of spanned elements
        let mut span: Vec<Option<Vec<i64>>> = vec![None; n];
        span[group.identity()] = Some(Vec::new());
        let mut spanned = vec![group.identity()];
        let mut relations: Vec<Vec<i64>> = Vec::new();

        for cand in group.elements() {
            if span[cand].is_some() {
                continue;
            }
            let idx = relations.len();
            for coeffs in span.iter_mut().flatten() {
                coeffs.push(0);
            }
            let mut multiple = cand;
            let mut m = 1i64;
            while span[multiple].is_none() {
                multiple = group.op(multiple, cand);
                m += 1;
            }
            let mut row: Vec<i64> = span[multiple]
                .as_ref()
                .unwrap()
                .iter()
                .map(|c| -c)
                .collect();
            row[idx] += m;
            for r in relations.iter_mut() {
                r.push(0);
            }
            relations.push(row);

            let base: Vec<Elem> = spanned.clone();
            let mut step = cand;
            for t in 1..m {
                for &b in &base {
                    let x = group.op(b, step);
                    let mut coeffs = span[b].clone().unwrap();
                    coeffs[idx] += t;
                    span[x] = Some(coeffs);
                    spanned.push(x);
                }
                step = group.op(step, cand);
            }
        }

        let r = relations.len();
        if r == 0 {
            return CyclicDecomposition {
                invariants: Vec::new(),
                coords: vec![Vec::new(); n],
                index_of: vec![group.identity()],
            };
        }
        let smith = smith_normal_form(&IntMatrix::from_rows(&relations));
        let diag: Vec<u64> = smith
            .diagonal()
            .iter()
            .map(|d| d.to_u64().expect("invariant fits in u64"))
            .collect();
        let keep: Vec<usize> = (0..r).filter(|&j| diag[j] > 1).collect();
        let invariants: Vec<u64> = keep.iter().map(|&j| diag[j]).collect();

        let mut coords = vec![Vec::new(); n];
        for x in group.elements() {
            let c: Vec<BigInt> = span[x]
                .as_ref()
                .expect("greedy generators span the group")
                .iter()
                .map(|&v| BigInt::from(v))
                .collect();
            coords[x] = keep
                .iter()
                .map(|&j| {
                    let col: BigInt = (0..r).map(|i| &c[i] * &smith.v[(i, j)]).sum();
                    col.mod_floor(&BigInt::from(diag[j])).to_u64().unwrap()
                })
                .collect();
        }

        let mut decomposition = CyclicDecomposition {
            invariants,
            coords,
            index_of: vec![usize::MAX; n],
        };
        for x in group.elements() {
            let slot = decomposition.mixed_radix(&decomposition.coords[x]);
            decomposition.index_of[slot] = x;
        }
        debug_assert!(decomposition.index_of.iter().all(|&x| x != usize::MAX));
        decomposition
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    /// Coordinates of element `x` in `Z_{d_1} × … × Z_{d_m}`.
    pub fn to_vec(&self, x: Elem) -> &[u64] {
        &self.coords[x]
    }

    /// Element with the given coordinates (each reduced mod its `d_i`).
    pub fn from_vec(&self, v: &[u64]) -> Elem {
        assert_eq!(v.len(), self.invariants.len(), "coordinate length");
        let reduced: Vec<u64> = v
            .iter()
            .zip(&self.invariants)
            .map(|(x, d)| x % d)
            .collect();
        self.index_of[self.mixed_radix(&reduced)]
    }

    fn mixed_radix(&self, v: &[u64]) -> usize {
        v.iter()
            .zip(&self.invariants)
            .fold(0usize, |acc, (&x, &d)| acc * d as usize + x as usize)
    }
}

/// `G/H` for a normal subgroup `H`, with its own Cayley table.
///
/// Cosets are numbered by increasing minimum element; that minimum is the
/// coset's canonical representative.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    parent: Arc<FiniteGroup>,
    normal: Subgroup,
    coset_reps: Vec<Elem>,
    projection: Vec<usize>,
    group: FiniteGroup,
    decomposition: Option<CyclicDecomposition>,
}

impl QuotientGroup {
    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn normal_subgroup(&self) -> &Subgroup {
        &self.normal
    }

    pub fn coset_reps(&self) -> &[Elem] {
        &self.coset_reps
    }

    pub fn coset_rep(&self, coset: usize) -> Elem {
        self.coset_reps[coset]
    }

    /// Coset index of an element of the parent group.
    #[inline]
    pub fn project(&self, x: Elem) -> usize {
        self.projection[x]
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.coset_reps.len()
    }

    /// Cyclic decomposition when the quotient is abelian.
    pub fn decomposition(&self) -> Option<&CyclicDecomposition> {
        self.decomposition.as_ref()
    }

    /// `[d_1, …, d_m]`, or `None` for a non-abelian quotient.
    pub fn abelian_invariants(&self) -> Option<&[u64]> {
        self.decomposition.as_ref().map(|d| d.invariants())
    }

    /// Coordinates of the image of a parent element.
    pub fn project_vec(&self, x: Elem) -> Option<&[u64]> {
        self.decomposition
            .as_ref()
            .map(|d| d.to_vec(self.project(x)))
    }
}

/// Forms `G/H`; fails with [`GroupError::NotNormal`] unless `H ⊴ G`.
pub fn quotient(parent: &Arc<FiniteGroup>, normal: &Subgroup) -> Result<QuotientGroup, GroupError> {
    let g = parent.as_ref();
    if normal.parent_order() != g.order() || !is_normal(g, normal) {
        return Err(GroupError::NotNormal);
    }
    let mut projection = vec![usize::MAX; g.order()];
    let mut coset_reps = Vec::with_capacity(normal.index());
    for x in g.elements() {
        if projection[x] != usize::MAX {
            continue;
        }
        let idx = coset_reps.len();
        coset_reps.push(x);
        for &h in normal.elements() {
            projection[g.op(x, h)] = idx;
        }
    }

    let q = coset_reps.len();
    let mut table = Vec::with_capacity(q * q);
    for &a in &coset_reps {
        for &b in &coset_reps {
            table.push(projection[g.op(a, b)]);
        }
    }
    let labels = coset_reps.iter().map(|&r| format!("[{}]", g.label(r))).collect();
    let group = FiniteGroup::from_table(
        format!("{}/H{}", g.name(), normal.order()),
        q,
        table,
        Some(labels),
    )?;
    let decomposition = group
        .is_abelian()
        .then(|| CyclicDecomposition::of_abelian(&group));

    Ok(QuotientGroup {
        parent: Arc::clone(parent),
        normal: normal.clone(),
        coset_reps,
        projection,
        group,
        decomposition,
    })
}
