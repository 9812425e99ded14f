//! Subgroups as sorted element sets, generated subgroups and normality.

use crate::group::{Elem, FiniteGroup, GroupError};

/// A subgroup of some parent [`FiniteGroup`], stored as a sorted element list
/// plus a membership mask over the parent's IDs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<Elem>,
    members: Vec<bool>,
}

impl Subgroup {
    pub fn trivial(g: &FiniteGroup) -> Self {
        Self::from_mask(vec_with(g.order(), [g.identity()]))
    }

    pub fn whole(g: &FiniteGroup) -> Self {
        Self::from_mask(vec![true; g.order()])
    }

    /// Wraps an element set after checking it really is a subgroup of `g`.
    pub fn from_elements(g: &FiniteGroup, elements: &[Elem]) -> Result<Self, GroupError> {
        for &a in elements {
            g.check_element(a)?;
        }
        let sub = Self::from_mask(vec_with(g.order(), elements.iter().copied()));
        let closed = sub.contains(g.identity())
            && sub
                .elements
                .iter()
                .all(|&a| sub.contains(g.inv(a)) && sub.elements.iter().all(|&b| sub.contains(g.op(a, b))));
        if closed {
            Ok(sub)
        } else {
            Err(GroupError::MalformedTable(
                "element set is not closed under the group operation".into(),
            ))
        }
    }

    fn from_mask(members: Vec<bool>) -> Self {
        let elements = members
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        Subgroup { elements, members }
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn parent_order(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn contains(&self, a: Elem) -> bool {
        self.members.get(a).copied().unwrap_or(false)
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&a| other.contains(a))
    }

    /// Index of the subgroup in its parent.
    pub fn index(&self) -> usize {
        self.parent_order() / self.order()
    }
}

fn vec_with(n: usize, items: impl IntoIterator<Item = Elem>) -> Vec<bool> {
    let mut v = vec![false; n];
    for a in items {
        v[a] = true;
    }
    v
}

/// Smallest subgroup of `g` containing `gens`.
///
/// Closure by right multiplication with the generators; in a finite group this
/// already yields inverses, since every element has finite order.
pub fn generated_subgroup(
    g: &FiniteGroup,
    gens: impl IntoIterator<Item = Elem>,
) -> Result<Subgroup, GroupError> {
    let mut gens: Vec<Elem> = gens
        .into_iter()
        .map(|a| g.check_element(a))
        .collect::<Result<_, _>>()?;
    gens.sort_unstable();
    gens.dedup();
    gens.retain(|&a| a != g.identity());

    let mut members = vec![false; g.order()];
    members[g.identity()] = true;
    let mut frontier = vec![g.identity()];
    while let Some(x) = frontier.pop() {
        for &s in &gens {
            let y = g.op(x, s);
            if !members[y] {
                members[y] = true;
                frontier.push(y);
            }
        }
    }
    Ok(Subgroup::from_mask(members))
}

/// The subgroup generated by all commutators `a⁻¹b⁻¹ab`.
pub fn commutator_subgroup(g: &FiniteGroup) -> Subgroup {
    let comms = g
        .elements()
        .flat_map(|a| g.elements().map(move |b| (a, b)))
        .map(|(a, b)| g.commutator(a, b));
    generated_subgroup(g, comms).expect("commutators are group elements")
}

/// `true` iff `g h g⁻¹ ∈ H` for every `g ∈ G` and `h ∈ H`.
pub fn is_normal(g: &FiniteGroup, h: &Subgroup) -> bool {
    g.elements()
        .all(|x| h.elements().iter().all(|&y| h.contains(g.conjugate(x, y))))
}

/// The left coset `a H` as a sorted element list.
pub fn left_coset(g: &FiniteGroup, a: Elem, h: &Subgroup) -> Vec<Elem> {
    let mut coset: Vec<Elem> = h.elements().iter().map(|&x| g.op(a, x)).collect();
    coset.sort_unstable();
    coset
}

/// Every subgroup of `g`, sorted by order and then by element list.
///
/// Starts from the cyclic subgroups and closes under joins with single
/// elements; every subgroup appears because it is generated by its elements.
pub fn all_subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    use std::collections::HashSet;

    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    let mut found = Vec::new();
    let mut queue = Vec::new();
    for a in g.elements() {
        let h = generated_subgroup(g, [a]).unwrap();
        if seen.insert(h.elements().to_vec()) {
            queue.push(h.clone());
            found.push(h);
        }
    }
    while let Some(h) = queue.pop() {
        if h.order() == g.order() {
            continue;
        }
        for a in g.elements().filter(|&a| !h.contains(a)) {
            let joined = generated_subgroup(g, h.elements().iter().copied().chain([a])).unwrap();
            if seen.insert(joined.elements().to_vec()) {
                queue.push(joined.clone());
                found.push(joined);
            }
        }
    }
    found.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements().cmp(b.elements())));
    found
}
