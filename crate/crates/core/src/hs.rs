//! The minimal normal subgroup `H_S` that contains the commutator subgroup
//! and has `S` inside one of its cosets.

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::group::{Elem, FiniteGroup, GroupError};
use crate::subgroup::{all_subgroups, commutator_subgroup, generated_subgroup, is_normal, Subgroup};

/// Largest group the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_ORDER: usize = 24;

#[derive(Debug, Error)]
pub enum HsError {
    #[error("S must be non-empty")]
    EmptyS,
    #[error("group order {0} is too large for exhaustive subgroup search (max {BRUTE_FORCE_MAX_ORDER})")]
    GroupTooLarge(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsResult {
    pub subgroup: Subgroup,
    /// `g` with `S ⊆ g H_S`.
    pub coset_rep: Elem,
    /// `|S| / |H_S|` in lowest terms.
    pub ratio: Ratio<u64>,
    /// Whether `{s⁻¹t : s, t ∈ S}` alone generates `H_S`.
    pub generated_by_sinv_s: bool,
    s_len: usize,
}

impl HsResult {
    pub fn ratio_num(&self) -> u64 {
        self.s_len as u64
    }

    pub fn ratio_den(&self) -> u64 {
        self.subgroup.order() as u64
    }

    pub fn summary(&self, g: &FiniteGroup) -> HsSummary {
        HsSummary {
            group: g.name().to_string(),
            elements: self.subgroup.elements().to_vec(),
            labels: self.subgroup.elements().iter().map(|&x| g.label(x)).collect(),
            order: self.subgroup.order(),
            coset_rep: self.coset_rep,
            coset_rep_label: g.label(self.coset_rep),
            ratio_num: self.ratio_num(),
            ratio_den: self.ratio_den(),
            ratio: self.ratio.to_string(),
            generated_by_sinv_s: self.generated_by_sinv_s,
        }
    }
}

/// Serializable view of an [`HsResult`].
#[derive(Clone, Debug, Serialize)]
pub struct HsSummary {
    pub group: String,
    pub elements: Vec<Elem>,
    pub labels: Vec<String>,
    pub order: usize,
    pub coset_rep: Elem,
    pub coset_rep_label: String,
    pub ratio_num: u64,
    pub ratio_den: u64,
    pub ratio: String,
    pub generated_by_sinv_s: bool,
}

fn normalize_s(g: &FiniteGroup, s: &[Elem]) -> Result<Vec<Elem>, HsError> {
    let mut s: Vec<Elem> = s
        .iter()
        .map(|&x| g.check_element(x))
        .collect::<Result<_, _>>()?;
    s.sort_unstable();
    s.dedup();
    if s.is_empty() {
        return Err(HsError::EmptyS);
    }
    Ok(s)
}

fn sinv_s_generates(g: &FiniteGroup, s: &[Elem], h: &Subgroup) -> bool {
    let quotients = s
        .iter()
        .flat_map(|&a| s.iter().map(move |&b| g.op(g.inv(a), b)));
    generated_subgroup(g, quotients).unwrap() == *h
}

fn finish(g: &FiniteGroup, s: &[Elem], subgroup: Subgroup, coset_rep: Elem) -> HsResult {
    HsResult {
        ratio: Ratio::new(s.len() as u64, subgroup.order() as u64),
        generated_by_sinv_s: sinv_s_generates(g, s, &subgroup),
        subgroup,
        coset_rep,
        s_len: s.len(),
    }
}

/// `H_S = ⟨[G,G] ∪ {s₀⁻¹ s : s ∈ S}⟩` with `s₀ = min S`.
///
/// Any subgroup containing `[G,G]` is normal, and `S ⊆ s₀ H_S` by
/// construction, so both defining conditions hold.
pub fn compute_hs(g: &FiniteGroup, s: &[Elem]) -> Result<HsResult, HsError> {
    let s = normalize_s(g, s)?;
    let s0 = s[0];
    let inv0 = g.inv(s0);
    let comm = commutator_subgroup(g);
    let gens = comm
        .elements()
        .iter()
        .copied()
        .chain(s.iter().map(|&x| g.op(inv0, x)));
    let h = generated_subgroup(g, gens)?;
    Ok(finish(g, &s, h, s0))
}

/// Exhaustive-search oracle for [`compute_hs`]: the smallest normal subgroup
/// containing `[G,G]` with `S` in one coset, ties broken by element list.
pub fn brute_force_hs(g: &FiniteGroup, s: &[Elem]) -> Result<HsResult, HsError> {
    if g.order() > BRUTE_FORCE_MAX_ORDER {
        return Err(HsError::GroupTooLarge(g.order()));
    }
    let lattice = SubgroupLattice::new(g);
    lattice.brute_force_hs(s)
}

/// All subgroups of a group, enumerated once and reused across many oracle
/// queries.
pub struct SubgroupLattice<'g> {
    group: &'g FiniteGroup,
    commutator: Subgroup,
    candidates: Vec<Subgroup>,
}

impl<'g> SubgroupLattice<'g> {
    pub fn new(group: &'g FiniteGroup) -> Self {
        let commutator = commutator_subgroup(group);
        let candidates = all_subgroups(group)
            .into_iter()
            .filter(|h| commutator.is_subset_of(h) && is_normal(group, h))
            .collect();
        SubgroupLattice {
            group,
            commutator,
            candidates,
        }
    }

    /// Normal subgroups containing `[G,G]`, sorted by order then element list.
    pub fn candidates(&self) -> &[Subgroup] {
        &self.candidates
    }

    pub fn commutator(&self) -> &Subgroup {
        &self.commutator
    }

    pub fn brute_force_hs(&self, s: &[Elem]) -> Result<HsResult, HsError> {
        let g = self.group;
        let s = normalize_s(g, s)?;
        for h in &self.candidates {
            let rep = g
                .elements()
                .find(|&x| s.iter().all(|&y| h.contains(g.op(g.inv(x), y))));
            if let Some(rep) = rep {
                return Ok(finish(g, &s, h.clone(), rep));
            }
        }
        unreachable!("G itself always qualifies")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;

    #[test]
    fn z4xz4_worked_example() {
        let g = make_group("Z4xZ4").unwrap();
        let hs = compute_hs(&g, &[1, 4]).unwrap();
        // (0,0), (1,3), (2,2), (3,1)
        assert_eq!(hs.subgroup.elements(), &[0, 7, 10, 13]);
        assert_eq!(hs.coset_rep, 1);
        assert_eq!(hs.ratio, Ratio::new(1, 2));
        assert_eq!((hs.ratio_num(), hs.ratio_den()), (2, 4));
        assert!(hs.generated_by_sinv_s);
        assert_eq!(brute_force_hs(&g, &[1, 4]).unwrap().subgroup, hs.subgroup);
    }

    #[test]
    fn identity_only_in_abelian_group() {
        let g = make_group("Z6").unwrap();
        let hs = compute_hs(&g, &[0]).unwrap();
        assert_eq!(hs.subgroup.order(), 1);
        assert_eq!(hs.ratio, Ratio::new(1, 1));
    }

    #[test]
    fn s3_identity_gives_a3() {
        let g = make_group("S3").unwrap();
        let hs = compute_hs(&g, &[0]).unwrap();
        assert_eq!(hs.subgroup.order(), 3);
        assert_eq!(hs.ratio, Ratio::new(1, 3));
        assert!(!hs.generated_by_sinv_s);
        assert_eq!(brute_force_hs(&g, &[0]).unwrap().subgroup, hs.subgroup);
    }

    #[test]
    fn s_equals_z2() {
        let g = make_group("Z2").unwrap();
        let hs = brute_force_hs(&g, &[0, 1]).unwrap();
        assert_eq!(hs.subgroup.order(), 2);
        assert_eq!(hs.ratio, Ratio::new(1, 1));
    }

    #[test]
    fn d4_all_subsets_agree() {
        let g = make_group("D4").unwrap();
        let lattice = SubgroupLattice::new(&g);
        for mask in 1u32..(1 << 8) {
            let s: Vec<Elem> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
            let fast = compute_hs(&g, &s).unwrap();
            let slow = lattice.brute_force_hs(&s).unwrap();
            assert_eq!(fast.subgroup, slow.subgroup, "S = {s:?}");
        }
    }

    #[test]
    fn errors() {
        let g = make_group("Z4").unwrap();
        assert!(matches!(compute_hs(&g, &[]), Err(HsError::EmptyS)));
        assert!(matches!(compute_hs(&g, &[9]), Err(HsError::Group(_))));
        let big = make_group("Z5xZ5").unwrap();
        assert!(matches!(brute_force_hs(&big, &[0]), Err(HsError::GroupTooLarge(25))));
    }
}
