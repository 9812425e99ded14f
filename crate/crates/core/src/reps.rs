//! Characters and irreducible representations of small groups, and the
//! averaging gaps over `S` that the hardness analysis relies on.
//!
//! One-dimensional characters come from the abelianization `G/[G,G]` for
//! any group. Higher-dimensional irreps are read from a bundled catalog
//! (`data/irreps.txt`) covering S3, D4 and Q8.

use std::f64::consts::TAU;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::fourier::{Characters, FourierError};
use crate::group::{Elem, FiniteGroup, GroupError};
use crate::hs::HsResult;
use crate::quotient::quotient;
use crate::subgroup::{commutator_subgroup, Subgroup};

const CATALOG_TEXT: &str = include_str!("../data/irreps.txt");

/// Tolerance for algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Margin a gap must clear to count as strictly positive.
pub const GAP_MARGIN: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("catalog line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no catalog entry for group {0}")]
    NotInCatalog(String),
    #[error("catalog entry {entry} has order {catalog}, group has order {group}")]
    OrderMismatch {
        entry: String,
        catalog: usize,
        group: usize,
    },
    #[error("hypothesis not met: S⁻¹S does not generate H_S (largest norm {max_norm:.12})")]
    HypothesisNotMet { max_norm: f64 },
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl From<FourierError> for RepError {
    fn from(e: FourierError) -> Self {
        match e {
            FourierError::Group(g) => RepError::Group(g),
            other => unreachable!("abelianization is abelian: {other}"),
        }
    }
}

/// Exact matrix entry `c · exp(2πi k/m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootEntry {
    pub coeff: Ratio<i64>,
    pub turn: Ratio<i64>,
}

impl RootEntry {
    pub fn to_complex(&self) -> Complex64 {
        let c = *self.coeff.numer() as f64 / *self.coeff.denom() as f64;
        let t = *self.turn.numer() as f64 / *self.turn.denom() as f64;
        Complex64::from_polar(c, TAU * t)
    }
}

impl FromStr for RootEntry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "0" {
            return Ok(RootEntry {
                coeff: Ratio::from_integer(0),
                turn: Ratio::from_integer(0),
            });
        }
        let (coeff, root) = match s.split_once('*') {
            Some((c, r)) => (
                c.parse::<Ratio<i64>>().map_err(|_| format!("bad coefficient `{c}`"))?,
                r,
            ),
            None => (Ratio::from_integer(1), s),
        };
        let turn = root
            .strip_prefix("e(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("bad entry `{s}`"))?
            .parse::<Ratio<i64>>()
            .map_err(|_| format!("bad root of unity `{s}`"))?;
        Ok(RootEntry { coeff, turn })
    }
}

#[derive(Clone, Debug)]
pub struct Irrep {
    pub dim: usize,
    /// `ρ(g)` indexed by element ID.
    pub matrices: Vec<DMatrix<Complex64>>,
}

impl Irrep {
    pub fn character(&self, g: Elem) -> Complex64 {
        self.matrices[g].trace()
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub group: String,
    pub order: usize,
    pub irreps: Vec<Irrep>,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// The catalog bundled with the crate.
    pub fn builtin() -> Self {
        Self::parse(CATALOG_TEXT).expect("bundled catalog parses")
    }

    pub fn get(&self, group: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.group == group)
    }

    /// Entry for `g`, checked against its order.
    pub fn entry_for(&self, g: &FiniteGroup) -> Result<&CatalogEntry, RepError> {
        let entry = self
            .get(g.name())
            .ok_or_else(|| RepError::NotInCatalog(g.name().to_string()))?;
        if entry.order != g.order() {
            return Err(RepError::OrderMismatch {
                entry: entry.group.clone(),
                catalog: entry.order,
                group: g.order(),
            });
        }
        Ok(entry)
    }

    pub fn parse(text: &str) -> Result<Self, RepError> {
        let mut entries: Vec<CatalogEntry> = Vec::new();
        let mut pending: Option<(usize, Vec<Option<DMatrix<Complex64>>>)> = None;

        fn flush(
            entries: &mut [CatalogEntry],
            pending: &mut Option<(usize, Vec<Option<DMatrix<Complex64>>>)>,
            line: usize,
        ) -> Result<(), RepError> {
            if let Some((dim, mats)) = pending.take() {
                let entry = entries.last_mut().expect("irrep follows a group line");
                let matrices = mats
                    .into_iter()
                    .enumerate()
                    .map(|(e, m)| {
                        m.ok_or_else(|| RepError::Parse {
                            line,
                            msg: format!("irrep of {} lacks element {e}", entry.group),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                entry.irreps.push(Irrep { dim, matrices });
            }
            Ok(())
        }

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| RepError::Parse { line, msg };
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match tokens[0] {
                "group" => {
                    flush(&mut entries, &mut pending, line)?;
                    let [_, name, order] = tokens[..] else {
                        return Err(err("expected `group <name> <order>`".into()));
                    };
                    let order = order
                        .parse()
                        .map_err(|_| err(format!("bad order `{order}`")))?;
                    entries.push(CatalogEntry {
                        group: name.to_string(),
                        order,
                        irreps: Vec::new(),
                    });
                }
                "irrep" => {
                    flush(&mut entries, &mut pending, line)?;
                    let Some(entry) = entries.last() else {
                        return Err(err("`irrep` before any `group`".into()));
                    };
                    let [_, dim] = tokens[..] else {
                        return Err(err("expected `irrep <dim>`".into()));
                    };
                    let dim: usize = dim.parse().map_err(|_| err(format!("bad dimension `{dim}`")))?;
                    if dim == 0 {
                        return Err(err("dimension must be positive".into()));
                    }
                    pending = Some((dim, vec![None; entry.order]));
                }
                id => {
                    let Some((dim, mats)) = pending.as_mut() else {
                        return Err(err("matrix line outside an irrep".into()));
                    };
                    let id: usize = id.parse().map_err(|_| err(format!("bad element `{id}`")))?;
                    if id >= mats.len() {
                        return Err(err(format!("element {id} out of range")));
                    }
                    let rest = content[content.find(char::is_whitespace).unwrap_or(content.len())..].trim();
                    let rows: Vec<&str> = rest.split('|').collect();
                    if rows.len() != *dim {
                        return Err(err(format!("{} rows, expected {dim}", rows.len())));
                    }
                    let mut m = DMatrix::zeros(*dim, *dim);
                    for (r, row) in rows.iter().enumerate() {
                        let cells: Vec<&str> = row.split_whitespace().collect();
                        if cells.len() != *dim {
                            return Err(err(format!("row {r} has {} entries, expected {dim}", cells.len())));
                        }
                        for (c, cell) in cells.iter().enumerate() {
                            m[(r, c)] = cell.parse::<RootEntry>().map_err(err)?.to_complex();
                        }
                    }
                    if mats[id].replace(m).is_some() {
                        return Err(err(format!("element {id} listed twice")));
                    }
                }
            }
        }
        flush(&mut entries, &mut pending, text.lines().count())?;
        Ok(Catalog { entries })
    }
}

/// Largest deviations from the defining identities; all should be ~0.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogValidation {
    pub group: String,
    pub dims: Vec<usize>,
    pub sum_dim_squared: usize,
    pub homomorphism_error: f64,
    pub unitarity_error: f64,
    /// `|⟨χ_ρ, χ_σ⟩ − δ|` over pairs of irreps.
    pub character_orthogonality_error: f64,
    /// `|Σ_g ρ_ij(g) conj(σ_kl(g)) − δ |G|/dim|` over all entries.
    pub entry_orthogonality_error: f64,
}

impl CatalogValidation {
    pub fn passes(&self, order: usize) -> bool {
        self.sum_dim_squared == order
            && self.homomorphism_error < IDENTITY_TOL
            && self.unitarity_error < IDENTITY_TOL
            && self.character_orthogonality_error < IDENTITY_TOL
            && self.entry_orthogonality_error < IDENTITY_TOL
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn validate_entry(entry: &CatalogEntry, g: &FiniteGroup) -> CatalogValidation {
    let n = g.order();
    let mut homomorphism_error: f64 = 0.0;
    let mut unitarity_error: f64 = 0.0;
    for rho in &entry.irreps {
        let id = DMatrix::<Complex64>::identity(rho.dim, rho.dim);
        for a in g.elements() {
            let m = &rho.matrices[a];
            unitarity_error = unitarity_error.max(max_abs(&(m * m.adjoint() - &id)));
            for b in g.elements() {
                let diff = m * &rho.matrices[b] - &rho.matrices[g.op(a, b)];
                homomorphism_error = homomorphism_error.max(max_abs(&diff));
            }
        }
    }

    let mut character_orthogonality_error: f64 = 0.0;
    let mut entry_orthogonality_error: f64 = 0.0;
    for (p, rho) in entry.irreps.iter().enumerate() {
        for (q, sigma) in entry.irreps.iter().enumerate() {
            let inner: Complex64 = g
                .elements()
                .map(|x| rho.character(x) * sigma.character(x).conj())
                .sum::<Complex64>()
                / n as f64;
            let want = if p == q { 1.0 } else { 0.0 };
            character_orthogonality_error =
                character_orthogonality_error.max((inner - want).norm());
            for i in 0..rho.dim {
                for j in 0..rho.dim {
                    for k in 0..sigma.dim {
                        for l in 0..sigma.dim {
                            let s: Complex64 = g
                                .elements()
                                .map(|x| rho.matrices[x][(i, j)] * sigma.matrices[x][(k, l)].conj())
                                .sum();
                            let want = if p == q && i == k && j == l {
                                n as f64 / rho.dim as f64
                            } else {
                                0.0
                            };
                            entry_orthogonality_error =
                                entry_orthogonality_error.max((s - want).norm());
                        }
                    }
                }
            }
        }
    }

    CatalogValidation {
        group: entry.group.clone(),
        dims: entry.irreps.iter().map(|r| r.dim).collect(),
        sum_dim_squared: entry.irreps.iter().map(|r| r.dim * r.dim).sum(),
        homomorphism_error,
        unitarity_error,
        character_orthogonality_error,
        entry_orthogonality_error,
    }
}

/// A homomorphism `G → U(1)` with exact values `exp(2πi phase/exponent)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCharacter {
    pub phases: Vec<u64>,
    pub exponent: u64,
}

impl LinearCharacter {
    pub fn value(&self, g: Elem) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.phases[g] as f64 / self.exponent as f64)
    }

    pub fn is_trivial(&self) -> bool {
        self.phases.iter().all(|&p| p == 0)
    }

    /// Identically 1 on `h`, hence constant on each coset of `h`.
    pub fn constant_on(&self, h: &Subgroup) -> bool {
        h.elements().iter().all(|&x| self.phases[x] == 0)
    }

    pub fn conj(&self) -> Self {
        LinearCharacter {
            phases: self
                .phases
                .iter()
                .map(|&p| (self.exponent - p) % self.exponent)
                .collect(),
            exponent: self.exponent,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.exponent, other.exponent, "characters of the same group");
        LinearCharacter {
            phases: self
                .phases
                .iter()
                .zip(&other.phases)
                .map(|(a, b)| (a + b) % self.exponent)
                .collect(),
            exponent: self.exponent,
        }
    }
}

/// All one-dimensional characters of `g`, pulled back from the dual of
/// `G/[G,G]`. There are exactly `|G/[G,G]|` of them; the trivial one is first.
pub fn enumerate_1dim_characters(g: &std::sync::Arc<FiniteGroup>) -> Vec<LinearCharacter> {
    let comm = commutator_subgroup(g);
    let ab = quotient(g, &comm).expect("commutator subgroup is normal");
    let chars = Characters::new(ab.group()).expect("abelianization is abelian");
    let exponent = chars.exponent();
    (0..ab.order())
        .map(|a| LinearCharacter {
            phases: g.elements().map(|x| chars.phase(a, ab.project(x))).collect(),
            exponent,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterGap {
    /// Index into [`enumerate_1dim_characters`].
    pub character: usize,
    /// `|E_{s∈S} χ(s⁻¹)|`.
    pub average: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonGapReport {
    pub characters: usize,
    pub constant_on_hs: usize,
    pub expected_constant: usize,
    /// One entry per character not constant on `H_S`.
    pub nonconstant: Vec<CharacterGap>,
    pub max_average: Option<f64>,
    /// `1 − max_average`; absent when no character is non-constant on `H_S`.
    pub gap: Option<f64>,
    /// `1 − |(|G|−1)/|G| + e^{2πi/|G|}/|G||`, for comparison only.
    pub reference_gap: f64,
    /// Count matches and the gap (if any) is at least [`GAP_MARGIN`].
    pub holds: bool,
}

/// `1 − |(|G|−1)/|G| + e^{2πi/|G|}/|G||`.
pub fn reference_epsilon(order: usize) -> f64 {
    let n = order as f64;
    let z = Complex64::new((n - 1.0) / n, 0.0) + Complex64::from_polar(1.0 / n, TAU / n);
    1.0 - z.norm()
}

pub fn check_epsilon_gap(
    g: &std::sync::Arc<FiniteGroup>,
    s: &[Elem],
    hs: &HsResult,
) -> EpsilonGapReport {
    let chars = enumerate_1dim_characters(g);
    let constant_on_hs = chars.iter().filter(|c| c.constant_on(&hs.subgroup)).count();
    let expected_constant = g.order() / hs.subgroup.order();
    let nonconstant: Vec<CharacterGap> = chars
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.constant_on(&hs.subgroup))
        .map(|(i, c)| CharacterGap {
            character: i,
            average: (s.iter().map(|&x| c.value(g.inv(x))).sum::<Complex64>() / s.len() as f64)
                .norm(),
        })
        .collect();
    let max_average = nonconstant.iter().map(|c| c.average).reduce(f64::max);
    let gap = max_average.map(|m| 1.0 - m);
    EpsilonGapReport {
        characters: chars.len(),
        constant_on_hs,
        expected_constant,
        holds: constant_on_hs == expected_constant && gap.is_none_or(|v| v >= GAP_MARGIN),
        nonconstant,
        max_average,
        gap,
        reference_gap: reference_epsilon(g.order()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IrrepNorm {
    /// Position of the irrep in its catalog entry.
    pub irrep: usize,
    pub dim: usize,
    /// Spectral norm of `E_{s∈S} ρ(s⁻¹)`.
    pub norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormGapReport {
    pub norms: Vec<IrrepNorm>,
    pub max_norm: Option<f64>,
    pub gap: Option<f64>,
    pub hypothesis_met: bool,
    pub holds: bool,
}

pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Norms of `M = E_{s∈S} ρ(s⁻¹)` for every irrep of dimension at least 2,
/// without checking any hypothesis.
pub fn measure_operator_norms(entry: &CatalogEntry, g: &FiniteGroup, s: &[Elem]) -> NormGapReport {
    let norms: Vec<IrrepNorm> = entry
        .irreps
        .iter()
        .enumerate()
        .filter(|(_, r)| r.dim >= 2)
        .map(|(i, r)| {
            let sum = s
                .iter()
                .fold(DMatrix::zeros(r.dim, r.dim), |acc, &x| acc + &r.matrices[g.inv(x)]);
            IrrepNorm {
                irrep: i,
                dim: r.dim,
                norm: spectral_norm(&(sum / Complex64::new(s.len() as f64, 0.0))),
            }
        })
        .collect();
    let max_norm = norms.iter().map(|n| n.norm).reduce(f64::max);
    let gap = max_norm.map(|m| 1.0 - m);
    NormGapReport {
        holds: gap.is_none_or(|v| v >= GAP_MARGIN),
        norms,
        max_norm,
        gap,
        hypothesis_met: true,
    }
}

/// Like [`measure_operator_norms`], but fails with
/// [`RepError::HypothesisNotMet`] when `S⁻¹S` does not generate `H_S`.
pub fn check_operator_norm_gap(
    entry: &CatalogEntry,
    g: &FiniteGroup,
    s: &[Elem],
    hs: &HsResult,
) -> Result<NormGapReport, RepError> {
    let report = measure_operator_norms(entry, g, s);
    if !hs.generated_by_sinv_s {
        return Err(RepError::HypothesisNotMet {
            max_norm: report.max_norm.unwrap_or(0.0),
        });
    }
    Ok(report)
}

/// Everything `check-reps` reports for one `(G, S)`.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub group: String,
    pub s: Vec<Elem>,
    pub hs_order: usize,
    pub generated_by_sinv_s: bool,
    pub epsilon: EpsilonGapReport,
    /// Absent for groups outside the catalog.
    pub operator_norm: Option<NormGapReport>,
    pub catalog: Option<CatalogValidation>,
}

pub fn gap_report(
    g: &std::sync::Arc<FiniteGroup>,
    s: &[Elem],
    hs: &HsResult,
    catalog: &Catalog,
) -> GapReport {
    let mut s_sorted = s.to_vec();
    s_sorted.sort_unstable();
    s_sorted.dedup();
    let entry = catalog.entry_for(g).ok();
    let operator_norm = entry.map(|e| {
        let mut r = measure_operator_norms(e, g, &s_sorted);
        r.hypothesis_met = hs.generated_by_sinv_s;
        r
    });
    GapReport {
        group: g.name().to_string(),
        hs_order: hs.subgroup.order(),
        generated_by_sinv_s: hs.generated_by_sinv_s,
        epsilon: check_epsilon_gap(g, &s_sorted, hs),
        operator_norm,
        catalog: entry.map(|e| validate_entry(e, g)),
        s: s_sorted,
    }
}
