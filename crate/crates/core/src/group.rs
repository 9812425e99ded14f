//! Finite groups stored as dense Cayley tables.
//!
//! Every group is validated once at construction and is immutable afterwards.
//! Elements are plain integer IDs `0..order`; all operations are table lookups.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Element identifier inside a [`FiniteGroup`].
pub type Elem = usize;

/// Largest group order accepted by any constructor.
pub const MAX_ORDER: usize = 256;

/// Orders up to this bound get an exhaustive associativity check.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;
const SAMPLED_ASSOC_TRIPLES: usize = 200_000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("table is not associative at ({a}*{b})*{c}")]
    NonAssociativeTable { a: Elem, b: Elem, c: Elem },
    #[error("table has no two-sided identity")]
    MissingIdentity,
    #[error("element {0} has no two-sided inverse")]
    MissingInverse(Elem),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("element id {id} out of range for a group of order {order}")]
    InvalidElementId { id: Elem, order: usize },
    #[error("group order {0} exceeds the supported maximum of {MAX_ORDER}")]
    TooLarge(usize),
    #[error("unknown group descriptor `{0}`")]
    UnknownGroup(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<Elem>,
    inverses: Vec<Elem>,
    identity: Elem,
    labels: Option<Vec<String>>,
}

impl FiniteGroup {
    /// Builds a group from a row-major Cayley table (`table[a * n + b] = a*b`),
    /// validating closure, identity, inverses and associativity.
    pub fn from_table(
        name: impl Into<String>,
        order: usize,
        table: Vec<Elem>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::MalformedTable("order must be positive".into()));
        }
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge(order));
        }
        if table.len() != order * order {
            return Err(GroupError::MalformedTable(format!(
                "expected {} entries, found {}",
                order * order,
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&x| x >= order) {
            return Err(GroupError::InvalidElementId { id: bad, order });
        }
        if let Some(labels) = &labels {
            if labels.len() != order {
                return Err(GroupError::MalformedTable(format!(
                    "{} labels for {} elements",
                    labels.len(),
                    order
                )));
            }
        }

        let at = |a: Elem, b: Elem| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| at(e, a) == a && at(a, e) == a))
            .ok_or(GroupError::MissingIdentity)?;

        let mut inverses = Vec::with_capacity(order);
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or(GroupError::MissingInverse(a))?;
            inverses.push(inv);
        }

        let check = |a: Elem, b: Elem, c: Elem| -> Result<(), GroupError> {
            if at(at(a, b), c) != at(a, at(b, c)) {
                Err(GroupError::NonAssociativeTable { a, b, c })
            } else {
                Ok(())
            }
        };
        if order <= EXHAUSTIVE_ASSOC_LIMIT {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a550c);
            for _ in 0..SAMPLED_ASSOC_TRIPLES {
                check(
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                    rng.gen_range(0..order),
                )?;
            }
        }

        Ok(FiniteGroup {
            name: name.into(),
            order,
            table,
            inverses,
            identity,
            labels,
        })
    }

    fn from_fn(
        name: impl Into<String>,
        order: usize,
        op: impl Fn(Elem, Elem) -> Elem,
        labels: Vec<String>,
    ) -> Result<Self, GroupError> {
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge(order));
        }
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                table.push(op(a, b));
            }
        }
        Self::from_table(name, order, table, Some(labels))
    }

    /// The cyclic group `Z_n` under addition mod `n`.
    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::UnknownGroup("Z0".into()));
        }
        Self::from_fn(
            format!("Z{n}"),
            n,
            |a, b| (a + b) % n,
            (0..n).map(|a| a.to_string()).collect(),
        )
    }

    /// The dihedral group of order `2n`: IDs `0..n` are rotations `r^i`,
    /// IDs `n..2n` are reflections `r^i s`.
    pub fn dihedral(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::UnknownGroup("D0".into()));
        }
        let op = |a: Elem, b: Elem| {
            let (i, x) = (a % n, a / n);
            let (j, y) = (b % n, b / n);
            let rot = if x == 0 { (i + j) % n } else { (i + n - j) % n };
            ((x + y) % 2) * n + rot
        };
        let labels = (0..2 * n)
            .map(|a| {
                let (i, x) = (a % n, a / n);
                match (i, x) {
                    (0, 0) => "e".to_string(),
                    (0, _) => "s".to_string(),
                    (i, 0) => format!("r^{i}"),
                    (i, _) => format!("r^{i}s"),
                }
            })
            .collect();
        Self::from_fn(format!("D{n}"), 2 * n, op, labels)
    }

    /// The symmetric group on `n ≤ 5` points. Elements are permutations in
    /// lexicographic order of their one-line notation (so ID 0 is the identity);
    /// the product is composition `(σ∗τ)(i) = σ(τ(i))`.
    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        if n == 0 || n > 5 {
            return Err(GroupError::UnknownGroup(format!("S{n}")));
        }
        let perms = permutations(n);
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).unwrap();
        let op = |a: Elem, b: Elem| {
            let composed: Vec<usize> = (0..n).map(|i| perms[a][perms[b][i]]).collect();
            index(&composed)
        };
        let labels = perms.iter().map(|p| cycle_notation(p)).collect();
        Self::from_fn(format!("S{n}"), perms.len(), op, labels)
    }

    /// The quaternion group. IDs: `1, -1, i, -i, j, -j, k, -k`.
    pub fn quaternion() -> Self {
        // unit product table over {1,i,j,k}: (unit, negated)
        const UNIT: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let op = |a: Elem, b: Elem| {
            let (u, v) = (a / 2, b / 2);
            let (w, neg) = UNIT[u][v];
            let sign = (a % 2 == 1) ^ (b % 2 == 1) ^ neg;
            2 * w + usize::from(sign)
        };
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Self::from_fn("Q8", 8, op, labels).expect("quaternion table is a group")
    }

    /// Direct product of two groups; see [`FiniteGroup::product_of`].
    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self, GroupError> {
        Self::product_of(&[a, b])
    }

    /// Direct product `G_0 × … × G_r`. Element IDs are mixed-radix with the
    /// first factor most significant, so in `Z4xZ4` the pair `(a, b)` has ID
    /// `4a + b`.
    pub fn product_of(factors: &[&FiniteGroup]) -> Result<Self, GroupError> {
        if factors.is_empty() {
            return Self::cyclic(1);
        }
        let order = factors.iter().try_fold(1usize, |acc, g| {
            acc.checked_mul(g.order)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or(GroupError::TooLarge(acc.saturating_mul(g.order)))
        })?;
        let split = |mut x: Elem| {
            let mut parts = vec![0; factors.len()];
            for (slot, g) in parts.iter_mut().zip(factors).rev() {
                *slot = x % g.order;
                x /= g.order;
            }
            parts
        };
        let join = |parts: &[Elem]| {
            parts
                .iter()
                .zip(factors)
                .fold(0, |acc, (&p, g)| acc * g.order + p)
        };
        let op = |a: Elem, b: Elem| {
            let (pa, pb) = (split(a), split(b));
            let prod: Vec<Elem> = factors
                .iter()
                .enumerate()
                .map(|(i, g)| g.op(pa[i], pb[i]))
                .collect();
            join(&prod)
        };
        let labels = (0..order)
            .map(|x| {
                let parts = split(x);
                let inner: Vec<String> = factors
                    .iter()
                    .zip(&parts)
                    .map(|(g, &p)| g.label(p))
                    .collect();
                format!("({})", inner.join(","))
            })
            .collect();
        let name = factors
            .iter()
            .map(|g| g.name.as_str())
            .collect::<Vec<_>>()
            .join("x");
        Self::from_fn(name, order, op, labels)
    }

    /// Parses the Cayley-table text format:
    ///
    /// ```text
    /// order 4
    /// labels e a b c        # optional
    /// 0 1 2 3
    /// 1 0 3 2
    /// ...
    /// ```
    ///
    /// Blank lines and `#` comments are ignored; the identity is inferred.
    pub fn from_cayley_str(name: impl Into<String>, text: &str) -> Result<Self, GroupError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());

        let header = lines
            .next()
            .ok_or_else(|| GroupError::MalformedTable("empty table".into()))?;
        let order = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["order", n] => n
                .parse::<usize>()
                .map_err(|_| GroupError::MalformedTable(format!("bad order `{n}`")))?,
            _ => {
                return Err(GroupError::MalformedTable(
                    "first line must be `order <n>`".into(),
                ))
            }
        };
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge(order));
        }

        let mut labels = None;
        let mut table = Vec::with_capacity(order * order);
        let mut rows = 0;
        for line in lines {
            let mut tokens = line.split_whitespace().peekable();
            if tokens.peek() == Some(&"labels") {
                if rows > 0 || labels.is_some() {
                    return Err(GroupError::MalformedTable(
                        "`labels` must directly follow the order line".into(),
                    ));
                }
                labels = Some(tokens.skip(1).map(str::to_string).collect());
                continue;
            }
            let row: Vec<Elem> = tokens
                .map(|t| {
                    t.parse::<Elem>()
                        .map_err(|_| GroupError::MalformedTable(format!("bad entry `{t}`")))
                })
                .collect::<Result<_, _>>()?;
            if row.len() != order {
                return Err(GroupError::MalformedTable(format!(
                    "row {rows} has {} entries, expected {order}",
                    row.len()
                )));
            }
            table.extend(row);
            rows += 1;
        }
        if rows != order {
            return Err(GroupError::MalformedTable(format!(
                "{rows} rows, expected {order}"
            )));
        }
        Self::from_table(name, order, table, labels)
    }

    pub fn from_cayley_file(path: impl AsRef<Path>) -> Result<Self, GroupError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| GroupError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_cayley_str(format!("file:{}", path.display()), &text)
    }

    /// Renders the group in the Cayley-table text format.
    pub fn to_cayley_string(&self) -> String {
        let mut out = format!("order {}\n", self.order);
        if let Some(labels) = &self.labels {
            out.push_str("labels ");
            out.push_str(&labels.join(" "));
            out.push('\n');
        }
        for row in self.table.chunks(self.order) {
            let row: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    #[inline]
    pub fn op(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverses[a]
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.order
    }

    pub fn check_element(&self, a: Elem) -> Result<Elem, GroupError> {
        if a < self.order {
            Ok(a)
        } else {
            Err(GroupError::InvalidElementId {
                id: a,
                order: self.order,
            })
        }
    }

    pub fn label(&self, a: Elem) -> String {
        match &self.labels {
            Some(labels) => labels[a].clone(),
            None => a.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| (a..self.order).all(|b| self.op(a, b) == self.op(b, a)))
    }

    /// `a⁻¹ b⁻¹ a b`
    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        let left = self.op(self.inv(a), self.inv(b));
        self.op(self.op(left, a), b)
    }

    /// Left-to-right product of a sequence; the identity for an empty one.
    pub fn product_iter(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items
            .into_iter()
            .fold(self.identity, |acc, x| self.op(acc, x))
    }

    pub fn pow(&self, a: Elem, k: usize) -> Elem {
        (0..k).fold(self.identity, |acc, _| self.op(acc, a))
    }

    pub fn element_order(&self, a: Elem) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.op(x, a);
            k += 1;
        }
        k
    }

    /// `g h g⁻¹`
    pub fn conjugate(&self, g: Elem, h: Elem) -> Elem {
        self.op(self.op(g, h), self.inv(g))
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.name, self.order)
    }
}

/// A buildable group description, as used on the command line and in
/// instance files: `Z<n>`, `D<n>`, `S<n>`, `Q8`, products joined with `x`
/// (`Z4xZ4`, `Z2xS3`), or `file:<path>` for a Cayley-table file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDescriptor {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Quaternion,
    Product(Vec<GroupDescriptor>),
    File(PathBuf),
}

impl GroupDescriptor {
    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        match self {
            GroupDescriptor::Cyclic(n) => FiniteGroup::cyclic(*n),
            GroupDescriptor::Dihedral(n) => FiniteGroup::dihedral(*n),
            GroupDescriptor::Symmetric(n) => FiniteGroup::symmetric(*n),
            GroupDescriptor::Quaternion => Ok(FiniteGroup::quaternion()),
            GroupDescriptor::Product(parts) => {
                let built: Vec<FiniteGroup> =
                    parts.iter().map(|p| p.build()).collect::<Result<_, _>>()?;
                let refs: Vec<&FiniteGroup> = built.iter().collect();
                FiniteGroup::product_of(&refs)
            }
            GroupDescriptor::File(path) => FiniteGroup::from_cayley_file(path),
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(GroupDescriptor::File(PathBuf::from(path)));
        }
        let unknown = || GroupError::UnknownGroup(s.to_string());
        let factor = |f: &str| -> Result<GroupDescriptor, GroupError> {
            if f == "Q8" {
                return Ok(GroupDescriptor::Quaternion);
            }
            let (kind, digits) = f.split_at(f.find(|c: char| c.is_ascii_digit()).ok_or_else(unknown)?);
            let n: usize = digits.parse().map_err(|_| unknown())?;
            match kind {
                "Z" | "C" if n > 0 => Ok(GroupDescriptor::Cyclic(n)),
                "D" if n > 0 => Ok(GroupDescriptor::Dihedral(n)),
                "S" if (1..=5).contains(&n) => Ok(GroupDescriptor::Symmetric(n)),
                _ => Err(unknown()),
            }
        };
        let parts: Vec<GroupDescriptor> = s.split('x').map(factor).collect::<Result<_, _>>()?;
        if parts.len() == 1 {
            Ok(parts.into_iter().next().unwrap())
        } else {
            Ok(GroupDescriptor::Product(parts))
        }
    }
}

/// Builds a group from a descriptor string such as `Z4xZ4` or `file:g.txt`.
pub fn make_group(descriptor: &str) -> Result<FiniteGroup, GroupError> {
    descriptor.parse::<GroupDescriptor>()?.build()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Compact 1-based cycle notation such as `(123)`, `()` for the identity.
fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut x = p[start];
        while x != start {
            seen[x] = true;
            cycle.push(x + 1);
            x = p[x];
        }
        let cycle: String = cycle.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("({cycle})"));
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group() {
        let g = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.inv(0), 0);
    }

    #[test]
    fn z4xz4_named_and_abelian() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let g = FiniteGroup::product(&z4, &z4).unwrap();
        assert_eq!(g.order(), 16);
        assert_eq!(g.name(), "Z4xZ4");
        assert!(g.is_abelian());
        assert_eq!(g.label(1), "(0,1)");
        assert_eq!(g.label(4), "(1,0)");
    }

    #[test]
    fn symmetric3_matches_permutation_composition() {
        let g = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        // independent oracle: compose the explicit permutations
        let perms = permutations(3);
        for a in 0..6 {
            for b in 0..6 {
                let c = g.op(a, b);
                for i in 0..3 {
                    assert_eq!(perms[c][i], perms[a][perms[b][i]]);
                }
            }
        }
    }

    #[test]
    fn dihedral_and_quaternion_shapes() {
        let d4 = FiniteGroup::dihedral(4).unwrap();
        assert_eq!(d4.order(), 8);
        assert!(!d4.is_abelian());
        assert_eq!(d4.element_order(1), 4);
        assert_eq!(d4.element_order(4), 2);

        let q8 = FiniteGroup::quaternion();
        assert!(!q8.is_abelian());
        // i*i = -1, i*j = k, j*i = -k
        assert_eq!(q8.op(2, 2), 1);
        assert_eq!(q8.op(2, 4), 6);
        assert_eq!(q8.op(4, 2), 7);
        assert_eq!(q8.elements().filter(|&x| q8.element_order(x) == 4).count(), 6);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            FiniteGroup::from_table("bad", 2, vec![0, 1, 1, 1], None),
            Err(GroupError::MissingInverse(_)) | Err(GroupError::MissingIdentity)
        ));
        assert!(matches!(
            FiniteGroup::from_table("bad", 2, vec![0, 1, 1], None),
            Err(GroupError::MalformedTable(_))
        ));
        assert!(matches!(
            FiniteGroup::from_table("bad", 2, vec![0, 1, 1, 5], None),
            Err(GroupError::InvalidElementId { .. })
        ));
        // Latin square with identity and inverses but not associative
        let t = vec![
            0, 1, 2, 3, 4, //
            1, 0, 3, 4, 2, //
            2, 4, 0, 1, 3, //
            3, 2, 4, 0, 1, //
            4, 3, 1, 2, 0,
        ];
        assert!(matches!(
            FiniteGroup::from_table("loop", 5, t, None),
            Err(GroupError::NonAssociativeTable { .. })
        ));
        assert!(matches!(
            FiniteGroup::from_table("nolid", 2, vec![1, 1, 0, 0], None),
            Err(GroupError::MissingIdentity)
        ));
    }

    #[test]
    fn cayley_text_round_trip() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let text = g.to_cayley_string();
        let h = FiniteGroup::from_cayley_str("copy", &text).unwrap();
        assert_eq!(g, h);
        assert_eq!(h.label(1), g.label(1));

        let err = FiniteGroup::from_cayley_str("x", "order 2\n0 1\n").unwrap_err();
        assert!(matches!(err, GroupError::MalformedTable(_)));
        let err = FiniteGroup::from_cayley_str("x", "size 2\n0 1\n1 0\n").unwrap_err();
        assert!(matches!(err, GroupError::MalformedTable(_)));
    }

    #[test]
    fn descriptors() {
        assert_eq!(make_group("Z4xZ4").unwrap().order(), 16);
        assert_eq!(make_group("D4").unwrap().order(), 8);
        assert_eq!(make_group("S4").unwrap().order(), 24);
        assert_eq!(make_group("Z2xS3").unwrap().order(), 12);
        assert_eq!(make_group("Q8").unwrap().name(), "Q8");
        assert!(make_group("S9").is_err());
        assert!(make_group("W3").is_err());
        assert!(make_group("Z0").is_err());
        assert!(matches!(make_group("Z16xZ16xZ2"), Err(GroupError::TooLarge(_))));
    }

    #[test]
    fn large_orders_use_sampled_associativity() {
        let g = make_group("Z16xZ16").unwrap();
        assert_eq!(g.order(), 256);
        assert_eq!(g.inv(1), 15);
    }
}
