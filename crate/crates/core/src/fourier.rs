//! Fourier analysis of functions `G^n → G` for abelian `G`, and folded
//! functions.
//!
//! Characters of `G` are indexed by elements: with `G ≅ ∏ Z_{d_k}` through
//! its cyclic decomposition, `χ_a(g) = exp(2πi Σ_k a_k g_k / d_k)`. A
//! character `α` of `G^n` is a tuple of such indices, stored densely at
//! `Σ_i α_i |G|^i` like function tables.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::dictator::{decode_point, encode_point};
use crate::group::{Elem, FiniteGroup, GroupError};
use crate::quotient::CyclicDecomposition;
use crate::subgroup::Subgroup;

/// Largest table size `|G|^n` accepted.
pub const MAX_TABLE: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum FourierError {
    #[error("Fourier tooling needs an abelian group, {0} is not")]
    NonAbelianGroup(String),
    #[error("table size |G|^n = {0} exceeds {MAX_TABLE}")]
    TooLarge(u128),
    #[error("table has {got} entries, expected {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The dual group of an abelian group, as exact phases.
#[derive(Clone, Debug)]
pub struct Characters {
    order: usize,
    dec: CyclicDecomposition,
    /// `L = d_m`, a common multiple of every invariant.
    exponent: u64,
}

impl Characters {
    pub fn new(g: &FiniteGroup) -> Result<Self, FourierError> {
        if !g.is_abelian() {
            return Err(FourierError::NonAbelianGroup(g.name().to_string()));
        }
        let dec = CyclicDecomposition::of_abelian(g);
        let exponent = dec.invariants().last().copied().unwrap_or(1);
        Ok(Characters {
            order: g.order(),
            dec,
            exponent,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `χ_a(g) = exp(2πi · phase / L)`; returns `phase mod L`.
    pub fn phase(&self, a: Elem, g: Elem) -> u64 {
        let l = self.exponent;
        self.dec
            .to_vec(a)
            .iter()
            .zip(self.dec.to_vec(g))
            .zip(self.dec.invariants())
            .fold(0, |acc, ((&ak, &gk), &d)| (acc + ak * gk % d * (l / d)) % l)
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn value(&self, a: Elem, g: Elem) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.phase(a, g) as f64 / self.exponent as f64)
    }

    /// Whether `χ_a` is identically 1 on `h` (equivalently, constant on
    /// every coset of `h`).
    pub fn constant_on(&self, a: Elem, h: &Subgroup) -> bool {
        h.elements().iter().all(|&x| self.phase(a, x) == 0)
    }

    pub fn is_trivial(&self, a: Elem) -> bool {
        self.dec.to_vec(a).iter().all(|&c| c == 0)
    }
}

/// Coefficients `F̂(α) = E_x[F(x) · conj(α(x))]` over all characters of `G^n`.
#[derive(Clone, Debug)]
pub struct FourierTable {
    pub order: usize,
    pub n: usize,
    pub coeffs: Vec<Complex64>,
}

impl FourierTable {
    pub fn coeff(&self, alpha: &[Elem]) -> Complex64 {
        self.coeffs[encode_point(alpha, self.order)]
    }

    pub fn squared_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn table_size(order: usize, n: usize) -> Result<usize, FourierError> {
    let size = (order as u128).saturating_pow(n as u32);
    if size > MAX_TABLE as u128 {
        return Err(FourierError::TooLarge(size));
    }
    Ok(size as usize)
}

/// `F = χ_ρ ∘ f` as complex values.
pub fn compose_character(
    chars: &Characters,
    f: &[Elem],
    rho: Elem,
) -> Vec<Complex64> {
    f.iter().map(|&v| chars.value(rho, v)).collect()
}

/// Applies, coordinate by coordinate, the `|G| × |G|` matrix
/// `M[a][g] = w(χ_a(g)) / scale`.
fn per_coordinate(
    chars: &Characters,
    n: usize,
    mut data: Vec<Complex64>,
    conj: bool,
    scale: f64,
) -> Vec<Complex64> {
    let q = chars.order;
    let matrix: Vec<Complex64> = (0..q * q)
        .map(|i| {
            let v = chars.value(i / q, i % q);
            (if conj { v.conj() } else { v }) / scale
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    let mut stride = 1;
    for _ in 0..n {
        for (i, slot) in out.iter_mut().enumerate() {
            let digit = i / stride % q;
            let base = i - digit * stride;
            *slot = (0..q)
                .map(|g| matrix[digit * q + g] * data[base + g * stride])
                .sum();
        }
        std::mem::swap(&mut data, &mut out);
        stride *= q;
    }
    data
}

/// Fourier transform of `F = χ_ρ ∘ f` for a dense table `f` over `G^n`.
pub fn fourier_transform(
    g: &FiniteGroup,
    f: &[Elem],
    n: usize,
    rho: Elem,
) -> Result<FourierTable, FourierError> {
    let chars = Characters::new(g)?;
    g.check_element(rho)?;
    let size = table_size(g.order(), n)?;
    if f.len() != size {
        return Err(FourierError::LengthMismatch {
            got: f.len(),
            want: size,
        });
    }
    if let Some(&bad) = f.iter().find(|&&v| !g.contains(v)) {
        g.check_element(bad)?;
    }
    Ok(transform_values(&chars, n, compose_character(&chars, f, rho)))
}

/// Fourier transform of an arbitrary complex table over `G^n`.
pub fn transform_values(chars: &Characters, n: usize, values: Vec<Complex64>) -> FourierTable {
    let coeffs = per_coordinate(chars, n, values, true, chars.order as f64);
    FourierTable {
        order: chars.order,
        n,
        coeffs,
    }
}

/// `F(x) = Σ_α F̂(α) α(x)`.
pub fn inverse_transform(chars: &Characters, table: &FourierTable) -> Vec<Complex64> {
    per_coordinate(chars, table.n, table.coeffs.clone(), false, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Influence {
    /// Sum over `α` with `α_i` not constant on `H` and `|α|_H ≤ d`.
    pub modified: f64,
    /// Sum over `α` with `α_i` nontrivial and `|α| ≤ d`.
    pub plain: f64,
}

/// Degree-`d` influences of coordinate `i`. `|α|_H` counts the coordinates
/// whose character is not constant on `h`; taking `h = G` gives back the
/// plain influence exactly.
pub fn modified_influence(
    chars: &Characters,
    table: &FourierTable,
    i: usize,
    d: usize,
    h: &Subgroup,
) -> Influence {
    let q = chars.order;
    let nonconst: Vec<bool> = (0..q).map(|a| !chars.constant_on(a, h)).collect();
    let nontrivial: Vec<bool> = (0..q).map(|a| !chars.is_trivial(a)).collect();
    let mut modified = 0.0;
    let mut plain = 0.0;
    for (idx, c) in table.coeffs.iter().enumerate() {
        let alpha = decode_point(idx, q, table.n);
        let w = c.norm_sqr();
        if nonconst[alpha[i]] && alpha.iter().filter(|&&a| nonconst[a]).count() <= d {
            modified += w;
        }
        if nontrivial[alpha[i]] && alpha.iter().filter(|&&a| nontrivial[a]).count() <= d {
            plain += w;
        }
    }
    Influence { modified, plain }
}

/// A function `G^n → G` with `f(c x) = c f(x)`, stored by its values at the
/// points with `x_1 = e`, which meet every orbit of left multiplication once.
#[derive(Clone, Debug)]
pub struct FoldedFunction {
    group: Arc<FiniteGroup>,
    n: usize,
    /// `f(e, y)` indexed by `y ∈ G^{n-1}`.
    reps: Vec<Elem>,
}

impl FoldedFunction {
    pub fn new(group: Arc<FiniteGroup>, n: usize, reps: Vec<Elem>) -> Result<Self, FourierError> {
        assert!(n >= 1, "folded functions need n >= 1");
        let want = table_size(group.order(), n - 1)?;
        if reps.len() != want {
            return Err(FourierError::LengthMismatch {
                got: reps.len(),
                want,
            });
        }
        if let Some(&bad) = reps.iter().find(|&&v| !group.contains(v)) {
            group.check_element(bad)?;
        }
        Ok(FoldedFunction { group, n, reps })
    }

    /// `f(x) = x_1 f(e, x_1⁻¹ x_2, …, x_1⁻¹ x_n)`.
    pub fn eval(&self, x: &[Elem]) -> Elem {
        let g = &self.group;
        let c = x[0];
        let ci = g.inv(c);
        let y: Vec<Elem> = x[1..].iter().map(|&v| g.op(ci, v)).collect();
        g.op(c, self.reps[encode_point(&y, g.order())])
    }

    pub fn table(&self) -> Vec<Elem> {
        let q = self.group.order();
        (0..q.pow(self.n as u32))
            .map(|i| self.eval(&decode_point(i, q, self.n)))
            .collect()
    }
}

/// Whether a dense table satisfies `f(c x) = c f(x)` for every `c` and `x`.
pub fn is_folded(g: &FiniteGroup, f: &[Elem], n: usize) -> bool {
    let q = g.order();
    (0..f.len()).all(|idx| {
        let x = decode_point(idx, q, n);
        g.elements().all(|c| {
            let cx: Vec<Elem> = x.iter().map(|&v| g.op(c, v)).collect();
            f[encode_point(&cx, q)] == g.op(c, f[idx])
        })
    })
}
