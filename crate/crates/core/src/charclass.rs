//! GF(2) model for the Stiefel-Whitney classes of the orthogonal bundles.
//!
//! `Jac(X)[2]` is `GF(2)^{2g}` with coordinates `(a_1..a_g, b_1..b_g)` and the
//! standard pairing `<a_i, b_i> = 1`. The mod 2 index is modelled by a
//! quadratic refinement `q(x) = x^T U x` whose polarization is that pairing;
//! only the diagonal of `U` is free. The default refinement has zero
//! diagonal and Arf invariant 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Bits = Vec<u8>;

fn check_bits(name: &str, v: &[u8], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(Error::DimensionMismatch(format!("{name} has {} bits, expected {len}", v.len())));
    }
    if v.iter().any(|&b| b > 1) {
        return Err(Error::Schema(format!("{name} must contain only 0 and 1")));
    }
    Ok(())
}

/// `GF(2)^{2g}` with the standard alternating pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Z2SymplecticSpace {
    pub g: usize,
}

impl Z2SymplecticSpace {
    pub fn dim(&self) -> usize {
        2 * self.g
    }

    pub fn gram(&self, i: usize, j: usize) -> u8 {
        u8::from(i.abs_diff(j) == self.g)
    }

    pub fn pairing(&self, x: &[u8], y: &[u8]) -> u8 {
        (0..self.g).fold(0, |acc, i| acc ^ (x[i] & y[i + self.g]) ^ (x[i + self.g] & y[i]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticRefinement {
    pub space: Z2SymplecticSpace,
    /// Upper triangular, row-major.
    pub u: Vec<Bits>,
}

impl QuadraticRefinement {
    /// Refinement with `q(e_i) = diag[i]`.
    pub fn from_diagonal(g: usize, diag: &[u8]) -> Result<Self> {
        let space = Z2SymplecticSpace { g };
        check_bits("refinement diagonal", diag, space.dim())?;
        let n = space.dim();
        let u = (0..n)
            .map(|i| (0..n).map(|j| if i == j { diag[i] } else if i < j { space.gram(i, j) } else { 0 }).collect())
            .collect();
        Ok(QuadraticRefinement { space, u })
    }

    pub fn standard(g: usize) -> Self {
        Self::from_diagonal(g, &vec![0; 2 * g]).unwrap()
    }

    /// Validates that `U` is upper triangular with polarization equal to
    /// the standard pairing.
    pub fn from_matrix(g: usize, u: Vec<Bits>) -> Result<Self> {
        let space = Z2SymplecticSpace { g };
        let n = space.dim();
        if u.len() != n {
            return Err(Error::DimensionMismatch(format!("U has {} rows, expected {n}", u.len())));
        }
        for (i, row) in u.iter().enumerate() {
            check_bits("U row", row, n)?;
            for j in 0..i {
                if row[j] != 0 {
                    return Err(Error::Schema("U must be upper triangular".into()));
                }
            }
            for j in i + 1..n {
                if row[j] != space.gram(i, j) {
                    return Err(Error::Schema(format!("polarization of U differs from the pairing at ({i},{j})")));
                }
            }
        }
        Ok(QuadraticRefinement { space, u })
    }

    pub fn eval(&self, x: &[u8]) -> u8 {
        let n = self.space.dim();
        let mut acc = 0;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in i..n {
                acc ^= self.u[i][j] & x[j];
            }
        }
        acc
    }

    pub fn diagonal(&self) -> Bits {
        (0..self.space.dim()).map(|i| self.u[i][i]).collect()
    }
}

/// `sum_i q(a_i) q(b_i)` over the standard symplectic basis.
pub fn arf_invariant(q: &QuadraticRefinement) -> u8 {
    let g = q.space.g;
    (0..g).fold(0, |acc, i| acc ^ (q.u[i][i] & q.u[i + g][i + g]))
}

/// Arf invariant over an arbitrary basis, made symplectic by Gram-Schmidt.
pub fn arf_in_basis(q: &QuadraticRefinement, basis: &[Bits]) -> Result<u8> {
    let s = q.space;
    let mut rest: Vec<Bits> = basis.to_vec();
    let mut arf = 0;
    while let Some(a) = rest.pop() {
        let k = rest
            .iter()
            .position(|v| s.pairing(&a, v) == 1)
            .ok_or_else(|| Error::DegenerateInput("basis is not a basis of a symplectic space".into()))?;
        let b = rest.remove(k);
        arf ^= q.eval(&a) & q.eval(&b);
        for v in rest.iter_mut() {
            // v -> v + <v,b> a + <v,a> b keeps v orthogonal to a and b
            let (vb, va) = (s.pairing(v, &b), s.pairing(v, &a));
            for t in 0..v.len() {
                v[t] ^= (vb & a[t]) ^ (va & b[t]);
            }
        }
    }
    Ok(arf)
}

/// Number of zeros of `q` by enumeration.
pub fn zero_count(q: &QuadraticRefinement) -> u64 {
    let n = q.space.dim();
    (0u64..1 << n).filter(|&m| q.eval(&bits_of(m, n)) == 0).count() as u64
}

pub fn bits_of(m: u64, n: usize) -> Bits {
    (0..n).map(|i| ((m >> i) & 1) as u8).collect()
}

/// `Nm: GF(2)^{2h} -> GF(2)^{2g}` with a pullback in the other direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormMap {
    pub source: Z2SymplecticSpace,
    pub target: Z2SymplecticSpace,
    /// `target.dim() x source.dim()`.
    pub matrix: Vec<Bits>,
    /// `source.dim() x target.dim()`.
    pub pullback: Vec<Bits>,
}

fn apply(m: &[Bits], x: &[u8]) -> Bits {
    m.iter().map(|row| row.iter().zip(x).fold(0, |acc, (a, b)| acc ^ (a & b))).collect()
}

impl NormMap {
    /// Projection onto the first `g` of the `a` and of the `b` coordinates;
    /// the pullback is the matching coordinate embedding.
    pub fn standard(h: usize, g: usize) -> Result<Self> {
        if g > h {
            return Err(Error::DimensionMismatch(format!("norm from genus {h} to larger genus {g}")));
        }
        let src = |i: usize| if i < g { i } else { i - g + h };
        let matrix = (0..2 * g)
            .map(|i| (0..2 * h).map(|j| u8::from(j == src(i))).collect())
            .collect();
        let pullback = (0..2 * h)
            .map(|j| (0..2 * g).map(|i| u8::from(j == src(i))).collect())
            .collect();
        Ok(NormMap {
            source: Z2SymplecticSpace { g: h },
            target: Z2SymplecticSpace { g },
            matrix,
            pullback,
        })
    }

    pub fn apply(&self, x: &[u8]) -> Bits {
        apply(&self.matrix, x)
    }

    pub fn pull(&self, y: &[u8]) -> Bits {
        apply(&self.pullback, y)
    }

    /// `<Nm x, y> = <x, pull y>` on all basis pairs.
    pub fn adjoint(&self) -> bool {
        let (h2, g2) = (self.source.dim(), self.target.dim());
        (0..h2).all(|i| {
            (0..g2).all(|j| {
                let x = bits_of(1 << i, h2);
                let y = bits_of(1 << j, g2);
                self.target.pairing(&self.apply(&x), &y) == self.source.pairing(&x, &self.pull(&y))
            })
        })
    }
}

/// `w_1(W) = Nm(L)` and `w_2(W) = phi_Sbar(L) + phi_Sigma(Nm L)`.
pub fn omega_classes(
    l: &[u8],
    q_sbar: &QuadraticRefinement,
    q_sigma: &QuadraticRefinement,
    nm: &NormMap,
) -> Result<(Bits, u8)> {
    check_bits("L", l, q_sbar.space.dim())?;
    if nm.source != q_sbar.space || nm.target != q_sigma.space {
        return Err(Error::DimensionMismatch("norm map does not match the refinements".into()));
    }
    let w1 = nm.apply(l);
    let w2 = q_sbar.eval(l) ^ q_sigma.eval(&w1);
    Ok((w1, w2))
}

/// `w_2(V) = w_2(W) + w_2(V_0') + delta`; `V_0'` has rank `q - 1`, so its
/// second class vanishes for `q <= 2`.
pub fn omega2_v(
    l: &[u8],
    q_sbar: &QuadraticRefinement,
    q_sigma: &QuadraticRefinement,
    nm: &NormMap,
    q: usize,
    w2_v0prime: u8,
    delta: u8,
) -> Result<u8> {
    if w2_v0prime > 1 || delta > 1 {
        return Err(Error::Schema("classes are bits".into()));
    }
    if q <= 2 && w2_v0prime == 1 {
        return Err(Error::RankRule(format!("w_2 of a bundle of rank {} must vanish", q.saturating_sub(1))));
    }
    let (_, w2w) = omega_classes(l, q_sbar, q_sigma, nm)?;
    Ok(w2w ^ w2_v0prime ^ delta)
}

/// `w_2(V + W) = w_2(V) + w_2(W)` when `w_1(V) = w_1(W)`.
pub fn whitney_additivity_check(w1v: &[u8], w2v: u8, w1w: &[u8], w2w: u8) -> Result<u8> {
    if w1v != w1w {
        return Err(Error::FirstClassMismatch);
    }
    Ok(w2v ^ w2w)
}

/// Inputs for one characteristic-class evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharclassInput {
    pub g_sigma: usize,
    pub g_sbar: usize,
    #[serde(rename = "L")]
    pub l: Bits,
    #[serde(default)]
    pub q_sbar_diagonal: Option<Bits>,
    #[serde(default)]
    pub q_sigma_diagonal: Option<Bits>,
    pub q: usize,
    #[serde(default)]
    pub w2_v0prime: u8,
    #[serde(default)]
    pub delta: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharclassOutput {
    pub w1_w: Bits,
    pub w2_w: u8,
    pub w2_v: u8,
    pub arf_sbar: u8,
    pub arf_sigma: u8,
    pub norm_adjoint: bool,
}

pub fn evaluate(input: &CharclassInput) -> Result<CharclassOutput> {
    let qs = match &input.q_sbar_diagonal {
        Some(d) => QuadraticRefinement::from_diagonal(input.g_sbar, d)?,
        None => QuadraticRefinement::standard(input.g_sbar),
    };
    let qg = match &input.q_sigma_diagonal {
        Some(d) => QuadraticRefinement::from_diagonal(input.g_sigma, d)?,
        None => QuadraticRefinement::standard(input.g_sigma),
    };
    let nm = NormMap::standard(input.g_sbar, input.g_sigma)?;
    let (w1_w, w2_w) = omega_classes(&input.l, &qs, &qg, &nm)?;
    let w2_v = omega2_v(&input.l, &qs, &qg, &nm, input.q, input.w2_v0prime, input.delta)?;
    Ok(CharclassOutput {
        w1_w,
        w2_w,
        w2_v,
        arf_sbar: arf_invariant(&qs),
        arf_sigma: arf_invariant(&qg),
        norm_adjoint: nm.adjoint(),
    })
}
