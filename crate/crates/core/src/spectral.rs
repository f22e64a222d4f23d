//! Spectral coefficients `a = (a_1, ..., a_p)` and the covers they define.
//!
//! The base is modelled by a single affine chart with coordinate `z` and the
//! canonical bundle trivialised by `dz`. Powers of `K` survive only as weight
//! metadata. Degrees of the `a_i` are not tied to the genus `g`; `g` only
//! feeds the closed-form counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{resultant, AuxPoly, Field, Poly, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralCoeffs {
    field: Field,
    p: usize,
    q: usize,
    g: u32,
    a: Vec<Poly>,
}

impl SpectralCoeffs {
    /// `a[k-1]` is `a_k`.
    pub fn new(field: Field, p: usize, q: usize, g: u32, a: Vec<Poly>) -> Result<Self> {
        if p == 0 {
            return Err(Error::Schema("p must be positive".into()));
        }
        if g < 2 {
            return Err(Error::Schema("g must be at least 2".into()));
        }
        if a.len() != p {
            return Err(Error::Schema(format!(
                "expected {p} coefficients a_1..a_p, got {}",
                a.len()
            )));
        }
        if a[p - 1].is_zero() {
            return Err(Error::Schema("a_p must be nonzero".into()));
        }
        let max_deg = a.iter().filter_map(Poly::degree).max().unwrap_or(0);
        field.check_degree_bound(max_deg.max(2 * p + q))?;
        Ok(SpectralCoeffs { field, p, q, g, a })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.a
    }

    /// `a_k` with `a_0 = 1` and `a_k = 0` for `k > p`.
    pub fn a(&self, k: usize) -> Poly {
        match k {
            0 => Poly::one(self.field),
            k if k <= self.p => self.a[k - 1].clone(),
            _ => Poly::zero(self.field),
        }
    }

    pub fn ap(&self) -> &Poly {
        &self.a[self.p - 1]
    }

    pub fn with_q(&self, q: usize) -> Self {
        SpectralCoeffs { q, ..self.clone() }
    }

    /// `xi^p + a_1 xi^(p-1) + ... + a_p`, the curve `S-bar`.
    pub fn sbar_poly(&self) -> AuxPoly {
        AuxPoly::from_coeffs(self.field, (0..=self.p).map(|k| self.a(self.p - k)).collect())
    }

    /// `eta^(2p) + a_1 eta^(2p-2) + ... + a_p`, the curve `S`.
    pub fn s_poly(&self) -> AuxPoly {
        self.sbar_poly().substitute_square()
    }

    /// `zeta^2 - a_p`, the curve `C`.
    pub fn c_poly(&self) -> AuxPoly {
        AuxPoly::from_coeffs(
            self.field,
            vec![-self.ap(), Poly::zero(self.field), Poly::one(self.field)],
        )
    }

    /// `eta^q (eta^(2p) + a_1 eta^(2p-2) + ... + a_p)`.
    pub fn char_poly_model(&self) -> AuxPoly {
        &AuxPoly::monomial(Poly::one(self.field), self.q) * &self.s_poly()
    }

    pub fn covers(&self) -> Result<Vec<CoverModel>> {
        let d = self.branch_points().unwrap_or_default();
        Ok(vec![
            CoverModel {
                kind: CoverKind::S,
                polynomial: self.s_poly(),
                branch_points: d.clone(),
            },
            CoverModel {
                kind: CoverKind::Sbar,
                polynomial: self.sbar_poly(),
                branch_points: d.clone(),
            },
            CoverModel {
                kind: CoverKind::C,
                polynomial: self.c_poly(),
                branch_points: d,
            },
        ])
    }

    pub fn regularity_check(&self) -> Regularity {
        let ap = self.ap();
        let squarefree = ap.is_squarefree().unwrap_or(false);
        let coprime = ap.gcd(&self.a(self.p - 1)).is_constant();
        let sbar = self.sbar_poly();
        let discriminant = resultant(&sbar, &sbar.derivative()).unwrap_or_else(|_| Poly::zero(self.field));
        Regularity {
            ap_squarefree: squarefree,
            ap_coprime_to_previous: coprime,
            sbar_resultant_nonzero: !discriminant.is_zero(),
            sbar_resultant: discriminant,
        }
    }

    pub fn require_regular(&self) -> Result<()> {
        let r = self.regularity_check();
        if r.passed() {
            Ok(())
        } else {
            Err(Error::NotRegular(r.failures().join(", ")))
        }
    }

    /// `h_0, ..., h_{u_max}` from `h_j = -sum_{u<j} h_u a_{j-u}`.
    pub fn complete_homogeneous(&self, u_max: usize) -> Vec<Poly> {
        let mut h = vec![Poly::one(self.field)];
        for j in 1..=u_max {
            let mut acc = Poly::zero(self.field);
            for (u, hu) in h.iter().enumerate() {
                acc = &acc - &(hu * &self.a(j - u));
            }
            h.push(acc);
        }
        h
    }

    /// Roots of `a_p`, which must split into distinct linear factors.
    pub fn branch_points(&self) -> Result<Vec<Scalar>> {
        let ap = self.ap();
        if !ap.is_squarefree()? {
            return Err(Error::NotRegular("a_p is not squarefree".into()));
        }
        let roots = ap.roots();
        if roots.len() != ap.degree().unwrap() {
            return Err(Error::NotSplit(format!("a_p = {ap}")));
        }
        Ok(roots)
    }

    pub fn to_json(&self) -> SpectralCoeffsJson {
        SpectralCoeffsJson {
            p: self.p,
            q: self.q,
            g: self.g,
            a: self.a.iter().map(Poly::to_strings).collect(),
        }
    }

    pub fn from_json(field: Field, j: &SpectralCoeffsJson) -> Result<Self> {
        let a = j
            .a
            .iter()
            .map(|c| Poly::parse(field, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, j.p, j.q, j.g, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralCoeffsJson {
    pub p: usize,
    pub q: usize,
    pub g: u32,
    pub a: Vec<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoverKind {
    S,
    Sbar,
    C,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverModel {
    pub kind: CoverKind,
    pub polynomial: AuxPoly,
    pub branch_points: Vec<Scalar>,
}

/// Per-condition verdicts of the chart regularity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regularity {
    pub ap_squarefree: bool,
    pub ap_coprime_to_previous: bool,
    pub sbar_resultant_nonzero: bool,
    pub sbar_resultant: Poly,
}

impl Regularity {
    pub fn passed(&self) -> bool {
        self.ap_squarefree && self.ap_coprime_to_previous && self.sbar_resultant_nonzero
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = vec![];
        if !self.ap_squarefree {
            out.push("a_p has a repeated root".to_string());
        }
        if !self.ap_coprime_to_previous {
            out.push("a_p and a_(p-1) share a root".to_string());
        }
        if !self.sbar_resultant_nonzero {
            out.push("Res(pbar, d pbar / d xi) vanishes".to_string());
        }
        out
    }
}

/// Genera of `S`, `S-bar` and `C` over a base of genus `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverGenera {
    pub g_s: u64,
    pub g_sbar: u64,
    pub g_c: u64,
    /// `(g_C - 1) - deg K^p == 2 (g - 1)`.
    pub riemann_hurwitz: bool,
}

pub fn cover_genera(p: u64, g: u64) -> CoverGenera {
    let gm = g - 1;
    let g_s = 1 + 4 * p * p * gm;
    let g_sbar = (2 * p * p - p) * gm + 1;
    let g_c = (2 * p + 2) * gm + 1;
    let d = 2 * p * gm;
    CoverGenera {
        g_s,
        g_sbar,
        g_c,
        riemann_hurwitz: (g_c - 1) as i64 - d as i64 == 2 * gm as i64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> Field {
        Field::default()
    }

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(f(), c)
    }

    fn sc(q: usize, a: &[&[i64]]) -> SpectralCoeffs {
        SpectralCoeffs::new(f(), a.len(), q, 2, a.iter().map(|c| p(c)).collect()).unwrap()
    }

    #[test]
    fn char_poly_model_examples() {
        let s = sc(1, &[&[0, 1]]);
        let expect = AuxPoly::from_coeffs(f(), vec![p(&[]), p(&[0, 1]), p(&[]), p(&[1])]);
        assert_eq!(s.char_poly_model(), expect);
        let s = sc(0, &[&[1, 1], &[0, 1]]);
        assert_eq!(s.char_poly_model().degree(), Some(4));
        assert_eq!(s.char_poly_model().coeff(0), p(&[0, 1]));
    }

    #[test]
    fn regularity_examples() {
        assert!(sc(1, &[&[0, 1]]).regularity_check().passed());
        let r = sc(1, &[&[3], &[0, 0, 1]]).regularity_check();
        assert!(!r.ap_squarefree);
        let r = sc(1, &[&[], &[0, 1]]).regularity_check();
        assert!(r.ap_squarefree && !r.ap_coprime_to_previous);
    }

    #[test]
    fn homogeneous_examples() {
        let s = sc(1, &[&[0, 2], &[5, 0, 1]]);
        let h = s.complete_homogeneous(3);
        assert_eq!(h[0], p(&[1]));
        assert_eq!(h[1], -s.a(1));
        assert_eq!(h[2], &(&s.a(1) * &s.a(1)) - &s.a(2));
        // roots z and 1: a_1 = -(z + 1), a_2 = z
        let s = sc(1, &[&[-1, -1], &[0, 1]]);
        assert_eq!(s.complete_homogeneous(2)[2], p(&[1, 1, 1]));
    }

    #[test]
    fn genera_examples() {
        let c = cover_genera(2, 2);
        assert_eq!((c.g_s, c.g_sbar, c.g_c), (17, 7, 7));
        assert!(c.riemann_hurwitz);
    }

    #[test]
    fn branch_point_examples() {
        assert_eq!(sc(1, &[&[0, 1]]).branch_points().unwrap(), vec![f().zero()]);
        assert_eq!(
            sc(1, &[&[-1, 0, 1]]).branch_points().unwrap(),
            vec![f().from_i64(-1), f().one()]
        );
        let f7 = Field::Prime(7);
        let s = SpectralCoeffs::new(f7, 1, 1, 2, vec![Poly::from_ints(f7, &[1, 0, 1])]).unwrap();
        assert!(matches!(s.branch_points(), Err(Error::NotSplit(_))));
    }
}
