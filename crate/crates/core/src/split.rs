//! `SO(p+1,p)` bundles attached to the trivial line bundle and a sign
//! assignment on the zeros of `a_p`, the invariant `b`, and the permutation
//! model of monodromy.
//!
//! Two routes are computed. The reconstruction route glues the companion
//! model with `V_0 = (K^{-p}, a_p)` through `i_x = -e_x j_x`. The closed-form
//! route writes `V = W_0 + B + B*` with the dual pairing on `B + B*` and the
//! explicit `beta`, `gamma` in terms of `s_+`, `s_-`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Field, Poly, PolyMat, Scalar};
use crate::higgs::{
    assemble_orth, cayley_triple, kernel_quadratic, pushforward_trivial, upp_quotient, verify_so,
    weight_string, weight_sum, OrthHiggsChart, Weight,
};
use crate::langlands::{
    b_weight, build_extension, companion_kernel_vector, ExtensionData, QuadraticBundle,
};
use crate::report::Verdicts;
use crate::spectral::{SpectralCoeffs, SpectralCoeffsJson};

/// Coefficients with `q = 1` and a sign `e_x` for every zero `x` of `a_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSpec {
    pub sc: SpectralCoeffs,
    /// Branch points in canonical order.
    pub points: Vec<Scalar>,
    pub signs: Vec<i8>,
}

impl SplitSpec {
    pub fn new(sc: SpectralCoeffs, signs: Vec<i8>) -> Result<Self> {
        let sc = sc.with_q(1);
        let points = sc.branch_points()?;
        if signs.len() != points.len() {
            return Err(Error::Schema(format!(
                "{} signs for {} zeros of a_p",
                signs.len(),
                points.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Schema("signs must be +1 or -1".into()));
        }
        Ok(SplitSpec { sc, points, signs })
    }

    pub fn all_plus(sc: SpectralCoeffs) -> Result<Self> {
        let n = sc.branch_points()?.len();
        Self::new(sc, vec![1; n])
    }

    pub fn field(&self) -> Field {
        self.sc.field()
    }

    pub fn b_plus(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }

    pub fn b_minus(&self) -> usize {
        self.signs.len() - self.b_plus()
    }

    pub fn d_plus(&self) -> Vec<Scalar> {
        self.select(1)
    }

    pub fn d_minus(&self) -> Vec<Scalar> {
        self.select(-1)
    }

    fn select(&self, s: i8) -> Vec<Scalar> {
        self.points
            .iter()
            .zip(&self.signs)
            .filter(|(_, &e)| e == s)
            .map(|(x, _)| x.clone())
            .collect()
    }

    pub fn flipped(&self) -> Self {
        SplitSpec {
            signs: self.signs.iter().map(|s| -s).collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> SplitSpecJson {
        SplitSpecJson {
            sc: self.sc.to_json(),
            signs: self
                .points
                .iter()
                .zip(&self.signs)
                .map(|(x, s)| (x.to_string(), format!("{s:+}")))
                .collect(),
        }
    }

    pub fn from_json(field: Field, j: &SplitSpecJson) -> Result<Self> {
        let sc = SpectralCoeffs::from_json(field, &j.sc)?.with_q(1);
        let points = sc.branch_points()?;
        let mut given = BTreeMap::new();
        for (k, v) in &j.signs {
            let x = field.parse(k)?;
            let s = match v.trim() {
                "+1" | "1" | "+" => 1,
                "-1" | "-" => -1,
                other => return Err(Error::Schema(format!("sign {other:?} for root {k}"))),
            };
            if given.insert(x.to_string(), s).is_some() {
                return Err(Error::Schema(format!("root {k} listed twice")));
            }
        }
        let mut signs = vec![];
        for x in &points {
            signs.push(
                given
                    .remove(&x.to_string())
                    .ok_or_else(|| Error::Schema(format!("no sign for root {x}")))?,
            );
        }
        if let Some(k) = given.keys().next() {
            return Err(Error::Schema(format!("{k} is not a zero of a_p")));
        }
        Self::new(sc, signs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpecJson {
    pub sc: SpectralCoeffsJson,
    pub signs: BTreeMap<String, String>,
}

/// `s_+ = prod_{D+} (z - x)` monic and `s_- = (lead a_p / 2) prod_{D-} (z - x)`.
pub fn factor_signs(spec: &SplitSpec) -> Result<(Poly, Poly)> {
    let f = spec.field();
    let s_plus = Poly::from_roots(f, &spec.d_plus());
    let half = f.from_i64(2).inv().expect("characteristic 2 is excluded");
    let s_minus = Poly::from_roots(f, &spec.d_minus()).scale(&(&spec.sc.ap().lead() * &half));
    if &s_plus * &s_minus != spec.sc.ap().scale(&half) {
        return Err(Error::NotSplit(format!("s_+ s_- != a_p / 2 for a_p = {}", spec.sc.ap())));
    }
    Ok((s_plus, s_minus))
}

/// Change of frame `psi(v) = v + v_p (a_{p-1}, ..., a_1, 0)` on `W K^{-1}`.
pub fn psi_matrix(sc: &SpectralCoeffs) -> PolyMat {
    let f = sc.field();
    let p = sc.p();
    PolyMat::from_fn(f, p, p, |i, j| {
        if i == j {
            Poly::one(f)
        } else if j + 1 == p {
            sc.a(p - 1 - i)
        } else {
            Poly::zero(f)
        }
    })
}

/// `Q_{W_0}(i, j) = h_{i+j-p}` for `1 <= i, j <= p - 1`, zero when `i + j < p`.
pub fn w0_form(sc: &SpectralCoeffs) -> PolyMat {
    let f = sc.field();
    let p = sc.p();
    let h = sc.complete_homogeneous(p);
    PolyMat::from_fn(f, p - 1, p - 1, |i, j| {
        let s = i + j + 2;
        if s < p {
            Poly::zero(f)
        } else {
            h[s - p].clone()
        }
    })
}

fn hyperbolic(f: Field, scale: &Poly) -> PolyMat {
    PolyMat::from_fn(f, 2, 2, |i, j| if i != j { scale.clone() } else { Poly::zero(f) })
}

/// Bundle-level weights `W = K^{p-1} + ... + K^{-(p-1)}` and
/// `V = W_0 + B + B*` with `B = K^{-p}(D_+)`, in `K` units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummandWeights {
    pub w: Vec<String>,
    pub w0: Vec<String>,
    pub b: String,
    pub b_star: String,
}

fn summand_weights(spec: &SplitSpec) -> (Vec<Weight>, Vec<Weight>) {
    let p = spec.sc.p() as i64;
    let w = (0..p).map(|i| Weight::from_integer(p - 1 - 2 * i)).collect();
    let mut v: Vec<Weight> = (0..p - 1).map(|i| Weight::from_integer(p - 2 - 2 * i)).collect();
    let d = spec.points.len();
    v.push(b_weight(spec.sc.p(), spec.b_plus(), d));
    v.push(b_weight(spec.sc.p(), spec.b_minus(), d));
    (w, v)
}

/// Closed-form chart: `Q_V = Q_{W_0} + [[0,1],[1,0]]`,
/// `beta(w) = (w_1 - w_p a_{p-1}, ..., w_{p-1} - w_p a_1, w_p s_+, -w_p s_-)`
/// and `gamma` derived from `Q_V`, `Q_W`; the listed
/// `gamma(v, g, h) = (s_+ h - s_- g, v_1, ..., v_{p-1})` is returned
/// separately for comparison.
pub fn closed_form_chart(spec: &SplitSpec) -> Result<(OrthHiggsChart, PolyMat)> {
    let sc = &spec.sc;
    let f = sc.field();
    let p = sc.p();
    let (s_plus, s_minus) = factor_signs(spec)?;
    let qv = w0_form(sc).block_diag(&hyperbolic(f, &Poly::one(f)));
    let beta = PolyMat::from_fn(f, p + 1, p, |i, j| {
        if i + 1 < p {
            if j == i {
                Poly::one(f)
            } else if j + 1 == p {
                -&sc.a(p - 1 - i)
            } else {
                Poly::zero(f)
            }
        } else if j + 1 < p {
            Poly::zero(f)
        } else if i + 1 == p {
            s_plus.clone()
        } else {
            -&s_minus
        }
    });
    let listed_gamma = PolyMat::from_fn(f, p, p + 1, |i, j| match (i, j) {
        (0, j) if j + 1 == p => -&s_minus,
        (0, j) if j == p => s_plus.clone(),
        (i, j) if i > 0 && j + 1 == i => Poly::one(f),
        _ => Poly::zero(f),
    });
    let ct = pushforward_trivial(sc);
    let (w, v) = summand_weights(spec);
    let chart = assemble_orth(v, w, qv, ct.qw, beta)?;
    Ok((chart, listed_gamma))
}

/// The same chart with the form `a_p/2` on `B + B*` copied from the
/// unmodified bundle `V'`; its determinant carries `a_p^2`.
pub fn literal_pitfall_form(spec: &SplitSpec) -> PolyMat {
    let f = spec.field();
    let half = f.from_i64(2).inv().unwrap();
    w0_form(&spec.sc).block_diag(&hyperbolic(f, &spec.sc.ap().scale(&half)))
}

/// `i_x = -e_x j_x`.
pub fn extension_from_signs(spec: &SplitSpec) -> ExtensionData {
    let vectors = spec
        .points
        .iter()
        .zip(&spec.signs)
        .map(|(x, &e)| {
            let j = companion_kernel_vector(&spec.sc, x);
            if e > 0 {
                j.iter().map(|c| -c).collect()
            } else {
                j
            }
        })
        .collect();
    ExtensionData {
        points: spec.points.clone(),
        vectors,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitBuild {
    pub chart: OrthHiggsChart,
    pub closed_form: OrthHiggsChart,
    pub s_plus: Poly,
    pub s_minus: Poly,
    pub weights: SummandWeights,
    pub verdicts: Verdicts,
}

/// Reconstruction through the extension, cross-checked against the closed
/// form and the recovery maps.
pub fn build_split(spec: &SplitSpec) -> Result<SplitBuild> {
    let sc = &spec.sc;
    let p = sc.p();
    let (s_plus, s_minus) = factor_signs(spec)?;
    let ct = pushforward_trivial(sc);
    let v0 = QuadraticBundle::standard(sc);
    let ext = build_extension(&ct, &v0, &extension_from_signs(spec), sc)?;
    let chart = ext.chart;
    let mut v = ext.verdicts;

    let cp = chart.phi().char_poly()?;
    v.check("char_poly_model", cp == sc.char_poly_model(), || cp.display("eta").to_string());

    let kq = kernel_quadratic(&chart, sc)?;
    let b = &kq.bundle;
    v.check(
        "kernel_recovers_v0",
        b.q() == 1 && b.q0.det()?.monic() == sc.ap().monic() && b.weights[0] == Weight::from_integer(-(p as i64)),
        || format!("rank {}, Q_0 = {}, weight {}", b.q(), b.q0[(0, 0)], weight_string(&b.weights[0])),
    );
    let (uq, uv) = upp_quotient(&chart, sc)?;
    v.extend_prefixed("upp", uv);
    let (rec, cv) = cayley_triple(&chart, &uq, sc);
    v.extend_prefixed("cayley", cv);
    let det = rec.beta_f.det()?;
    let sign = if p.is_multiple_of(2) { Poly::one(sc.field()) } else { -&Poly::one(sc.field()) };
    let expect = &sign * sc.ap();
    v.check("det_beta_f", det.monic() == expect.monic() && det.lead().is_square() == expect.lead().is_square(), || {
        format!("det beta_F = {det}, (-1)^p a_p = {expect}")
    });

    let (closed, listed_gamma) = closed_form_chart(spec)?;
    v.extend_prefixed("closed_form", verify_so(&closed, sc));
    v.check("closed_form.listed_gamma", closed.gamma == listed_gamma, || {
        format!("derived gamma {}, listed {}", closed.gamma, listed_gamma)
    });
    let cp2 = closed.phi().char_poly()?;
    v.check("closed_form.char_poly_agrees", cp2 == cp, || cp2.display("eta").to_string());
    v.check("weights.rank", closed.v_weights.len() == chart.v_weights.len(), || {
        format!("{} vs {}", closed.v_weights.len(), chart.v_weights.len())
    });
    let (s1, s2) = (weight_sum(&closed.v_weights), weight_sum(&chart.v_weights));
    v.check("weights.det_V", s1 == s2, || format!("{s1} vs {s2}"));
    let (wt_w, wt_v) = summand_weights(spec);
    v.check("weights.W", wt_w == chart.w_weights, || "W weights differ from the companion model".into());
    let weights = SummandWeights {
        w: wt_w.iter().map(weight_string).collect(),
        w0: wt_v[..p - 1].iter().map(weight_string).collect(),
        b: weight_string(&wt_v[p - 1]),
        b_star: weight_string(&wt_v[p]),
    };
    Ok(SplitBuild {
        chart,
        closed_form: closed,
        s_plus,
        s_minus,
        weights,
        verdicts: v,
    })
}

/// `b = (b_+ - b_-)/2` after arranging `b_+ >= b_-`. Census mode requires
/// `|D| = 4p(g-1)`, where `0 <= b <= 2p(g-1)` and `b` is an integer.
pub fn b_invariant(spec: &SplitSpec, census: bool) -> Result<Rational64> {
    let (bp, bm) = (spec.b_plus() as i64, spec.b_minus() as i64);
    let diff = (bp - bm).abs();
    if census {
        let p = spec.sc.p() as i64;
        let g = spec.sc.g() as i64;
        let n = spec.points.len() as i64;
        if n != 4 * p * (g - 1) {
            return Err(Error::CensusRange(format!("|D| = {n}, expected 4p(g-1) = {}", 4 * p * (g - 1))));
        }
        if diff % 2 != 0 {
            return Err(Error::ParityError(diff));
        }
        let b = diff / 2;
        if b > 2 * p * (g - 1) {
            return Err(Error::CensusRange(format!("b = {b} exceeds 2p(g-1)")));
        }
    }
    Ok(Rational64::new(diff, 2))
}

/// New sign at `perm[k]` is the old sign at `k`.
pub fn monodromy_apply(spec: &SplitSpec, perm: &[usize]) -> Result<SplitSpec> {
    let signs = permute(&spec.signs, perm)?;
    let out = SplitSpec {
        signs,
        ..spec.clone()
    };
    debug_assert_eq!(b_invariant(&out, false)?, b_invariant(spec, false)?);
    Ok(out)
}

fn permute(signs: &[i8], perm: &[usize]) -> Result<Vec<i8>> {
    let n = signs.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
        return Err(Error::Schema(format!("{perm:?} is not a permutation of {n} points")));
    }
    let mut out = vec![0; n];
    for (k, &t) in perm.iter().enumerate() {
        out[t] = signs[k];
    }
    Ok(out)
}

/// Closure of a sign vector under the group generated by `generators`.
pub fn sign_orbit(signs: &[i8], generators: &[Vec<usize>]) -> Result<BTreeSet<Vec<i8>>> {
    let mut orbit = BTreeSet::from([signs.to_vec()]);
    let mut frontier = vec![signs.to_vec()];
    while let Some(s) = frontier.pop() {
        for g in generators {
            let t = permute(&s, g)?;
            if orbit.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    Ok(orbit)
}

/// Generators of the full symmetric group: an `n`-cycle and a transposition.
pub fn symmetric_generators(n: usize) -> Vec<Vec<usize>> {
    if n < 2 {
        return vec![(0..n).collect()];
    }
    let cycle = (0..n).map(|k| (k + 1) % n).collect();
    let mut swap: Vec<usize> = (0..n).collect();
    swap.swap(0, 1);
    vec![cycle, swap]
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

    fn spec(a: &[&[i64]], signs: Vec<i8>) -> SplitSpec {
        let sc = SpectralCoeffs::new(f(), a.len(), 1, 2, a.iter().map(|c| p(c)).collect()).unwrap();
        SplitSpec::new(sc, signs).unwrap()
    }

    #[test]
    fn factor_examples() {
        let half = f().from_i64(2).inv().unwrap();
        let (sp, sm) = factor_signs(&spec(&[&[0, 1]], vec![1])).unwrap();
        assert_eq!((sp, sm), (p(&[0, 1]), Poly::constant(half.clone())));
        // roots -1, 1 in canonical order; + on 1, - on -1
        let (sp, sm) = factor_signs(&spec(&[&[-1, 0, 1]], vec![-1, 1])).unwrap();
        assert_eq!(sp, p(&[-1, 1]));
        assert_eq!(sm, p(&[1, 1]).scale(&half));
    }

    #[test]
    fn golden_split() {
        let s = spec(&[&[0, 1]], vec![1]);
        let out = build_split(&s).unwrap();
        assert!(out.verdicts.all_passed(), "{:?}", out.verdicts.failures());
        assert_eq!(out.chart.qv, PolyMat::from_int_rows(f(), &[&[&[], &[1]], &[&[1], &[0, 1]]]));
        assert_eq!(out.chart.beta, PolyMat::from_int_rows(f(), &[&[&[0, 1]], &[&[-1]]]));
        assert_eq!(out.chart.gamma, PolyMat::from_int_rows(f(), &[&[&[-1], &[]]]));
    }

    #[test]
    fn mixed_signs_p2_p3() {
        let s = spec(&[&[3, 1], &[-2, 0, 2]], vec![1, -1]);
        let out = build_split(&s).unwrap();
        assert!(out.verdicts.all_passed(), "{:?}", out.verdicts.failures());
        let s = spec(&[&[1], &[1, 2], &[0, -1, 0, 1]], vec![-1, 1, -1]);
        let out = build_split(&s).unwrap();
        assert!(out.verdicts.all_passed(), "{:?}", out.verdicts.failures());
    }

    #[test]
    fn psi_recovers_w0_block() {
        for a in [&[&[3, 1][..], &[-2, 0, 2]][..], &[&[1], &[1, 2], &[0, -1, 0, 1]]] {
            let s = spec(a, vec![1; a[a.len() - 1].len() - 1]);
            let sc = &s.sc;
            let ct = pushforward_trivial(sc);
            let psi = psi_matrix(sc);
            let q1 = &(&psi.transpose() * &(&ct.qw * &ct.beta_f)) * &psi;
            let expect = w0_form(sc).block_diag(&PolyMat::from_fn(f(), 1, 1, |_, _| -sc.ap()));
            assert_eq!(q1, expect);
        }
    }

    #[test]
    fn literal_form_is_degenerate() {
        let s = spec(&[&[0, 1]], vec![1]);
        let m = literal_pitfall_form(&s);
        let d = m.det().unwrap();
        assert_eq!(d.degree(), Some(2));
        assert!(!d.is_unit());
    }

    #[test]
    fn b_examples() {
        let sc = SpectralCoeffs::new(f(), 1, 1, 2, vec![Poly::from_roots(f(), &[0, 1, 2, 3].map(|k| f().from_i64(k)))]).unwrap();
        let s = SplitSpec::new(sc.clone(), vec![1, 1, 1, -1]).unwrap();
        assert_eq!(b_invariant(&s, true).unwrap(), Rational64::from_integer(1));
        let s = SplitSpec::new(sc.clone(), vec![1; 4]).unwrap();
        assert_eq!(b_invariant(&s, true).unwrap(), Rational64::from_integer(2));
        let s = SplitSpec::new(sc, vec![1, -1, -1, 1]).unwrap();
        assert_eq!(b_invariant(&s, true).unwrap(), Rational64::from_integer(0));
        assert_eq!(b_invariant(&s.flipped(), true).unwrap(), Rational64::from_integer(0));
    }

    #[test]
    fn monodromy_examples() {
        let sc = SpectralCoeffs::new(f(), 1, 1, 2, vec![p(&[-1, 0, 1])]).unwrap();
        let s = SplitSpec::new(sc, vec![1, -1]).unwrap();
        assert_eq!(monodromy_apply(&s, &[1, 0]).unwrap().signs, vec![-1, 1]);
        assert_eq!(monodromy_apply(&s, &[0, 1]).unwrap(), s);
        assert!(monodromy_apply(&s, &[0, 0]).is_err());
        let cyc = vec![vec![1, 2, 3, 0]];
        assert_eq!(sign_orbit(&[1, 1, -1, -1], &cyc).unwrap().len(), 4);
        let full = sign_orbit(&[1, 1, -1, -1], &symmetric_generators(4)).unwrap();
        assert_eq!(full.len(), 6);
        assert!(full.iter().all(|v| v.iter().filter(|&&e| e > 0).count() == 2));
    }

    #[test]
    fn json_round_trip() {
        let s = spec(&[&[-1, 0, 1]], vec![-1, 1]);
        let j = s.to_json();
        assert_eq!(j.signs.get("1").map(String::as_str), Some("+1"));
        assert_eq!(SplitSpec::from_json(f(), &j).unwrap(), s);
    }
}
