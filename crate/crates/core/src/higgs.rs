//! Orthogonal Higgs chart data `(V, W, Q_V, Q_W, beta, gamma)`, its
//! verification, and the Cayley chain down to the triple `(W, Q_W, beta_F)`.
//!
//! `Phi` acts on `E = V + W` as `Phi(v, w) = (beta w, gamma v)` and must be
//! skew for the form `Q_V(x, x') - Q_W(y, y')`, which amounts to
//! `Q_W gamma = beta^T Q_V`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    saturated_kernel, unimodular_completion, AuxPoly, Field, PolyMat, Poly,
};
use crate::langlands::QuadraticBundle;
use crate::report::Verdicts;
use crate::spectral::SpectralCoeffs;

/// Twist weight in units of `K`; half-integers occur.
pub type Weight = Rational64;

pub fn parse_weight(s: &str) -> Result<Weight> {
    s.trim()
        .parse::<Rational64>()
        .map_err(|_| Error::Schema(format!("cannot parse weight {s:?}")))
}

pub fn weight_string(w: &Weight) -> String {
    w.to_string()
}

pub fn weight_sum(ws: &[Weight]) -> Weight {
    ws.iter().copied().sum()
}

/// First nonzero entry, for failure witnesses.
pub(crate) fn first_nonzero(m: &PolyMat) -> Option<String> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !m[(i, j)].is_zero() {
                return Some(format!("entry ({i},{j}) = {}", m[(i, j)]));
            }
        }
    }
    None
}

pub(crate) fn polynomial_inverse(m: &PolyMat) -> Option<PolyMat> {
    m.to_ratmat().inverse()?.to_polymat()
}

pub(crate) fn check_form(name: &str, m: &PolyMat, skew: bool) -> Result<()> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("{name} is {}x{}", m.rows(), m.cols())));
    }
    if skew {
        if !m.is_skew() {
            return Err(Error::NonSkewForm(name.to_string()));
        }
    } else if !m.is_symmetric() {
        return Err(Error::NonSymmetricForm(name.to_string()));
    }
    let d = m.det()?;
    if !d.is_unit() {
        return Err(Error::NonUnimodularForm(format!("{name}: {d}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthHiggsChart {
    pub v_weights: Vec<Weight>,
    pub w_weights: Vec<Weight>,
    pub qv: PolyMat,
    pub qw: PolyMat,
    pub beta: PolyMat,
    pub gamma: PolyMat,
}

impl OrthHiggsChart {
    pub fn field(&self) -> Field {
        self.qv.field()
    }

    pub fn p(&self) -> usize {
        self.qw.rows()
    }

    pub fn rank_v(&self) -> usize {
        self.qv.rows()
    }

    pub fn q(&self) -> usize {
        self.rank_v() - self.p()
    }

    /// `[[0, beta], [gamma, 0]]` on `V + W`.
    pub fn phi(&self) -> PolyMat {
        let f = self.field();
        let (n, p) = (self.rank_v(), self.p());
        PolyMat::zeros(f, n, n)
            .hstack(&self.beta)
            .vstack(&self.gamma.hstack(&PolyMat::zeros(f, p, p)))
    }

    /// `Q_V + (-Q_W)`.
    pub fn combined_form(&self) -> PolyMat {
        self.qv.block_diag(&-&self.qw)
    }

    pub fn to_json(&self) -> OrthHiggsChartJson {
        OrthHiggsChartJson {
            v: SummandJson {
                weights: self.v_weights.iter().map(weight_string).collect(),
            },
            w: SummandJson {
                weights: self.w_weights.iter().map(weight_string).collect(),
            },
            qv: self.qv.to_strings(),
            qw: self.qw.to_strings(),
            beta: self.beta.to_strings(),
            gamma: Some(self.gamma.to_strings()),
        }
    }

    /// With `gamma` present the given matrix is used as is, so inconsistent
    /// data can be loaded and then rejected by [`verify_so`].
    pub fn from_json(field: Field, j: &OrthHiggsChartJson) -> Result<Self> {
        let vw = j.v.weights.iter().map(|s| parse_weight(s)).collect::<Result<Vec<_>>>()?;
        let ww = j.w.weights.iter().map(|s| parse_weight(s)).collect::<Result<Vec<_>>>()?;
        let qv = PolyMat::parse(field, &j.qv)?;
        let qw = PolyMat::parse(field, &j.qw)?;
        let beta = parse_with_cols(field, &j.beta, ww.len())?;
        let mut h = assemble_orth(vw, ww, qv, qw, beta)?;
        if let Some(g) = &j.gamma {
            let gamma = parse_with_cols(field, g, h.rank_v())?;
            if gamma.shape() != h.gamma.shape() {
                return Err(Error::ShapeMismatch(format!(
                    "gamma is {}x{}, expected {}x{}",
                    gamma.rows(),
                    gamma.cols(),
                    h.gamma.rows(),
                    h.gamma.cols()
                )));
            }
            h.gamma = gamma;
        }
        Ok(h)
    }
}

pub(crate) fn parse_with_cols(field: Field, rows: &[Vec<Vec<String>>], cols: usize) -> Result<PolyMat> {
    if rows.is_empty() {
        return Ok(PolyMat::zeros(field, 0, cols));
    }
    PolyMat::parse(field, rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandJson {
    pub weights: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthHiggsChartJson {
    #[serde(rename = "V")]
    pub v: SummandJson,
    #[serde(rename = "W")]
    pub w: SummandJson,
    #[serde(rename = "QV")]
    pub qv: Vec<Vec<Vec<String>>>,
    #[serde(rename = "QW")]
    pub qw: Vec<Vec<Vec<String>>>,
    pub beta: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<Vec<Vec<String>>>>,
}

/// Builds the chart data, deriving `gamma = Q_W^{-1} beta^T Q_V`.
pub fn assemble_orth(
    v_weights: Vec<Weight>,
    w_weights: Vec<Weight>,
    qv: PolyMat,
    qw: PolyMat,
    beta: PolyMat,
) -> Result<OrthHiggsChart> {
    let (n, p) = (qv.rows(), qw.rows());
    if !qv.is_square() || !qw.is_square() || beta.shape() != (n, p) {
        return Err(Error::ShapeMismatch(format!(
            "Q_V {}x{}, Q_W {}x{}, beta {}x{}",
            qv.rows(),
            qv.cols(),
            qw.rows(),
            qw.cols(),
            beta.rows(),
            beta.cols()
        )));
    }
    if v_weights.len() != n || w_weights.len() != p {
        return Err(Error::ShapeMismatch(format!(
            "{} V weights and {} W weights for ranks {n} and {p}",
            v_weights.len(),
            w_weights.len()
        )));
    }
    check_form("Q_V", &qv, false)?;
    check_form("Q_W", &qw, false)?;
    let qw_inv = polynomial_inverse(&qw).expect("unimodular matrix has polynomial inverse");
    let gamma = &(&qw_inv * &beta.transpose()) * &qv;
    Ok(OrthHiggsChart {
        v_weights,
        w_weights,
        qv,
        qw,
        beta,
        gamma,
    })
}

/// Skewness, characteristic polynomial, the involution `diag(1, -1)`, and
/// the determinant bookkeeping `sum(weights V) = sum(weights W)`.
pub fn verify_so(h: &OrthHiggsChart, sc: &SpectralCoeffs) -> Verdicts {
    let mut v = Verdicts::new();
    v.check("ranks", h.p() == sc.p() && h.q() == sc.q(), || {
        format!("chart has p={}, q={}; coefficients have p={}, q={}", h.p(), h.q(), sc.p(), sc.q())
    });
    v.check("q_positive", h.q() > 0, || "q = 0 is outside the pipeline".into());
    for (name, m) in [("Q_V", &h.qv), ("Q_W", &h.qw)] {
        let r = check_form(name, m, false);
        v.check(format!("{name}_symmetric_unimodular"), r.is_ok(), || {
            r.unwrap_err().to_string()
        });
    }
    let phi = h.phi();
    let b = h.combined_form();
    let skew = &(&phi.transpose() * &b) + &(&b * &phi);
    v.check("skew_adjoint", skew.is_zero(), || {
        format!("Phi^T Q + Q Phi has {}", first_nonzero(&skew).unwrap())
    });
    match phi.char_poly() {
        Ok(cp) => {
            let model = sc.char_poly_model();
            v.check("char_poly", cp == model, || {
                format!("det(eta - Phi) = {}, expected {}", cp.display("eta"), model.display("eta"))
            });
        }
        Err(e) => v.fail("char_poly", e.to_string()),
    }
    let f = PolyMat::identity(h.field(), h.rank_v()).block_diag(&-&PolyMat::identity(h.field(), h.p()));
    let conj = &(&f * &phi) * &f;
    let anti = &conj + &phi;
    v.check("involution_anticommutes", anti.is_zero(), || {
        format!("f Phi f + Phi has {}", first_nonzero(&anti).unwrap())
    });
    let (sv, sw) = (weight_sum(&h.v_weights), weight_sum(&h.w_weights));
    v.check("determinant_weights", sv == sw, || {
        format!("sum of V weights {sv} != sum of W weights {sw}")
    });
    v
}

/// `V_0 = ker gamma` with its saturated basis and restricted form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelQuadratic {
    /// Columns are the basis of `V_0` inside `V`.
    pub basis: PolyMat,
    pub bundle: QuadraticBundle,
}

pub fn kernel_quadratic(h: &OrthHiggsChart, sc: &SpectralCoeffs) -> Result<KernelQuadratic> {
    if sc.q() == 0 {
        return Err(Error::Unsupported("q = 0 has no kernel bundle".into()));
    }
    let k = saturated_kernel(&h.gamma);
    if k.cols() != sc.q() {
        return Err(Error::RankMismatch {
            expected: sc.q(),
            found: k.cols(),
        });
    }
    let q0 = &(&k.transpose() * &h.qv) * &k;
    let det = q0.det()?;
    if det.monic() != sc.ap().monic() {
        return Err(Error::DeterminantMismatch(format!(
            "det Q_0 = {det}, a_p = {}",
            sc.ap()
        )));
    }
    // V / V_0 is identified with W (x) K through gamma_plus
    let w0 = weight_sum(&h.v_weights) - weight_sum(&h.w_weights) - Weight::from_integer(sc.p() as i64);
    let mut weights = vec![Weight::from_integer(0); sc.q()];
    weights[sc.q() - 1] = w0;
    Ok(KernelQuadratic {
        basis: k,
        bundle: QuadraticBundle::new(weights, q0)?,
    })
}

/// `V_1 = V / V_0` with the induced `beta_plus`, `gamma_plus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UppQuotient {
    /// Unimodular `P = [K | C]`: `K` spans `V_0`, `C` lifts a basis of `V_1`.
    pub completion: PolyMat,
    pub completion_inv: PolyMat,
    pub v1_weights: Vec<Weight>,
    pub beta_plus: PolyMat,
    pub gamma_plus: PolyMat,
}

impl UppQuotient {
    pub fn phi_plus(&self) -> PolyMat {
        let f = self.beta_plus.field();
        let p = self.beta_plus.rows();
        PolyMat::zeros(f, p, p)
            .hstack(&self.beta_plus)
            .vstack(&self.gamma_plus.hstack(&PolyMat::zeros(f, p, p)))
    }

    pub fn beta_f(&self) -> PolyMat {
        &self.gamma_plus * &self.beta_plus
    }
}

pub fn upp_quotient(h: &OrthHiggsChart, sc: &SpectralCoeffs) -> Result<(UppQuotient, Verdicts)> {
    let kq = kernel_quadratic(h, sc)?;
    let (pm, pinv) = unimodular_completion(&kq.basis)?;
    let (n, q) = (h.rank_v(), sc.q());
    let cols: Vec<usize> = (q..n).collect();
    let lift = pm.select_cols(&cols);
    let beta_plus = (&pinv * &h.beta).select_rows(&cols);
    let gamma_plus = &h.gamma * &lift;
    let det = gamma_plus.det()?;
    if !det.is_unit() {
        return Err(Error::GammaPlusNotIso(det.to_string()));
    }
    let one = Weight::from_integer(1);
    let out = UppQuotient {
        completion: pm,
        completion_inv: pinv,
        v1_weights: h.w_weights.iter().map(|w| w + one).collect(),
        beta_plus,
        gamma_plus,
    };
    let mut v = Verdicts::new();
    let cp = out.phi_plus().char_poly()?;
    let model = sc.s_poly();
    v.check("char_poly_plus", cp == model, || {
        format!("det(eta - Phi_+) = {}, expected {}", cp.display("eta"), model.display("eta"))
    });
    Ok((out, v))
}

/// `F = W K^{1/2} + W K^{-1/2}` with `Phi_F = [[0, beta_F], [1, 0]]` and
/// `omega_F = [[0, Q_W], [-Q_W, 0]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpCayley {
    pub f_weights: Vec<Weight>,
    pub phi_f: PolyMat,
    pub omega_f: PolyMat,
}

pub fn cayley_symplectic(uq: &UppQuotient, qw: &PolyMat, w_weights: &[Weight]) -> (SpCayley, Verdicts) {
    let f = qw.field();
    let p = qw.rows();
    let half = Weight::new(1, 2);
    let zero = PolyMat::zeros(f, p, p);
    let id = PolyMat::identity(f, p);
    let phi_f = zero.hstack(&uq.beta_f()).vstack(&id.hstack(&zero));
    let omega_f = zero.hstack(qw).vstack(&(-qw).hstack(&zero));
    let mut f_weights: Vec<Weight> = w_weights.iter().map(|w| w + half).collect();
    f_weights.extend(w_weights.iter().map(|w| w - half));
    let mut v = Verdicts::new();
    let skew = &(&phi_f.transpose() * &omega_f) + &(&omega_f * &phi_f);
    v.check("omega_skew", skew.is_zero(), || {
        format!("Phi_F^T omega + omega Phi_F has {}", first_nonzero(&skew).unwrap())
    });
    let iso = omega_f.submatrix(0..p, 0..p).is_zero() && omega_f.submatrix(p..2 * p, p..2 * p).is_zero();
    v.check("summands_isotropic", iso, || "diagonal block of omega_F nonzero".into());
    (
        SpCayley {
            f_weights,
            phi_f,
            omega_f,
        },
        v,
    )
}

/// The `K^2`-twisted triple `(W, Q_W, beta_F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTriple {
    pub w_weights: Vec<Weight>,
    pub qw: PolyMat,
    pub beta_f: PolyMat,
}

impl CayleyTriple {
    pub fn p(&self) -> usize {
        self.qw.rows()
    }

    pub fn field(&self) -> Field {
        self.qw.field()
    }

    /// `Q_W beta_F` symmetric, `det beta_F = (-1)^p a_p`, char poly `p-bar`.
    pub fn verify(&self, sc: &SpectralCoeffs) -> Verdicts {
        let mut v = Verdicts::new();
        let r = check_form("Q_W", &self.qw, false);
        v.check("Q_W_symmetric_unimodular", r.is_ok(), || r.unwrap_err().to_string());
        let prod = &self.qw * &self.beta_f;
        v.check("Q_W_beta_F_symmetric", prod.is_symmetric(), || {
            format!("Q_W beta_F = {prod}")
        });
        match self.beta_f.det() {
            Ok(d) => {
                let expect = if sc.p().is_multiple_of(2) { sc.ap().clone() } else { -sc.ap() };
                v.check("det_beta_F", d == expect, || format!("det beta_F = {d}, expected {expect}"));
            }
            Err(e) => v.fail("det_beta_F", e.to_string()),
        }
        match self.beta_f.char_poly() {
            Ok(cp) => {
                let model = sc.sbar_poly();
                v.check("char_poly_beta_F", cp == model, || {
                    format!("{} != {}", cp.display("xi"), model.display("xi"))
                });
            }
            Err(e) => v.fail("char_poly_beta_F", e.to_string()),
        }
        v
    }

    pub fn to_json(&self) -> CayleyTripleJson {
        CayleyTripleJson {
            w_weights: self.w_weights.iter().map(weight_string).collect(),
            qw: self.qw.to_strings(),
            beta_f: self.beta_f.to_strings(),
        }
    }

    pub fn from_json(field: Field, j: &CayleyTripleJson) -> Result<Self> {
        let w_weights = j.w_weights.iter().map(|s| parse_weight(s)).collect::<Result<Vec<_>>>()?;
        let qw = PolyMat::parse(field, &j.qw)?;
        let beta_f = PolyMat::parse(field, &j.beta_f)?;
        let p = qw.rows();
        if beta_f.shape() != (p, p) || w_weights.len() != p {
            return Err(Error::ShapeMismatch("Cayley triple shapes".into()));
        }
        check_form("Q_W", &qw, false)?;
        Ok(CayleyTriple {
            w_weights,
            qw,
            beta_f,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CayleyTripleJson {
    pub w_weights: Vec<String>,
    #[serde(rename = "QW")]
    pub qw: Vec<Vec<Vec<String>>>,
    pub beta_f: Vec<Vec<Vec<String>>>,
}

pub fn cayley_triple(h: &OrthHiggsChart, uq: &UppQuotient, sc: &SpectralCoeffs) -> (CayleyTriple, Verdicts) {
    let ct = CayleyTriple {
        w_weights: h.w_weights.clone(),
        qw: h.qw.clone(),
        beta_f: uq.beta_f(),
    };
    let v = ct.verify(sc);
    (ct, v)
}

/// Companion model for the trivial line bundle on `S-bar`: basis
/// `1, xi, ..., xi^(p-1)`, `beta_F` the companion matrix and
/// `Q_W(i, j) = h_{i+j-(p+1)}` (1-based, zero when `i + j < p + 1`).
pub fn pushforward_trivial(sc: &SpectralCoeffs) -> CayleyTriple {
    let f = sc.field();
    let p = sc.p();
    let h = sc.complete_homogeneous(p);
    let qw = PolyMat::from_fn(f, p, p, |i, j| {
        let s = i + j + 2;
        if s < p + 1 {
            Poly::zero(f)
        } else {
            h[s - (p + 1)].clone()
        }
    });
    let beta_f = PolyMat::from_fn(f, p, p, |i, j| {
        if j + 1 < p {
            if i == j + 1 {
                Poly::one(f)
            } else {
                Poly::zero(f)
            }
        } else {
            -&sc.a(p - i)
        }
    });
    let w_weights = (0..p)
        .map(|i| Weight::from_integer(p as i64 - 1 - 2 * i as i64))
        .collect();
    CayleyTriple {
        w_weights,
        qw,
        beta_f,
    }
}

/// Symplectic chart data for the `Sp(2p+2q, 2p)` analogue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpChart {
    pub omega_v: PolyMat,
    pub omega_w: PolyMat,
    pub beta: PolyMat,
    pub gamma: PolyMat,
}

impl SpChart {
    /// Derives `gamma = Omega_W^{-1} beta^T Omega_V`.
    pub fn new(omega_v: PolyMat, omega_w: PolyMat, beta: PolyMat) -> Result<Self> {
        if beta.shape() != (omega_v.rows(), omega_w.rows()) {
            return Err(Error::ShapeMismatch("beta does not map W to V".into()));
        }
        let inv = omega_w
            .to_ratmat()
            .inverse()
            .ok_or_else(|| Error::NonUnimodularForm("Omega_W is singular".into()))?;
        let gamma = (&(&inv * &beta.transpose().to_ratmat()) * &omega_v.to_ratmat())
            .to_polymat()
            .ok_or_else(|| Error::NonUnimodularForm("Omega_W has no polynomial inverse".into()))?;
        Ok(SpChart {
            omega_v,
            omega_w,
            beta,
            gamma,
        })
    }

    pub fn phi(&self) -> PolyMat {
        let f = self.beta.field();
        let (n, m) = (self.omega_v.rows(), self.omega_w.rows());
        PolyMat::zeros(f, n, n)
            .hstack(&self.beta)
            .vstack(&self.gamma.hstack(&PolyMat::zeros(f, m, m)))
    }
}

/// Form checks and the square structure `eta^{2q} f(eta^2)^2` of the
/// characteristic polynomial. When `sc` is given, `f` must be its `p-bar`;
/// otherwise `f` is extracted by a polynomial square root.
pub fn verify_sp(h: &SpChart, sc: Option<&SpectralCoeffs>) -> (Verdicts, Option<AuxPoly>) {
    let mut v = Verdicts::new();
    for (name, m) in [("Omega_V", &h.omega_v), ("Omega_W", &h.omega_w)] {
        let r = check_form(name, m, true);
        v.check(format!("{name}_skew_unimodular"), r.is_ok(), || r.unwrap_err().to_string());
    }
    let (n, m) = (h.omega_v.rows(), h.omega_w.rows());
    let shapes_ok = n >= m && m % 2 == 0 && n % 2 == 0;
    v.check("ranks_even", shapes_ok, || format!("rank V = {n}, rank W = {m}"));
    let lhs = &h.omega_w * &h.gamma;
    let rhs = &h.beta.transpose() * &h.omega_v;
    v.check("symplectic_transpose", lhs == rhs, || {
        format!("Omega_W gamma - beta^T Omega_V has {}", first_nonzero(&(&lhs - &rhs)).unwrap())
    });
    let phi = h.phi();
    let b = h.omega_v.block_diag(&-&h.omega_w);
    let skew = &(&phi.transpose() * &b) + &(&b * &phi);
    v.check("skew_adjoint", skew.is_zero(), || first_nonzero(&skew).unwrap().to_string());
    if !shapes_ok {
        return (v, None);
    }
    let f = phi.field();
    let two_q = n - m;
    let p = m / 2;
    let cp = match phi.char_poly() {
        Ok(cp) => cp,
        Err(e) => {
            v.fail("char_poly_square", e.to_string());
            return (v, None);
        }
    };
    // strip eta^{2q} and pass to xi = eta^2
    let low_ok = (0..two_q).all(|k| cp.coeff(k).is_zero());
    let rest: Vec<Poly> = (two_q..=cp.degree().unwrap_or(0)).map(|k| cp.coeff(k)).collect();
    let odd_ok = rest.iter().skip(1).step_by(2).all(Poly::is_zero);
    let g = AuxPoly::from_coeffs(f, rest.iter().step_by(2).cloned().collect());
    let root = if low_ok && odd_ok { g.sqrt_monic() } else { None };
    let root = match (root, sc) {
        (Some(r), Some(sc)) => {
            let model = sc.sbar_poly();
            v.check("char_poly_matches_coefficients", r == model, || {
                format!("{} != {}", r.display("xi"), model.display("xi"))
            });
            Some(r)
        }
        (r, _) => r,
    };
    v.check("char_poly_square", root.is_some(), || {
        format!("det(eta - Phi) = {} is not eta^{two_q} f(eta^2)^2", cp.display("eta"))
    });
    if let Some(r) = &root {
        let ap = r.coeff(0);
        let regular = r.degree() == Some(p) && !ap.is_zero() && ap.is_squarefree().unwrap_or(false);
        v.check("regular", regular, || format!("f = {} is not regular", r.display("xi")));
    }
    (v, root)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> Field {
        Field::default()
    }

    fn w(ws: &[i64]) -> Vec<Weight> {
        ws.iter().map(|&x| Weight::from_integer(x)).collect()
    }

    fn golden() -> OrthHiggsChart {
        let qv = PolyMat::from_int_rows(f(), &[&[&[], &[1]], &[&[1], &[0, 1]]]);
        let qw = PolyMat::from_int_rows(f(), &[&[&[1]]]);
        let beta = PolyMat::from_int_rows(f(), &[&[&[0, 1]], &[&[-1]]]);
        assemble_orth(w(&[-1, 1]), w(&[0]), qv, qw, beta).unwrap()
    }

    fn sc1() -> SpectralCoeffs {
        SpectralCoeffs::new(f(), 1, 1, 2, vec![Poly::z(f())]).unwrap()
    }

    #[test]
    fn assemble_golden() {
        let h = golden();
        assert_eq!(h.gamma, PolyMat::from_int_rows(f(), &[&[&[-1], &[]]]));
        assert!(verify_so(&h, &sc1()).all_passed());
    }

    #[test]
    fn assemble_zero_beta_and_bad_form() {
        let qv = PolyMat::from_int_rows(f(), &[&[&[], &[1]], &[&[1], &[0, 1]]]);
        let qw = PolyMat::from_int_rows(f(), &[&[&[1]]]);
        let h = assemble_orth(w(&[0, 0]), w(&[0]), qv, qw.clone(), PolyMat::zeros(f(), 2, 1)).unwrap();
        assert!(h.gamma.is_zero() && h.phi().is_zero());
        let bad = PolyMat::from_int_rows(f(), &[&[&[], &[0, 1]], &[&[0, 1], &[]]]);
        assert!(matches!(
            assemble_orth(w(&[0, 0]), w(&[0]), bad, qw, PolyMat::zeros(f(), 2, 1)),
            Err(Error::NonUnimodularForm(_))
        ));
    }

    #[test]
    fn sign_flip_breaks_skewness() {
        let mut h = golden();
        h.gamma[(0, 0)] = Poly::one(f());
        let v = verify_so(&h, &sc1());
        assert!(!v.get("skew_adjoint").unwrap().passed);
    }

    #[test]
    fn cayley_chain_golden() {
        let h = golden();
        let sc = sc1();
        let kq = kernel_quadratic(&h, &sc).unwrap();
        assert_eq!(kq.bundle.q0.det().unwrap().monic(), Poly::z(f()));
        assert_eq!(weight_sum(&kq.bundle.weights), Weight::from_integer(-1));
        let (uq, v) = upp_quotient(&h, &sc).unwrap();
        assert!(v.all_passed());
        assert!(uq.gamma_plus.det().unwrap().is_unit());
        let (sp, v) = cayley_symplectic(&uq, &h.qw, &h.w_weights);
        assert!(v.all_passed());
        assert_eq!(sp.phi_f[(0, 1)], Poly::from_ints(f(), &[0, -1]));
        let (ct, v) = cayley_triple(&h, &uq, &sc);
        assert!(v.all_passed(), "{v:?}");
        assert_eq!(ct.beta_f, PolyMat::from_int_rows(f(), &[&[&[0, -1]]]));
    }

    #[test]
    fn companion_small_cases() {
        let ct = pushforward_trivial(&sc1());
        assert_eq!(ct.qw, PolyMat::identity(f(), 1));
        assert_eq!(ct.beta_f, PolyMat::from_int_rows(f(), &[&[&[0, -1]]]));
        let sc = SpectralCoeffs::new(f(), 2, 1, 2, vec![Poly::from_ints(f(), &[3, 1]), Poly::z(f())]).unwrap();
        let ct = pushforward_trivial(&sc);
        assert_eq!(ct.qw, PolyMat::from_int_rows(f(), &[&[&[], &[1]], &[&[1], &[-3, -1]]]));
        assert!(ct.verify(&sc).all_passed());
    }

    fn kron_j(m: &PolyMat) -> PolyMat {
        let fl = m.field();
        PolyMat::from_fn(fl, 2 * m.rows(), 2 * m.cols(), |i, j| {
            let e = &m[(i / 2, j / 2)];
            match (i % 2, j % 2) {
                (0, 1) => e.clone(),
                (1, 0) => -e,
                _ => Poly::zero(fl),
            }
        })
    }

    fn kron_i(m: &PolyMat) -> PolyMat {
        let fl = m.field();
        PolyMat::from_fn(fl, 2 * m.rows(), 2 * m.cols(), |i, j| {
            if i % 2 == j % 2 {
                m[(i / 2, j / 2)].clone()
            } else {
                Poly::zero(fl)
            }
        })
    }

    #[test]
    fn doubled_golden_symplectic() {
        let h = golden();
        let sp = SpChart::new(kron_j(&h.qv), kron_j(&h.qw), kron_i(&h.beta)).unwrap();
        let (v, root) = verify_sp(&sp, Some(&sc1()));
        assert!(v.all_passed(), "{v:?}");
        assert_eq!(root.unwrap(), sc1().sbar_poly());
    }

    #[test]
    fn symplectic_negative_cases() {
        let h = golden();
        let sp = SpChart::new(kron_j(&h.qv), kron_j(&h.qw), PolyMat::zeros(f(), 4, 2)).unwrap();
        let (v, _) = verify_sp(&sp, None);
        assert!(!v.get("regular").unwrap().passed);
        let sym = SpChart {
            omega_v: PolyMat::identity(f(), 4),
            ..sp
        };
        let (v, _) = verify_sp(&sym, None);
        assert!(!v.get("Omega_V_skew_unimodular").unwrap().passed);
    }
}
