//! Quadratic bundles on the base, equivariant orthogonal bundles on the
//! double cover `C: zeta^2 = a_p`, and the reconstruction of `V` from the
//! Cayley triple, `(V_0, Q_0)` and extension data `{i_x}`.
//!
//! Sign conventions. On the companion model the line `ker beta_F(x)` is
//! spanned by `j_x = (a_{p-1}(x), ..., a_1(x), 1)` with
//! `Q_W(j_x, j_x) = a_{p-1}(x)`. Admissible extension data are
//! `i_x = tau_x j_x` with `tau_x = +-1`. The sections added to `V' =
//! W K^{-1} + V_0` at `x` are `(-i_x, n_x) / (z - x)`, where `n_x` spans the
//! null line of `Q_0(x)` and is scaled so that `(Q_0(n, n) / a_p)(x) = 1`.
//! Replacing every `i_x` by `-i_x` gives an isomorphic bundle (apply
//! `-1` on the `W K^{-1}` summand).

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    smith_hermite_basis, smith_invariants, Field, ModuleBasis, Poly, PolyMat, RatFunc, RatMat,
    Scalar, ScalarMat,
};
use crate::higgs::{
    assemble_orth, parse_weight, verify_so, weight_string, weight_sum, CayleyTriple,
    OrthHiggsChart, Weight,
};
use crate::report::Verdicts;
use crate::spectral::SpectralCoeffs;

/// `(V_0, Q_0)` with `det Q_0 = unit * a_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticBundle {
    pub weights: Vec<Weight>,
    pub q0: PolyMat,
}

impl QuadraticBundle {
    pub fn new(weights: Vec<Weight>, q0: PolyMat) -> Result<Self> {
        if !q0.is_square() || weights.len() != q0.rows() {
            return Err(Error::ShapeMismatch(format!(
                "Q_0 is {}x{} with {} weights",
                q0.rows(),
                q0.cols(),
                weights.len()
            )));
        }
        if !q0.is_symmetric() {
            return Err(Error::NonSymmetricForm("Q_0".into()));
        }
        Ok(QuadraticBundle { weights, q0 })
    }

    /// Rank one, `Q_0 = a_p`, weight `-p`.
    pub fn standard(sc: &SpectralCoeffs) -> Self {
        QuadraticBundle {
            weights: vec![Weight::from_integer(-(sc.p() as i64))],
            q0: PolyMat::from_fn(sc.field(), 1, 1, |_, _| sc.ap().clone()),
        }
    }

    /// `V_0 = O^{q-1} + K^{-p}` with `Q_0 = diag(1, ..., 1, a_p)`.
    pub fn with_trivial_part(sc: &SpectralCoeffs, q: usize) -> Self {
        let f = sc.field();
        let q0 = PolyMat::from_fn(f, q, q, |i, j| match (i == j, i + 1 == q) {
            (true, true) => sc.ap().clone(),
            (true, false) => Poly::one(f),
            _ => Poly::zero(f),
        });
        let mut weights = vec![Weight::from_integer(0); q];
        weights[q - 1] = Weight::from_integer(-(sc.p() as i64));
        QuadraticBundle { weights, q0 }
    }

    pub fn q(&self) -> usize {
        self.q0.rows()
    }

    pub fn field(&self) -> Field {
        self.q0.field()
    }

    /// `det Q_0 = unit * a_p` and weight sum `-p`.
    pub fn verify(&self, sc: &SpectralCoeffs) -> Verdicts {
        let mut v = Verdicts::new();
        let det = self.q0.det().unwrap();
        v.check("det_Q0_is_unit_times_a_p", det.monic() == sc.ap().monic(), || {
            format!("det Q_0 = {det}, a_p = {}", sc.ap())
        });
        let s = weight_sum(&self.weights);
        v.check("weight_sum", s == Weight::from_integer(-(sc.p() as i64)), || {
            format!("weight sum {s}, expected -{}", sc.p())
        });
        v
    }

    pub fn to_json(&self) -> QuadraticBundleJson {
        QuadraticBundleJson {
            weights: self.weights.iter().map(weight_string).collect(),
            q0: self.q0.to_strings(),
        }
    }

    pub fn from_json(field: Field, j: &QuadraticBundleJson) -> Result<Self> {
        let w = j.weights.iter().map(|s| parse_weight(s)).collect::<Result<Vec<_>>>()?;
        Self::new(w, PolyMat::parse(field, &j.q0)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticBundleJson {
    pub weights: Vec<String>,
    #[serde(rename = "Q0")]
    pub q0: Vec<Vec<Vec<String>>>,
}

/// Equivariant orthogonal bundle on `C` in a decomposable chart model: a sum
/// of line summands with degree metadata, a constant Gram matrix `Q_M` and a
/// constant lift `S` of the covering involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantBundle {
    pub degrees: Vec<i64>,
    pub q_m: ScalarMat,
    pub sigma: ScalarMat,
    pub orientation: i8,
}

impl EquivariantBundle {
    pub fn new(degrees: Vec<i64>, q_m: ScalarMat, sigma: ScalarMat, orientation: i8) -> Result<Self> {
        let q = degrees.len();
        if q_m.shape() != (q, q) || sigma.shape() != (q, q) {
            return Err(Error::ShapeMismatch(format!(
                "{q} summands with Q_M {}x{} and sigma {}x{}",
                q_m.rows(),
                q_m.cols(),
                sigma.rows(),
                sigma.cols()
            )));
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::Schema("orientation must be +1 or -1".into()));
        }
        let m = EquivariantBundle {
            degrees,
            q_m,
            sigma,
            orientation,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn q(&self) -> usize {
        self.degrees.len()
    }

    pub fn field(&self) -> Field {
        self.q_m.field()
    }

    fn validate(&self) -> Result<()> {
        let f = self.field();
        let q = self.q();
        if !self.q_m.is_symmetric() || self.q_m.det()?.is_zero() {
            return Err(Error::NonUnimodularForm("Q_M must be symmetric and nondegenerate".into()));
        }
        let id = ScalarMat::identity(f, q);
        if &self.sigma * &self.sigma != id {
            return Err(Error::TypeMismatch("sigma is not an involution".into()));
        }
        if &(&self.sigma.transpose() * &self.q_m) * &self.sigma != self.q_m {
            return Err(Error::TypeMismatch("sigma is not an isometry of Q_M".into()));
        }
        let minus = self.minus_space().cols();
        if minus != 1 {
            return Err(Error::TypeMismatch(format!(
                "involution has type ({}, {minus}), expected ({}, 1)",
                q - minus,
                q - 1
            )));
        }
        Ok(())
    }

    pub fn plus_space(&self) -> ScalarMat {
        (&self.sigma - &ScalarMat::identity(self.field(), self.q())).nullspace()
    }

    pub fn minus_space(&self) -> ScalarMat {
        (&self.sigma + &ScalarMat::identity(self.field(), self.q())).nullspace()
    }

    pub fn certificate(&self) -> EquivariantCertificate {
        let (bp, bm) = (self.plus_space(), self.minus_space());
        let a = &(&bp.transpose() * &self.q_m) * &bp;
        let b = &(&bm.transpose() * &self.q_m) * &bm;
        let unit = a.det().unwrap() * b.det().unwrap();
        EquivariantCertificate {
            rank: self.q(),
            type_plus: bp.cols(),
            type_minus: bm.cols(),
            det_unit_is_square: unit.is_square(),
            local_models: true,
        }
    }

    pub fn to_json(&self) -> EquivariantBundleJson {
        EquivariantBundleJson {
            degrees: self.degrees.clone(),
            q_m: self.q_m.to_strings(),
            sigma: self.sigma.to_strings(),
            orientation: self.orientation,
        }
    }

    pub fn from_json(field: Field, j: &EquivariantBundleJson) -> Result<Self> {
        let parse = |rows: &Vec<Vec<String>>| -> Result<ScalarMat> {
            let r = rows
                .iter()
                .map(|row| row.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            ScalarMat::from_rows(field, r.first().map_or(0, Vec::len), r)
        };
        Self::new(j.degrees.clone(), parse(&j.q_m)?, parse(&j.sigma)?, j.orientation)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivariantBundleJson {
    pub degrees: Vec<i64>,
    #[serde(rename = "QM")]
    pub q_m: Vec<Vec<String>>,
    pub sigma: Vec<Vec<String>>,
    #[serde(default = "default_orientation")]
    pub orientation: i8,
}

fn default_orientation() -> i8 {
    1
}

/// Structural data compared in round trips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivariantCertificate {
    pub rank: usize,
    pub type_plus: usize,
    pub type_minus: usize,
    /// Class of `det Q_0 / a_p` modulo squares of units.
    pub det_unit_is_square: bool,
    /// Corank one and a simple zero of `det Q_0` at every branch point.
    pub local_models: bool,
}

/// Corank one and `ord_x det Q_0 = 1` at each `x`.
pub fn local_model_check(q0: &PolyMat, points: &[Scalar]) -> Verdicts {
    let mut v = Verdicts::new();
    let det = q0.det().unwrap();
    for x in points {
        let corank = q0.rows() - q0.eval(x).rank();
        let lin = Poly::linear(x);
        let ord_one = lin.divides(&det) && !(&lin * &lin).divides(&det);
        v.check(format!("local_model[{x}]"), corank == 1 && ord_one, || {
            format!("corank {corank}, det Q_0 = {det}")
        });
    }
    v
}

pub fn quadratic_certificate(v0: &QuadraticBundle, sc: &SpectralCoeffs) -> Result<EquivariantCertificate> {
    let d = sc.branch_points()?;
    let det = v0.q0.det()?;
    let unit = det
        .exact_div(sc.ap())
        .filter(Poly::is_unit)
        .ok_or_else(|| Error::DeterminantMismatch(format!("det Q_0 = {det}, a_p = {}", sc.ap())))?;
    let local = local_model_check(&v0.q0, &d);
    Ok(EquivariantCertificate {
        rank: v0.q(),
        type_plus: v0.q() - 1,
        type_minus: 1,
        det_unit_is_square: unit.lead().is_square(),
        local_models: local.all_passed(),
    })
}

/// Invariant sections: `e` for `sigma`-invariant frames and `zeta e` for
/// anti-invariant ones, so `Q_0 = Q_M|E+ + a_p Q_M|E-`.
pub fn invariant_direct_image(m: &EquivariantBundle, sc: &SpectralCoeffs) -> Result<(QuadraticBundle, Verdicts)> {
    let f = sc.field();
    let d = sc.branch_points()?;
    if d.is_empty() {
        return Err(Error::NotRegular("a_p is constant, the cover is unramified".into()));
    }
    m.validate()?;
    let (bp, bm) = (m.plus_space(), m.minus_space());
    let a = &(&bp.transpose() * &m.q_m) * &bp;
    let b = &(&bm.transpose() * &m.q_m) * &bm;
    let q0 = PolyMat::from_scalars(&a).block_diag(&PolyMat::from_scalars(&b).map(|e| e * sc.ap()));
    let mut weights = vec![Weight::from_integer(0); bp.cols()];
    weights.extend(vec![Weight::from_integer(-(sc.p() as i64)); bm.cols()]);
    let v0 = QuadraticBundle { weights, q0 };
    let _ = f;
    let v = local_model_check(&v0.q0, &d);
    Ok((v0, v))
}

/// Result of [`equivariant_lift`]: the bundle on `C` and the constant frame
/// `T` with `T^T Q_0 T = blockdiag(Q_M|E+, a_p Q_M|E-)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantLift {
    pub bundle: EquivariantBundle,
    pub frame: ScalarMat,
}

/// Inverse of [`invariant_direct_image`] for forms `Q_0 = C_0 + a_p C_1`
/// with constant `C_0, C_1`.
pub fn equivariant_lift(v0: &QuadraticBundle, sc: &SpectralCoeffs) -> Result<EquivariantLift> {
    let f = sc.field();
    let ap = sc.ap();
    if ap.is_constant() {
        return Err(Error::NotRegular("a_p is constant, D is empty".into()));
    }
    let q = v0.q();
    let det = v0.q0.det()?;
    if det.exact_div(ap).filter(Poly::is_unit).is_none() {
        return Err(Error::DeterminantMismatch(format!("det Q_0 = {det}, a_p = {ap}")));
    }
    let mut c0 = ScalarMat::zeros(f, q, q);
    let mut c1 = ScalarMat::zeros(f, q, q);
    for i in 0..q {
        for j in 0..q {
            let (quo, rem) = v0.q0[(i, j)].div_rem(ap)?;
            if !quo.is_constant() || !rem.is_constant() {
                return Err(Error::Indecomposable(format!(
                    "Q_0 entry ({i},{j}) = {} is not constant + constant * a_p",
                    v0.q0[(i, j)]
                )));
            }
            c0[(i, j)] = rem.coeff(0);
            c1[(i, j)] = quo.coeff(0);
        }
    }
    let ep = c1.nullspace();
    let em = c0.nullspace();
    let frame = ep.hstack(&em);
    if em.cols() != 1 || frame.cols() != q || frame.det()?.is_zero() {
        return Err(Error::Indecomposable(format!(
            "ker C_1 (dim {}) and ker C_0 (dim {}) do not split V_0",
            ep.cols(),
            em.cols()
        )));
    }
    let a = &(&ep.transpose() * &c0) * &ep;
    let b = &(&em.transpose() * &c1) * &em;
    let q_m = a.block_diag(&b);
    let sigma = ScalarMat::from_fn(f, q, q, |i, j| match (i == j, i + 1 == q) {
        (true, true) => f.from_i64(-1),
        (true, false) => f.one(),
        _ => f.zero(),
    });
    Ok(EquivariantLift {
        bundle: EquivariantBundle::new(vec![0; q], q_m, sigma, 1)?,
        frame,
    })
}

/// Result of the stability check on a decomposable model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stability {
    /// Coordinate subsets spanning invariant isotropic subbundles, with degree.
    pub invariant_isotropic: Vec<(Vec<usize>, i64)>,
    pub stable: bool,
}

/// Degree condition over invariant isotropic subbundles spanned by summands.
/// Requires `sigma` to permute the summand lines (up to scalars).
pub fn stability_check(m: &EquivariantBundle) -> Result<Stability> {
    let q = m.q();
    let monomial = (0..q).all(|j| (0..q).filter(|&i| !m.sigma[(i, j)].is_zero()).count() == 1);
    if !monomial {
        return Err(Error::Indecomposable(
            "sigma does not permute the line summands".into(),
        ));
    }
    if q > 20 {
        return Err(Error::Unsupported("more than 20 summands".into()));
    }
    let mut found = vec![];
    for mask in 1u32..(1 << q) {
        let idx: Vec<usize> = (0..q).filter(|i| mask & (1 << i) != 0).collect();
        let invariant = idx.iter().all(|&j| {
            (0..q).all(|i| m.sigma[(i, j)].is_zero() || mask & (1 << i) != 0)
        });
        let isotropic = idx.iter().all(|&i| idx.iter().all(|&j| m.q_m[(i, j)].is_zero()));
        if invariant && isotropic {
            let deg = idx.iter().map(|&i| m.degrees[i]).sum();
            found.push((idx, deg));
        }
    }
    let stable = found.iter().all(|(_, d)| *d <= 0);
    Ok(Stability {
        invariant_isotropic: found,
        stable,
    })
}

/// Extension data: one vector `i_x` in `W` coordinates per branch point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionData {
    pub points: Vec<Scalar>,
    pub vectors: Vec<Vec<Scalar>>,
}

impl ExtensionData {
    pub fn negate(&self) -> Self {
        ExtensionData {
            points: self.points.clone(),
            vectors: self.vectors.iter().map(|v| v.iter().map(|c| -c).collect()).collect(),
        }
    }

    /// `i_x = tau_x j_x` on the companion model.
    pub fn from_tau(sc: &SpectralCoeffs, tau: &[i8]) -> Result<Self> {
        let d = sc.branch_points()?;
        if tau.len() != d.len() {
            return Err(Error::Schema(format!("{} tau values for {} branch points", tau.len(), d.len())));
        }
        let f = sc.field();
        let mut vectors = vec![];
        for (x, &t) in d.iter().zip(tau) {
            if t != 1 && t != -1 {
                return Err(Error::Schema("tau values must be +1 or -1".into()));
            }
            let s = f.from_i64(t as i64);
            vectors.push(companion_kernel_vector(sc, x).iter().map(|c| c * &s).collect());
        }
        Ok(ExtensionData { points: d, vectors })
    }

    pub fn to_json(&self) -> ExtensionDataJson {
        ExtensionDataJson {
            d: Some(self.points.iter().map(Scalar::to_string).collect()),
            i: Some(
                self.vectors
                    .iter()
                    .map(|v| v.iter().map(Scalar::to_string).collect())
                    .collect(),
            ),
            tau: None,
        }
    }

    pub fn from_json(sc: &SpectralCoeffs, j: &ExtensionDataJson) -> Result<Self> {
        let f = sc.field();
        match (&j.d, &j.i, &j.tau) {
            (_, None, Some(t)) => Self::from_tau(sc, t),
            (Some(d), Some(i), None) => {
                if d.len() != i.len() {
                    return Err(Error::Schema("D and i have different lengths".into()));
                }
                let points = d.iter().map(|s| f.parse(s)).collect::<Result<Vec<_>>>()?;
                let vectors = i
                    .iter()
                    .map(|v| v.iter().map(|s| f.parse(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(ExtensionData { points, vectors })
            }
            _ => Err(Error::Schema("extension needs either {D, i} or {tau}".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDataJson {
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<i8>>,
}

/// `j_x = (a_{p-1}(x), ..., a_1(x), 1)`.
pub fn companion_kernel_vector(sc: &SpectralCoeffs, x: &Scalar) -> Vec<Scalar> {
    let p = sc.p();
    (1..=p).map(|k| sc.a(p - k).eval(x)).collect()
}

/// Generator of the null line of `Q_0(x)`, scaled so that
/// `n^T Q_0'(x) n / a_p'(x) = 1`.
pub fn normalized_null_vector(v0: &QuadraticBundle, sc: &SpectralCoeffs, x: &Scalar) -> Result<Vec<Scalar>> {
    let null = v0.q0.eval(x).nullspace();
    if null.cols() != 1 {
        return Err(Error::DeterminantMismatch(format!(
            "Q_0({x}) has corank {}, expected 1",
            null.cols()
        )));
    }
    let n = null.col(0);
    let dq = v0.q0.derivative().eval(x);
    let nm = ScalarMat::column(sc.field(), n.clone());
    let val = (&(&nm.transpose() * &dq) * &nm)[(0, 0)].clone();
    let dap = sc.ap().derivative().eval(x);
    let c = &val * &dap.inv().ok_or_else(|| Error::NotRegular("a_p has a double root".into()))?;
    let c_inv = c
        .inv()
        .ok_or_else(|| Error::DeterminantMismatch(format!("det Q_0 vanishes to higher order at {x}")))?;
    let s = c_inv
        .canonical_sqrt()
        .ok_or_else(|| Error::NotSplitScalar(c_inv.to_string()))?;
    Ok(n.iter().map(|e| e * &s).collect())
}

fn quad(m: &ScalarMat, u: &[Scalar], v: &[Scalar]) -> Scalar {
    let f = m.field();
    let mut acc = f.zero();
    for i in 0..u.len() {
        for j in 0..v.len() {
            acc = acc + &(&u[i] * &m[(i, j)]) * &v[j];
        }
    }
    acc
}

fn mat_vec(m: &ScalarMat, v: &[Scalar]) -> Vec<Scalar> {
    (0..m.rows())
        .map(|i| (0..m.cols()).fold(m.field().zero(), |acc, j| acc + &m[(i, j)] * &v[j]))
        .collect()
}

fn vec_string(v: &[Scalar]) -> String {
    format!("({})", v.iter().map(Scalar::to_string).collect::<Vec<_>>().join(", "))
}

fn check_points(ext: &ExtensionData, sc: &SpectralCoeffs, p: usize) -> Result<()> {
    let d = sc.branch_points()?;
    let mut given = ext.points.clone();
    given.sort_by_key(Scalar::order_key);
    if given != d {
        return Err(Error::Schema(format!(
            "extension points {} differ from the zeros of a_p {}",
            vec_string(&ext.points),
            vec_string(&d)
        )));
    }
    if ext.vectors.len() != ext.points.len() || ext.vectors.iter().any(|v| v.len() != p) {
        return Err(Error::ShapeMismatch(format!("each i_x must have {p} entries")));
    }
    Ok(())
}

/// Kernel condition `beta_F(x) i_x = 0` and isometry condition
/// `Q_W(i_x, i_x) = a_{p-1}(x)` at every branch point, with the identity
/// `Q_W(beta_F'(x) i_x, i_x) = -a_p'(x)` as a cross-check.
pub fn compatibility_check(
    ext: &ExtensionData,
    ct: &CayleyTriple,
    v0: &QuadraticBundle,
    sc: &SpectralCoeffs,
) -> Result<Verdicts> {
    sc.require_regular()?;
    check_points(ext, sc, ct.p())?;
    let mut v = Verdicts::new();
    for (x, i) in ext.points.iter().zip(&ext.vectors) {
        let image = mat_vec(&ct.beta_f.eval(x), i);
        if image.iter().any(|c| !c.is_zero()) {
            return Err(Error::KernelViolation {
                x: x.to_string(),
                image: vec_string(&image),
            });
        }
        v.pass(format!("kernel[{x}]"));
        let qw = ct.qw.eval(x);
        let lhs = quad(&qw, i, i);
        let rhs = sc.a(sc.p() - 1).eval(x);
        if lhs != rhs {
            return Err(Error::IsometryViolation {
                x: x.to_string(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
        v.pass(format!("isometry[{x}]"));
        let cross = quad(&(&qw * &ct.beta_f.derivative().eval(x)), i, i);
        let expect = -sc.ap().derivative().eval(x);
        v.check(format!("derivative_identity[{x}]"), cross == expect, || {
            format!("Q_W(beta_F' i, i) = {cross}, -a_p' = {expect}")
        });
        normalized_null_vector(v0, sc, x)?;
    }
    Ok(v)
}

/// Output of the extension without holomorphy guarantees: entries are
/// rational functions, polynomial exactly when the data is compatible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcedExtension {
    pub basis: ModuleBasis,
    pub qv: RatMat,
    pub beta: RatMat,
    pub gamma: RatMat,
}

impl ForcedExtension {
    pub fn is_polynomial(&self) -> bool {
        self.qv.to_polymat().is_some() && self.beta.to_polymat().is_some() && self.gamma.to_polymat().is_some()
    }

    pub fn det_qv(&self) -> RatFunc {
        self.qv.det().unwrap()
    }

    /// Polynomial with constant nonzero determinant.
    pub fn qv_unimodular(&self) -> bool {
        self.qv.to_polymat().is_some_and(|m| m.is_unimodular())
    }
}

/// Builds the module generated by `V'` and the sections
/// `(-i_x, n_x)/(z - x)` without checking compatibility.
pub fn force_extension(
    ct: &CayleyTriple,
    v0: &QuadraticBundle,
    ext: &ExtensionData,
    sc: &SpectralCoeffs,
) -> Result<ForcedExtension> {
    let f = sc.field();
    let (p, q) = (ct.p(), v0.q());
    check_points(ext, sc, p)?;
    let n = p + q;
    let mut gens: Vec<Vec<RatFunc>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|r| if r == k { RatFunc::one(f) } else { RatFunc::zero(f) })
                .collect()
        })
        .collect();
    for (x, i) in ext.points.iter().zip(&ext.vectors) {
        let nx = normalized_null_vector(v0, sc, x)?;
        let den = Poly::linear(x);
        let g = i
            .iter()
            .map(|c| -c)
            .chain(nx)
            .map(|c| RatFunc::new(Poly::constant(c), den.clone()))
            .collect();
        gens.push(g);
    }
    let basis = smith_hermite_basis(f, n, &gens)?;
    let b = basis.matrix();
    let qprime = (&ct.qw * &ct.beta_f).block_diag(&v0.q0).to_ratmat();
    let qv = &(&b.transpose() * &qprime) * &b;
    let b_inv = b
        .inverse()
        .ok_or_else(|| Error::InternalHolomorphyFailure("module basis is singular".into()))?;
    let incl = PolyMat::identity(f, p).vstack(&PolyMat::zeros(f, q, p)).to_ratmat();
    let beta = &b_inv * &incl;
    let proj = ct.beta_f.hstack(&PolyMat::zeros(f, p, q)).to_ratmat();
    let gamma = &proj * &b;
    Ok(ForcedExtension {
        basis,
        qv,
        beta,
        gamma,
    })
}

/// A reconstructed chart with the module basis it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub chart: OrthHiggsChart,
    pub basis: ModuleBasis,
    pub verdicts: Verdicts,
}

/// `V` from `(W, Q_W, beta_F)`, `(V_0, Q_0)` and compatible `{i_x}`.
///
/// Weights: the `W K^{-1}` summands carry `w - 1`; the modification along
/// `D ~ K^{2p}` adds `2p` to the determinant, booked on the last `V_0` entry.
pub fn build_extension(
    ct: &CayleyTriple,
    v0: &QuadraticBundle,
    ext: &ExtensionData,
    sc: &SpectralCoeffs,
) -> Result<Extension> {
    let mut verdicts = Verdicts::new();
    verdicts.extend_prefixed("compatibility", compatibility_check(ext, ct, v0, sc)?);
    let forced = force_extension(ct, v0, ext, sc)?;
    let poles = forced.qv.poles();
    let (Some(qv), Some(beta), Some(gamma)) = (
        forced.qv.to_polymat(),
        forced.beta.to_polymat(),
        forced.gamma.to_polymat(),
    ) else {
        return Err(Error::InternalHolomorphyFailure(format!(
            "non-polynomial output, Q_V poles at {poles:?}"
        )));
    };
    let one = Weight::from_integer(1);
    let mut v_weights: Vec<Weight> = ct.w_weights.iter().map(|w| w - one).collect();
    let mut v0w = v0.weights.clone();
    *v0w.last_mut().unwrap() += Weight::from_integer(2 * ct.p() as i64);
    v_weights.extend(v0w);
    let mut chart = assemble_orth(v_weights, ct.w_weights.clone(), qv, ct.qw.clone(), beta)
        .map_err(|e| Error::InternalHolomorphyFailure(e.to_string()))?;
    if chart.gamma != gamma {
        return Err(Error::InternalHolomorphyFailure(
            "gamma from the module basis differs from the orthogonal transpose of beta".into(),
        ));
    }
    chart.gamma = gamma;
    let v = verify_so(&chart, &sc.with_q(v0.q()));
    if !v.all_passed() {
        return Err(Error::InternalHolomorphyFailure(format!(
            "verification failed: {:?}",
            v.failures()
        )));
    }
    verdicts.extend_prefixed("so", v);
    Ok(Extension {
        chart,
        basis: forced.basis,
        verdicts,
    })
}

/// Canonical serialization of the generated lattice; the smaller of the keys
/// for `i` and `-i`, so both members of a sign class agree.
pub fn canonical_key(
    ct: &CayleyTriple,
    v0: &QuadraticBundle,
    ext: &ExtensionData,
    sc: &SpectralCoeffs,
) -> Result<String> {
    let key = |e: &ExtensionData| -> Result<String> {
        let b = force_extension(ct, v0, e, sc)?.basis;
        Ok(serde_json::to_string(&(b.denominator.to_strings(), b.numerators.to_strings())).unwrap())
    };
    let (a, b) = (key(ext)?, key(&ext.negate())?);
    Ok(a.min(b))
}

/// Admissible `i_x` spanning `ker beta_F(x)` with `Q_W(i, i) = a_{p-1}(x)`,
/// one per branch point, with a deterministic sign.
pub fn admissible_vectors(ct: &CayleyTriple, sc: &SpectralCoeffs) -> Result<ExtensionData> {
    let d = sc.branch_points()?;
    let mut vectors = vec![];
    for x in &d {
        let ker = ct.beta_f.eval(x).nullspace();
        if ker.cols() != 1 {
            return Err(Error::NotRegular(format!("ker beta_F({x}) has dimension {}", ker.cols())));
        }
        let k = ker.col(0);
        let c = quad(&ct.qw.eval(x), &k, &k);
        let target = sc.a(sc.p() - 1).eval(x);
        let ratio = &target * &c.inv().ok_or_else(|| Error::NotRegular(format!("Q_W degenerate on ker beta_F({x})")))?;
        let s = ratio
            .canonical_sqrt()
            .ok_or_else(|| Error::NotSplitScalar(ratio.to_string()))?;
        vectors.push(k.iter().map(|e| e * &s).collect());
    }
    Ok(ExtensionData { points: d, vectors })
}

/// One reconstruction in a sweep over sign vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepEntry {
    pub signs: Vec<i8>,
    pub canonical_key: String,
    pub char_poly: Vec<Vec<String>>,
    pub smith_qv: Vec<Vec<String>>,
    pub smith_gamma: Vec<Vec<String>>,
    pub verified: bool,
}

/// Reconstructs for every sign vector applied to a base admissible choice.
pub fn torsor_sweep(
    ct: &CayleyTriple,
    v0: &QuadraticBundle,
    sc: &SpectralCoeffs,
    parallel: bool,
) -> Result<Vec<SweepEntry>> {
    let base = admissible_vectors(ct, sc)?;
    let k = base.points.len();
    if k > 16 {
        return Err(Error::Unsupported(format!("sweep over 2^{k} sign vectors")));
    }
    let run = |mask: u32| -> Result<SweepEntry> {
        let signs: Vec<i8> = (0..k).map(|b| if mask & (1 << b) == 0 { 1 } else { -1 }).collect();
        let ext = ExtensionData {
            points: base.points.clone(),
            vectors: base
                .vectors
                .iter()
                .zip(&signs)
                .map(|(v, &s)| v.iter().map(|c| if s < 0 { -c } else { c.clone() }).collect())
                .collect(),
        };
        let e = build_extension(ct, v0, &ext, sc)?;
        let cp = e.chart.phi().char_poly()?;
        Ok(SweepEntry {
            signs,
            canonical_key: canonical_key(ct, v0, &ext, sc)?,
            char_poly: cp.to_strings(),
            smith_qv: smith_invariants(&e.chart.qv).iter().map(Poly::to_strings).collect(),
            smith_gamma: smith_invariants(&e.chart.gamma).iter().map(Poly::to_strings).collect(),
            verified: e.verdicts.all_passed(),
        })
    };
    let masks: Vec<u32> = (0..(1u32 << k)).collect();
    let results: Vec<Result<SweepEntry>> = if parallel {
        use rayon::prelude::*;
        masks.par_iter().map(|&m| run(m)).collect()
    } else {
        masks.iter().map(|&m| run(m)).collect()
    };
    results.into_iter().collect()
}

/// `tau_x` with `i_x = tau_x j_x` on the companion model.
pub fn tau_conversion(ext: &ExtensionData, ct: &CayleyTriple, sc: &SpectralCoeffs) -> Result<Vec<i8>> {
    if *ct != crate::higgs::pushforward_trivial(sc) {
        return Err(Error::ModelUnsupported(
            "tau conversion needs the companion model of the trivial line bundle".into(),
        ));
    }
    check_points(ext, sc, ct.p())?;
    let f = sc.field();
    let mut out = vec![];
    for (x, i) in ext.points.iter().zip(&ext.vectors) {
        let j = companion_kernel_vector(sc, x);
        // j has last entry 1, so the candidate scalar is the last entry of i
        let t = i.last().unwrap().clone();
        let scaled: Vec<Scalar> = j.iter().map(|c| c * &t).collect();
        if &scaled != i {
            let image = mat_vec(&ct.beta_f.eval(x), i);
            return Err(Error::KernelViolation {
                x: x.to_string(),
                image: vec_string(&image),
            });
        }
        if t == f.one() {
            out.push(1);
        } else if t == f.from_i64(-1) {
            out.push(-1);
        } else {
            let lhs = quad(&ct.qw.eval(x), i, i);
            return Err(Error::IsometryViolation {
                x: x.to_string(),
                lhs: lhs.to_string(),
                rhs: sc.a(sc.p() - 1).eval(x).to_string(),
            });
        }
    }
    Ok(out)
}

/// Representative of `{tau, -tau}` with first entry `+1`.
pub fn canonical_tau(tau: &[i8]) -> Vec<i8> {
    match tau.first() {
        Some(&-1) => tau.iter().map(|t| -t).collect(),
        _ => tau.to_vec(),
    }
}

/// `dim so(q) (g - 1) + (q - 1) deg L`.
pub fn stack_dimension(q: i64, g: i64, deg_l: i64) -> i64 {
    q * (q - 1) / 2 * (g - 1) + (q - 1) * deg_l
}

/// The weight of `B = K^{-p}(D_+)` in `K` units given `|D_+|` of `|D|`.
pub fn b_weight(p: usize, b_plus: usize, d: usize) -> Weight {
    Rational64::new(-(p as i64), 1) + Rational64::new(2 * p as i64 * b_plus as i64, d as i64)
}
