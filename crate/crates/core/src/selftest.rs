//! Golden corpus and reduced-size property suites, run as one deterministic
//! report. Every random section draws from its own seeded stream, so the
//! report is identical with or without parallel execution.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::census::{census_grid, fiber_order, gothen_counts, torsor_order, CensusParams, CensusRanges};
use crate::charclass::{arf_invariant, bits_of, omega2_v, zero_count, NormMap, QuadraticRefinement};
use crate::error::Result;
use crate::exact::{Field, Poly, PolyMat, RatFunc, ScalarMat};
use crate::higgs::pushforward_trivial;
use crate::langlands::{
    admissible_vectors, build_extension, equivariant_lift, force_extension, invariant_direct_image,
    local_model_check, quadratic_certificate, stack_dimension, torsor_sweep, EquivariantBundle,
    ExtensionData, QuadraticBundle,
};
use crate::random::{distinct_points, random_regular, random_signs, rng_from_seed, InstanceShape};
use crate::report::Verdicts;
use crate::spectral::{cover_genera, SpectralCoeffs};
use crate::split::{b_invariant, build_split, SplitSpec};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub version: String,
    pub sections: BTreeMap<String, Verdicts>,
    pub passed: bool,
}

type Section = (&'static str, fn(u64) -> Verdicts);

const SECTIONS: [Section; 8] = [
    ("golden", golden),
    ("split_end_to_end", split_end_to_end),
    ("homogeneous_oracles", homogeneous_oracles),
    ("compatibility_necessity", compatibility_necessity),
    ("torsor", torsor),
    ("counts", counts),
    ("equivariant_round_trip", equivariant_round_trip),
    ("gf2", gf2),
];

pub fn run_selftest(seed: u64, parallel: bool) -> SelftestReport {
    let run = |(k, (name, f)): (usize, &Section)| (name.to_string(), f(seed.wrapping_add(k as u64 * 0x9e37_79b9)));
    let sections: BTreeMap<String, Verdicts> = if parallel {
        use rayon::prelude::*;
        SECTIONS.par_iter().enumerate().map(run).collect()
    } else {
        SECTIONS.iter().enumerate().map(run).collect()
    };
    let passed = sections.values().all(Verdicts::all_passed);
    SelftestReport {
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        sections,
        passed,
    }
}

fn record<T>(v: &mut Verdicts, name: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(t) => Some(t),
        Err(e) => {
            v.fail(name, e.to_string());
            None
        }
    }
}

fn fp() -> Field {
    Field::default()
}

fn golden(_seed: u64) -> Verdicts {
    let f = fp();
    let mut v = Verdicts::new();
    let sc = SpectralCoeffs::new(f, 1, 1, 2, vec![Poly::z(f)]).unwrap();
    let ct = pushforward_trivial(&sc);
    let v0 = QuadraticBundle::standard(&sc);
    let ext = ExtensionData {
        points: vec![f.zero()],
        vectors: vec![vec![f.from_i64(-1)]],
    };
    if let Some(e) = record(&mut v, "reconstruction", build_extension(&ct, &v0, &ext, &sc)) {
        let qv = PolyMat::from_int_rows(f, &[&[&[], &[1]], &[&[1], &[0, 1]]]);
        let beta = PolyMat::from_int_rows(f, &[&[&[0, 1]], &[&[-1]]]);
        let gamma = PolyMat::from_int_rows(f, &[&[&[-1], &[]]]);
        v.check("reconstruction.Q_V", e.chart.qv == qv, || e.chart.qv.to_string());
        v.check("reconstruction.beta", e.chart.beta == beta, || e.chart.beta.to_string());
        v.check("reconstruction.gamma", e.chart.gamma == gamma, || e.chart.gamma.to_string());
        let cp = e.chart.phi().char_poly().unwrap();
        v.check("reconstruction.char_poly", cp == sc.char_poly_model(), || cp.display("eta"));
    }
    let scaled = ExtensionData {
        points: vec![f.zero()],
        vectors: vec![vec![f.from_i64(2)]],
    };
    v.check(
        "scaled_extension_rejected",
        matches!(build_extension(&ct, &v0, &scaled, &sc), Err(Error::IsometryViolation { .. })),
        || "no IsometryViolation".into(),
    );
    if let Some(s) = record(&mut v, "split", SplitSpec::all_plus(sc.clone()).and_then(|s| build_split(&s))) {
        v.check("split.all_checks", s.verdicts.all_passed(), || format!("{:?}", s.verdicts.failures()));
    }
    let roots = [0, 1, 2, 3].map(|k| f.from_i64(k));
    let sc4 = SpectralCoeffs::new(f, 1, 1, 2, vec![Poly::from_roots(f, &roots)]).unwrap();
    for (signs, b) in [(vec![1, 1, 1, -1], 1), (vec![1; 4], 2), (vec![1, -1, 1, -1], 0)] {
        let got = SplitSpec::new(sc4.clone(), signs.clone()).and_then(|s| b_invariant(&s, true));
        v.check(format!("b_invariant{signs:?}"), got == Ok(num_rational::Rational64::from_integer(b)), || {
            format!("{got:?}")
        });
    }
    let f7 = fp();
    let h = ScalarMat::from_fn(f7, 2, 2, |i, j| if i != j { f7.one() } else { f7.zero() });
    let m = EquivariantBundle::new(vec![0, 0], h.clone(), h, 1).unwrap();
    let sc2 = sc.with_q(2);
    if let Some((q0, lv)) = record(&mut v, "direct_image", invariant_direct_image(&m, &sc2)) {
        let expect = PolyMat::from_int_rows(f7, &[&[&[2], &[]], &[&[], &[0, -2]]]);
        v.check("direct_image.swap", q0.q0 == expect && lv.all_passed(), || q0.q0.to_string());
    }
    v
}

fn split_end_to_end(seed: u64) -> Verdicts {
    let mut rng = rng_from_seed(seed);
    let mut v = Verdicts::new();
    for p in 1..=2 {
        for k in 0..3 {
            let shape = InstanceShape {
                p,
                q: 1,
                g: 2,
                max_ap_degree: 5,
                max_coeff_degree: 3,
            };
            let name = format!("p{p}.{k}");
            let Some(sc) = record(&mut v, &name, random_regular(fp(), shape, &mut rng)) else {
                continue;
            };
            let n = sc.branch_points().unwrap().len();
            let signs = random_signs(n, &mut rng);
            if let Some(out) = record(&mut v, &name, SplitSpec::new(sc, signs).and_then(|s| build_split(&s))) {
                v.check(name, out.verdicts.all_passed(), || format!("{:?}", out.verdicts.failures()));
            }
        }
    }
    v
}

/// `h_j` as the sum of all degree `j` monomials in the roots.
pub fn homogeneous_from_roots(roots: &[Poly], j: usize) -> Poly {
    fn rec(roots: &[Poly], j: usize, start: usize, acc: Poly, out: &mut Poly) {
        if j == 0 {
            *out = &*out + &acc;
            return;
        }
        for k in start..roots.len() {
            rec(roots, j - 1, k, &acc * &roots[k], out);
        }
    }
    let f = roots[0].field();
    let mut out = Poly::zero(f);
    rec(roots, j, 0, Poly::one(f), &mut out);
    out
}

/// `sum_k r_k^m / prod_{l != k} (r_k - r_l)`.
pub fn trace_form_from_roots(roots: &[Poly], m: usize) -> RatFunc {
    let f = roots[0].field();
    let mut acc = RatFunc::zero(f);
    for (k, r) in roots.iter().enumerate() {
        let mut den = Poly::one(f);
        for (l, s) in roots.iter().enumerate() {
            if l != k {
                den = &den * &(r - s);
            }
        }
        acc = &acc + &RatFunc::new(r.pow(m as u32), den);
    }
    acc
}

/// Coefficients of `prod (xi - r_k)` as `a_1, ..., a_p`.
pub fn coeffs_from_roots(roots: &[Poly]) -> Vec<Poly> {
    let f = roots[0].field();
    let mut c = vec![Poly::one(f)];
    for r in roots {
        let mut next = vec![Poly::zero(f); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k] = &next[k] + ck;
            next[k + 1] = &next[k + 1] - &(ck * r);
        }
        c = next;
    }
    c.split_off(1)
}

fn homogeneous_oracles(seed: u64) -> Verdicts {
    let mut rng = rng_from_seed(seed);
    let f = fp();
    let mut v = Verdicts::new();
    for p in 1..=3 {
        let roots: Vec<Poly> = (0..p)
            .map(|k| Poly::from_coeffs(f, vec![f.from_i64(k as i64 * 7 + 1), f.random(&mut rng)]))
            .collect();
        let a = coeffs_from_roots(&roots);
        let Some(sc) = record(&mut v, "instance", SpectralCoeffs::new(f, p, 1, 2, a)) else {
            continue;
        };
        let h = sc.complete_homogeneous(2 * p);
        let ok = (0..=2 * p).all(|j| h[j] == homogeneous_from_roots(&roots, j));
        v.check(format!("complete_homogeneous.p{p}"), ok, || "recurrence differs from root sums".into());
        let qw = pushforward_trivial(&sc).qw;
        let ok = (0..p).all(|i| (0..p).all(|j| RatFunc::from_poly(qw[(i, j)].clone()) == trace_form_from_roots(&roots, i + j)));
        v.check(format!("relative_duality.p{p}"), ok, || qw.to_string());
    }
    v
}

fn compatibility_necessity(seed: u64) -> Verdicts {
    let mut rng = rng_from_seed(seed);
    let f = fp();
    let mut v = Verdicts::new();
    for k in 0..3 {
        let p = 1 + k % 2;
        let shape = InstanceShape {
            p,
            q: 1,
            g: 2,
            max_ap_degree: 4,
            max_coeff_degree: 2,
        };
        let name = format!("instance{k}");
        let Some(sc) = record(&mut v, &name, random_regular(f, shape, &mut rng)) else {
            continue;
        };
        let ct = pushforward_trivial(&sc);
        let v0 = QuadraticBundle::standard(&sc);
        let Some(base) = record(&mut v, &name, admissible_vectors(&ct, &sc)) else {
            continue;
        };
        let c = loop {
            let c = f.random_nonzero(&mut rng);
            if !(&c * &c).is_one() {
                break c;
            }
        };
        let mut bad = base.clone();
        bad.vectors[0] = bad.vectors[0].iter().map(|e| e * &c).collect();
        let rejected = matches!(build_extension(&ct, &v0, &bad, &sc), Err(Error::IsometryViolation { .. }));
        v.check(format!("{name}.rejected"), rejected, || "scaled data accepted".into());
        let forced = force_extension(&ct, &v0, &bad, &sc).map(|e| e.qv_unimodular());
        v.check(format!("{name}.forced_non_unimodular"), forced == Ok(false), || format!("{forced:?}"));
        let ok = build_extension(&ct, &v0, &base, &sc).is_ok();
        v.check(format!("{name}.admissible_accepted"), ok, || "admissible data rejected".into());
    }
    v
}

fn torsor(seed: u64) -> Verdicts {
    let mut rng = rng_from_seed(seed);
    let f = fp();
    let mut v = Verdicts::new();
    let roots = distinct_points(f, 3, &mut rng);
    let sc = SpectralCoeffs::new(f, 1, 1, 2, vec![Poly::from_roots(f, &roots)]).unwrap();
    let ct = pushforward_trivial(&sc);
    let v0 = QuadraticBundle::standard(&sc);
    if let Some(entries) = record(&mut v, "sweep", torsor_sweep(&ct, &v0, &sc, false)) {
        let keys: std::collections::BTreeSet<_> = entries.iter().map(|e| &e.canonical_key).collect();
        v.check("distinct_classes", keys.len() == 4, || format!("{} classes", keys.len()));
        let same = entries.windows(2).all(|w| {
            w[0].char_poly == w[1].char_poly && w[0].smith_qv == w[1].smith_qv && w[0].smith_gamma == w[1].smith_gamma
        });
        v.check("invariants_agree", same, || "char poly or Smith data differ".into());
        v.check("all_verified", entries.iter().all(|e| e.verified), || "a build failed verification".into());
    }
    v
}

fn counts(_seed: u64) -> Verdicts {
    let mut v = Verdicts::new();
    let c = cover_genera(2, 2);
    v.check("genera", (c.g_s, c.g_sbar) == (17, 7), || format!("{c:?}"));
    let fo = fiber_order(&CensusParams {
        p: 1,
        q: 2,
        g: 2,
        deg_l: None,
    });
    v.check("fiber_order", fo.as_ref().map(|x| x.order.to_string()) == Ok("128".into()), || format!("{fo:?}"));
    v.check("torsor_order", torsor_order(1, 2).order.to_string() == "8", || "torsor".into());
    v.check("stack_dimension", stack_dimension(2, 2, 2) == 3, || "stack".into());
    let gc = gothen_counts(2);
    v.check(
        "gothen",
        [&gc.total, &gc.hitchin, &gc.extra, &gc.remaining].map(|n| n.to_string()) == ["48", "16", "2", "30"],
        || format!("{gc:?}"),
    );
    let ident = (1..=20).all(|p| (2..=20).all(|g| torsor_order(p, g).exponent_identity));
    v.check("exponent_identity", ident, || "identity fails".into());
    let grid = census_grid(
        &CensusRanges {
            p: [1, 2],
            q: [1, 2],
            g: [2, 3],
            deg_l: None,
        },
        false,
    );
    v.check("census_grid", grid.as_ref().is_ok_and(|r| r.len() == 8 && r.iter().all(|x| x.consistent)), || {
        format!("{grid:?}")
    });
    v
}

/// Random `q x q` model: `Q_M = P^T diag(d) P`, `sigma = P^{-1} diag(1,..,1,-1) P`.
pub fn random_equivariant<R: Rng + ?Sized>(field: Field, q: usize, rng: &mut R) -> EquivariantBundle {
    loop {
        let p = ScalarMat::from_fn(field, q, q, |_, _| field.random(rng));
        let Some(pinv) = p.inverse() else { continue };
        let d = ScalarMat::from_fn(field, q, q, |i, j| if i == j { field.random_nonzero(rng) } else { field.zero() });
        let s = ScalarMat::from_fn(field, q, q, |i, j| match (i == j, i + 1 == q) {
            (true, true) => field.from_i64(-1),
            (true, false) => field.one(),
            _ => field.zero(),
        });
        let q_m = &(&p.transpose() * &d) * &p;
        let sigma = &(&pinv * &s) * &p;
        let degrees = (0..q).map(|_| rng.gen_range(-3..=3)).collect();
        return EquivariantBundle::new(degrees, q_m, sigma, 1).expect("constructed model is valid");
    }
}

/// One direct image / lift round trip; `None` when all comparisons pass.
pub fn equivariant_round_trip_once(m: &EquivariantBundle, sc: &SpectralCoeffs) -> Result<Vec<String>> {
    let mut bad = vec![];
    let (v0, local) = invariant_direct_image(m, sc)?;
    if !local.all_passed() {
        bad.push("local model of Q_0".into());
    }
    let lift = equivariant_lift(&v0, sc)?;
    if lift.bundle.certificate() != m.certificate() {
        bad.push("certificate of M".into());
    }
    let (v0b, _) = invariant_direct_image(&lift.bundle, sc)?;
    if quadratic_certificate(&v0b, sc)? != quadratic_certificate(&v0, sc)? {
        bad.push("certificate of V_0".into());
    }
    let t = PolyMat::from_scalars(&lift.frame);
    if &(&t.transpose() * &v0.q0) * &t != v0b.q0 {
        bad.push("Q_0 congruence".into());
    }
    let d = sc.branch_points()?;
    if !local_model_check(&v0b.q0, &d).all_passed() {
        bad.push("local model after round trip".into());
    }
    Ok(bad)
}

fn equivariant_round_trip(seed: u64) -> Verdicts {
    let mut rng = rng_from_seed(seed);
    let f = fp();
    let mut v = Verdicts::new();
    for k in 0..6 {
        let q = 1 + k % 3;
        let n = rng.gen_range(1..=4);
        let roots = distinct_points(f, n, &mut rng);
        let ap = Poly::from_roots(f, &roots).scale(&f.random_nonzero(&mut rng));
        let sc = SpectralCoeffs::new(f, 1, q, 2, vec![ap]).unwrap();
        let m = random_equivariant(f, q, &mut rng);
        let name = format!("q{q}.{k}");
        if let Some(bad) = record(&mut v, &name, equivariant_round_trip_once(&m, &sc)) {
            v.check(name, bad.is_empty(), || bad.join(", "));
        }
    }
    v
}

fn gf2(_seed: u64) -> Verdicts {
    let mut v = Verdicts::new();
    for g in 1..=2usize {
        let n = 2 * g;
        for diag in 0u64..1 << n {
            let q = QuadraticRefinement::from_diagonal(g, &bits_of(diag, n)).unwrap();
            let polar = (0u64..1 << n).all(|x| {
                (0u64..1 << n).all(|y| {
                    let (bx, by) = (bits_of(x, n), bits_of(y, n));
                    q.eval(&bits_of(x ^ y, n)) ^ q.eval(&bx) ^ q.eval(&by) == q.space.pairing(&bx, &by)
                })
            });
            let expect = (1i64 << (n - 1)) + if arf_invariant(&q) == 0 { 1 } else { -1 } * (1i64 << (g - 1));
            let ok = polar && zero_count(&q) as i64 == expect;
            v.check(format!("g{g}.diag{diag}"), ok, || "polarization or zero count fails".into());
        }
    }
    let (qs, qg, nm) = (QuadraticRefinement::standard(2), QuadraticRefinement::standard(1), NormMap::standard(2, 1).unwrap());
    v.check("norm_adjoint", nm.adjoint(), || "adjointness".into());
    let r = omega2_v(&[0; 4], &qs, &qg, &nm, 1, 0, 1);
    v.check("omega2_delta", r == Ok(1), || format!("{r:?}"));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_and_is_deterministic() {
        let a = run_selftest(11, false);
        for (k, s) in &a.sections {
            assert!(s.all_passed(), "{k}: {:?}", s.failures());
        }
        let b = run_selftest(11, true);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn root_oracles_small() {
        let f = fp();
        let roots = vec![Poly::z(f), Poly::from_i64(f, 1)];
        assert_eq!(coeffs_from_roots(&roots), vec![Poly::from_ints(f, &[-1, -1]), Poly::z(f)]);
        assert_eq!(homogeneous_from_roots(&roots, 2), Poly::from_ints(f, &[1, 1, 1]));
        assert!(trace_form_from_roots(&roots, 0).is_zero());
        assert_eq!(trace_form_from_roots(&roots, 1), RatFunc::one(f));
    }
}
