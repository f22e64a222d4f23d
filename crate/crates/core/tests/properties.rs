use proptest::prelude::*;

use higgslab::charclass::{arf_invariant, bits_of, zero_count, QuadraticRefinement};
use higgslab::exact::{
    coordinates, resultant, row_hermite, saturated_kernel, smith_hermite_basis, smith_invariants,
    unimodular_completion, AuxPoly, Field, Poly, PolyMat, RatFunc,
};
use higgslab::higgs::pushforward_trivial;
use higgslab::random::{distinct_points, random_poly, random_regular, random_signs, rng_from_seed, InstanceShape};
use higgslab::split::{b_invariant, build_split, monodromy_apply, sign_orbit, symmetric_generators, SplitSpec};

fn f() -> Field {
    Field::default()
}

fn poly_mat(seed: u64, rows: usize, cols: usize, deg: usize) -> PolyMat {
    let mut rng = rng_from_seed(seed);
    PolyMat::from_fn(f(), rows, cols, |_, _| random_poly(f(), deg, &mut rng))
}

fn is_unimodular(m: &PolyMat) -> bool {
    m.det().map(|d| d.is_unit()).unwrap_or(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn row_hermite_is_unimodular_transform(seed: u64, rows in 1usize..4, cols in 1usize..4, deg in 0usize..3) {
        let m = poly_mat(seed, rows, cols, deg);
        let rh = row_hermite(&m);
        prop_assert_eq!(&rh.u * &m, rh.h.clone());
        prop_assert_eq!(&rh.u * &rh.u_inv, PolyMat::identity(f(), rows));
        prop_assert!(is_unimodular(&rh.u));
        for (r, &c) in rh.pivots.iter().enumerate() {
            prop_assert!(rh.h[(r, c)].lead().is_one());
            for i in r + 1..rows {
                prop_assert!(rh.h[(i, c)].is_zero());
            }
            for i in 0..r {
                prop_assert!(rh.h[(i, c)].degree().unwrap_or(0) < rh.h[(r, c)].degree().unwrap() || rh.h[(i, c)].is_zero());
            }
        }
    }

    #[test]
    fn smith_invariants_divide_and_multiply_to_det(seed: u64, n in 1usize..4, deg in 0usize..3) {
        let m = poly_mat(seed, n, n, deg);
        let det = m.det().unwrap();
        prop_assume!(!det.is_zero());
        let inv = smith_invariants(&m);
        prop_assert_eq!(inv.len(), n);
        for w in inv.windows(2) {
            prop_assert!(w[0].divides(&w[1]));
        }
        let prod = inv.iter().fold(Poly::one(f()), |a, d| &a * d);
        prop_assert_eq!(prod, det.monic());
    }

    #[test]
    fn kernel_is_saturated_and_completes(seed: u64, rows in 1usize..3, extra in 1usize..3, deg in 0usize..3) {
        let a = poly_mat(seed, rows, rows + extra, deg);
        let k = saturated_kernel(&a);
        prop_assert!((&a * &k).is_zero());
        let (p, p_inv) = unimodular_completion(&k).unwrap();
        prop_assert_eq!(&p * &p_inv, PolyMat::identity(f(), rows + extra));
        prop_assert_eq!(p.submatrix(0..rows + extra, 0..k.cols()), k);
    }

    #[test]
    fn module_basis_spans_generators(seed: u64, n in 1usize..4, count in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let gens: Vec<Vec<RatFunc>> = (0..count)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let den = Poly::from_roots(f(), &distinct_points(f(), 1, &mut rng));
                        RatFunc::new(random_poly(f(), 2, &mut rng), den)
                    })
                    .collect()
            })
            .collect();
        let basis = smith_hermite_basis(f(), n, &gens).unwrap();
        let b = basis.matrix();
        for g in &gens {
            let c = coordinates(&b, g).unwrap();
            prop_assert!(c.iter().all(RatFunc::is_polynomial));
        }
        prop_assert!(basis.rank() <= n.min(count));
    }

    #[test]
    fn resultant_is_product_over_roots(seed: u64, m in 1usize..4, n in 0usize..4) {
        // constant coefficients: Res(prod (t - r_i), g) = prod g(r_i)
        let mut rng = rng_from_seed(seed);
        let roots = distinct_points(f(), m, &mut rng);
        let fc = Poly::from_roots(f(), &roots);
        let gc = random_poly(f(), n, &mut rng);
        prop_assume!(!gc.is_zero());
        let lift = |p: &Poly| AuxPoly::from_coeffs(f(), p.coeffs().iter().map(|c| Poly::constant(c.clone())).collect());
        let r = resultant(&lift(&fc), &lift(&gc)).unwrap();
        let expect = roots.iter().fold(f().one(), |acc, x| &acc * &gc.eval(x));
        prop_assert_eq!(r, Poly::constant(expect));
    }

    #[test]
    fn pushforward_form_is_hankel(seed: u64, p in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let shape = InstanceShape { p, q: 1, g: 2, max_ap_degree: 4, max_coeff_degree: 2 };
        let sc = random_regular(f(), shape, &mut rng).unwrap();
        let qw = pushforward_trivial(&sc).qw;
        let h = sc.complete_homogeneous(2 * p);
        for i in 0..p {
            for j in 0..p {
                prop_assert_eq!(&qw[(i, j)], &qw[(j, i)]);
                if i + j + 1 >= p {
                    prop_assert_eq!(&qw[(i, j)], &h[i + j + 1 - p]);
                } else {
                    prop_assert!(qw[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn split_build_passes_and_flip_preserves_spectrum(seed: u64, p in 1usize..3) {
        let mut rng = rng_from_seed(seed);
        let shape = InstanceShape { p, q: 1, g: 2, max_ap_degree: 4, max_coeff_degree: 2 };
        let sc = random_regular(f(), shape, &mut rng).unwrap();
        let n = sc.branch_points().unwrap().len();
        let spec = SplitSpec::new(sc.clone(), random_signs(n, &mut rng)).unwrap();
        let a = build_split(&spec).unwrap();
        prop_assert!(a.verdicts.all_passed());
        let b = build_split(&spec.flipped()).unwrap();
        prop_assert!(b.verdicts.all_passed());
        prop_assert_eq!(a.chart.phi().char_poly().unwrap(), b.chart.phi().char_poly().unwrap());
        prop_assert_eq!(b_invariant(&spec, false).unwrap(), b_invariant(&spec.flipped(), false).unwrap());
    }

    #[test]
    fn monodromy_orbit_is_a_level_set(mask in 0u32..64, n in 1usize..7) {
        let signs: Vec<i8> = (0..n).map(|k| if mask & (1 << k) != 0 { -1 } else { 1 }).collect();
        let orbit = sign_orbit(&signs, &symmetric_generators(n)).unwrap();
        let minus = signs.iter().filter(|&&s| s < 0).count();
        let level: Vec<Vec<i8>> = (0u32..1 << n)
            .map(|m| (0..n).map(|k| if m & (1 << k) != 0 { -1 } else { 1 }).collect::<Vec<i8>>())
            .filter(|s| s.iter().filter(|&&x| x < 0).count() == minus)
            .collect();
        prop_assert_eq!(orbit.len(), level.len());
        prop_assert!(level.iter().all(|s| orbit.contains(s)));
    }

    #[test]
    fn b_is_invariant_under_relabelling(seed: u64, p in 1usize..3) {
        let mut rng = rng_from_seed(seed);
        let shape = InstanceShape { p, q: 1, g: 2, max_ap_degree: 6, max_coeff_degree: 1 };
        let sc = random_regular(f(), shape, &mut rng).unwrap();
        let n = sc.branch_points().unwrap().len();
        let spec = SplitSpec::new(sc, random_signs(n, &mut rng)).unwrap();
        let perm = higgslab::random::random_permutation(n, &mut rng);
        let moved = monodromy_apply(&spec, &perm).unwrap();
        prop_assert_eq!(b_invariant(&spec, false).unwrap(), b_invariant(&moved, false).unwrap());
        prop_assert_eq!(moved.b_plus(), spec.b_plus());
    }

    #[test]
    fn quadratic_refinements_polarize(g in 1usize..5, diag: u64, x: u64, y: u64) {
        let n = 2 * g;
        let q = QuadraticRefinement::from_diagonal(g, &bits_of(diag, n)).unwrap();
        let (bx, by) = (bits_of(x, n), bits_of(y, n));
        let sum: Vec<u8> = bx.iter().zip(&by).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(q.eval(&sum) ^ q.eval(&bx) ^ q.eval(&by), q.space.pairing(&bx, &by));
        let expect = (1u64 << (n - 1)) as i64 + if arf_invariant(&q) == 0 { 1 } else { -1 } * (1i64 << (g - 1));
        prop_assert_eq!(zero_count(&q) as i64, expect);
    }
}
