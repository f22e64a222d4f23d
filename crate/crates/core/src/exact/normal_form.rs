//! Hermite and Smith forms over `k[z]`, saturated kernels, unimodular
//! completion, and free bases of finitely generated submodules of `k(z)^n`.

use super::field::Field;
use super::matrix::{PolyMat, RatMat};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Row Hermite form `H = U M` together with `U^{-1}`.
///
/// `H` is in row echelon form, pivots are monic, and entries above a pivot
/// have smaller degree than it.
#[derive(Clone, Debug)]
pub struct RowHermite {
    pub h: PolyMat,
    pub u: PolyMat,
    pub u_inv: PolyMat,
    /// Pivot column of each nonzero row, in order.
    pub pivots: Vec<usize>,
}

/// Column Hermite form `H = M V` together with `V^{-1}`; the nonzero
/// columns of `H` come first.
#[derive(Clone, Debug)]
pub struct ColHermite {
    pub h: PolyMat,
    pub v: PolyMat,
    pub v_inv: PolyMat,
    pub rank: usize,
}

struct Tracker {
    h: PolyMat,
    u: PolyMat,
    u_inv: PolyMat,
}

impl Tracker {
    // row_i -= q * row_r
    fn sub_row(&mut self, i: usize, r: usize, q: &Poly) {
        if q.is_zero() {
            return;
        }
        for m in [&mut self.h, &mut self.u] {
            for j in 0..m.cols() {
                let v = &m[(i, j)] - &(q * &m[(r, j)]);
                m[(i, j)] = v;
            }
        }
        let ui = &mut self.u_inv;
        for k in 0..ui.rows() {
            let v = &ui[(k, r)] + &(q * &ui[(k, i)]);
            ui[(k, r)] = v;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.h.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn make_monic(&mut self, r: usize, c: usize) {
        let lead = self.h[(r, c)].lead();
        if lead.is_one() {
            return;
        }
        let s = lead.inv().unwrap();
        for m in [&mut self.h, &mut self.u] {
            for j in 0..m.cols() {
                let v = m[(r, j)].scale(&s);
                m[(r, j)] = v;
            }
        }
        let ui = &mut self.u_inv;
        for k in 0..ui.rows() {
            let v = ui[(k, r)].scale(&lead);
            ui[(k, r)] = v;
        }
    }
}

pub fn row_hermite(m: &PolyMat) -> RowHermite {
    let f = m.field();
    let n = m.rows();
    let mut t = Tracker {
        h: m.clone(),
        u: PolyMat::identity(f, n),
        u_inv: PolyMat::identity(f, n),
    };
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..m.cols() {
        if r == n {
            break;
        }
        let mut found = false;
        loop {
            let best = (r..n)
                .filter(|&i| !t.h[(i, c)].is_zero())
                .min_by_key(|&i| t.h[(i, c)].degree().unwrap());
            let Some(best) = best else { break };
            found = true;
            t.swap(r, best);
            let mut clean = true;
            for i in r + 1..n {
                if t.h[(i, c)].is_zero() {
                    continue;
                }
                let (q, rem) = t.h[(i, c)].div_rem(&t.h[(r, c)]).unwrap();
                t.sub_row(i, r, &q);
                if !rem.is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        t.make_monic(r, c);
        for i in 0..r {
            let (q, _) = t.h[(i, c)].div_rem(&t.h[(r, c)]).unwrap();
            t.sub_row(i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    RowHermite {
        h: t.h,
        u: t.u,
        u_inv: t.u_inv,
        pivots,
    }
}

pub fn col_hermite(m: &PolyMat) -> ColHermite {
    let rh = row_hermite(&m.transpose());
    ColHermite {
        h: rh.h.transpose(),
        v: rh.u.transpose(),
        v_inv: rh.u_inv.transpose(),
        rank: rh.pivots.len(),
    }
}

/// Rank over `k(z)`.
pub fn rank(m: &PolyMat) -> usize {
    row_hermite(m).pivots.len()
}

/// Saturated polynomial basis (as columns) of the kernel of `a`, in
/// canonical column Hermite form.
pub fn saturated_kernel(a: &PolyMat) -> PolyMat {
    let ch = col_hermite(a);
    let n = a.cols();
    let k = ch.v.select_cols(&(ch.rank..n).collect::<Vec<_>>());
    if k.cols() == 0 {
        return k;
    }
    let canon = col_hermite(&k);
    canon.h
}

/// Unimodular `P` whose leading columns are the saturated basis `k`, with
/// its inverse.
pub fn unimodular_completion(k: &PolyMat) -> Result<(PolyMat, PolyMat)> {
    let rh = row_hermite(k);
    let f = k.field();
    let top = rh.h.submatrix(0..k.cols(), 0..k.cols());
    if rh.pivots.len() != k.cols() || top != PolyMat::identity(f, k.cols()) {
        return Err(Error::DegenerateInput(
            "basis is not saturated, no unimodular completion".into(),
        ));
    }
    Ok((rh.u_inv, rh.u))
}

/// Greatest common divisor of all maximal minors, monic.
pub fn maximal_minor_gcd(m: &PolyMat) -> Poly {
    let f = m.field();
    let (small, large, by_rows) = if m.rows() <= m.cols() {
        (m.rows(), m.cols(), true)
    } else {
        (m.cols(), m.rows(), false)
    };
    let mut g = Poly::zero(f);
    for subset in combinations(large, small) {
        let sub = if by_rows {
            m.select_cols(&subset)
        } else {
            m.select_rows(&subset)
        };
        g = g.gcd(&sub.det().unwrap());
        if g.is_one() {
            break;
        }
    }
    g
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Free basis of a submodule of `k(z)^n` with a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleBasis {
    /// Monic common denominator `d`.
    pub denominator: Poly,
    /// Polynomial numerators, one basis vector per column, in column Hermite form.
    pub numerators: PolyMat,
}

impl ModuleBasis {
    /// Basis columns `numerators / d`.
    pub fn matrix(&self) -> RatMat {
        let d = self.denominator.clone();
        self.numerators
            .map(|p| RatFunc::new(p.clone(), d.clone()))
    }

    pub fn rank(&self) -> usize {
        self.numerators.cols()
    }
}

/// Free basis of the `k[z]`-module generated by vectors of length `n`.
pub fn smith_hermite_basis(field: Field, n: usize, generators: &[Vec<RatFunc>]) -> Result<ModuleBasis> {
    if let Some(g) = generators.iter().find(|g| g.len() != n) {
        return Err(Error::NotModule(format!(
            "generator of length {} in a rank-{n} ambient space",
            g.len()
        )));
    }
    let d = generators
        .iter()
        .flatten()
        .fold(Poly::one(field), |acc, e| acc.lcm(e.den()));
    let cols: Vec<Vec<Poly>> = generators
        .iter()
        .map(|g| {
            g.iter()
                .map(|e| &e.num().clone() * &d.exact_div(e.den()).unwrap())
                .collect()
        })
        .collect();
    let num = PolyMat::from_columns(field, n, &cols);
    let ch = col_hermite(&num);
    let h = ch.h.select_cols(&(0..ch.rank).collect::<Vec<_>>());
    Ok(ModuleBasis {
        denominator: d,
        numerators: h,
    })
}

/// Solves `b x = v` over `k(z)` for `b` of full column rank.
pub fn coordinates(b: &RatMat, v: &[RatFunc]) -> Option<Vec<RatFunc>> {
    let f = b.field();
    let col = RatMat::column(f, v.to_vec());
    let aug = b.hstack(&col);
    let (r, pivots) = aug.rref();
    if pivots.len() != b.cols() || pivots.contains(&b.cols()) {
        return None;
    }
    Some((0..b.cols()).map(|i| r[(i, b.cols())].clone()).collect())
}

/// Monic invariant factors `d_1 | d_2 | ...` of the nonzero part of the
/// Smith form.
pub fn smith_invariants(m: &PolyMat) -> Vec<Poly> {
    let f = m.field();
    let mut a = m.clone();
    for _ in 0..10_000 {
        a = row_hermite(&a).h;
        a = row_hermite(&a.transpose()).h.transpose();
        if is_diagonal(&a) {
            break;
        }
    }
    assert!(is_diagonal(&a), "Smith iteration did not converge");
    let mut d: Vec<Poly> = (0..a.rows().min(a.cols()))
        .map(|i| a[(i, i)].clone())
        .filter(|p| !p.is_zero())
        .collect();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if !d[i].divides(&d[j]) {
                let g = d[i].gcd(&d[j]);
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d.into_iter()
        .map(|p| if p.is_zero() { Poly::zero(f) } else { p.monic() })
        .collect()
}

fn is_diagonal(a: &PolyMat) -> bool {
    (0..a.rows()).all(|i| (0..a.cols()).all(|j| i == j || a[(i, j)].is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Scalar;

    fn f() -> Field {
        Field::default()
    }

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(f(), c)
    }

    fn r(num: &[i64], den: &[i64]) -> RatFunc {
        RatFunc::new(p(num), p(den))
    }

    #[test]
    fn row_hermite_transforms() {
        let m = PolyMat::from_int_rows(f(), &[&[&[0, 1], &[1, 1]], &[&[0, 0, 1], &[3]], &[&[2], &[0, 1]]]);
        let rh = row_hermite(&m);
        assert_eq!(&rh.u * &m, rh.h);
        assert_eq!(&rh.u * &rh.u_inv, PolyMat::identity(f(), 3));
        assert!(rh.u.is_unimodular());
        for (row, &c) in rh.pivots.iter().enumerate() {
            assert!(rh.h[(row, c)].lead().is_one());
        }
    }

    #[test]
    fn kernel_examples() {
        let a = PolyMat::from_int_rows(f(), &[&[&[0, 1], &[0, -1]]]);
        assert_eq!(saturated_kernel(&a), PolyMat::from_int_rows(f(), &[&[&[1]], &[&[1]]]));
        let a = PolyMat::from_int_rows(f(), &[&[&[0, 0, 1], &[-1]]]);
        assert_eq!(saturated_kernel(&a), PolyMat::from_int_rows(f(), &[&[&[1]], &[&[0, 0, 1]]]));
        assert_eq!(saturated_kernel(&PolyMat::identity(f(), 3)).cols(), 0);
    }

    #[test]
    fn module_basis_examples() {
        let one = || r(&[1], &[1]);
        let zero = || r(&[], &[1]);
        let b = smith_hermite_basis(f(), 2, &[vec![one(), zero()], vec![zero(), one()], vec![r(&[1], &[0, 1]), r(&[1], &[0, 1])]]).unwrap();
        let m = b.matrix();
        assert_eq!(m.col(0), vec![r(&[1], &[0, 1]), r(&[1], &[0, 1])]);
        assert_eq!(m.col(1), vec![zero(), one()]);
        let b = smith_hermite_basis(f(), 2, &[vec![one(), zero()], vec![zero(), one()]]).unwrap();
        assert_eq!(b.matrix(), PolyMat::identity(f(), 2).to_ratmat());
        let b = smith_hermite_basis(f(), 2, &[vec![r(&[1], &[0, 1]), zero()]]).unwrap();
        assert_eq!(b.matrix().col(0), vec![r(&[1], &[0, 1]), zero()]);
        assert!(smith_hermite_basis(f(), 2, &[vec![one()]]).is_err());
    }

    #[test]
    fn completion_is_unimodular() {
        let k = PolyMat::from_int_rows(f(), &[&[&[1]], &[&[0, 0, 1]], &[&[4, 1]]]);
        let (pm, pinv) = unimodular_completion(&k).unwrap();
        assert_eq!(pm.select_cols(&[0]), k);
        assert_eq!(&pm * &pinv, PolyMat::identity(f(), 3));
        let bad = PolyMat::from_int_rows(f(), &[&[&[0, 1]], &[&[0, 1]]]);
        assert!(unimodular_completion(&bad).is_err());
    }

    #[test]
    fn smith_examples() {
        let m = PolyMat::from_int_rows(f(), &[&[&[0, 1], &[]], &[&[], &[1, 1]]]);
        assert_eq!(smith_invariants(&m), vec![p(&[1]), p(&[0, 1, 1])]);
        let m = PolyMat::from_int_rows(f(), &[&[&[0, 1], &[1]], &[&[], &[0, 1]]]);
        assert_eq!(smith_invariants(&m), vec![p(&[1]), p(&[0, 0, 1])]);
        let _ = Scalar::Q(num_rational::BigRational::from_integer(1.into()));
    }
}
