//! Univariate polynomials in the chart coordinate `z`, and polynomials in an
//! auxiliary variable (`eta`, `xi`, `zeta`) with coefficients in `k[z]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{Field, Scalar};
use crate::error::{Error, Result};

/// Polynomial in `z`, ascending coefficients with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn from_coeffs(field: Field, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        debug_assert!(coeffs.iter().all(|c| c.field() == field));
        Poly { field, coeffs }
    }

    pub fn from_ints(field: Field, coeffs: &[i64]) -> Self {
        Self::from_coeffs(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: Field) -> Self {
        Poly {
            field,
            coeffs: vec![],
        }
    }

    pub fn one(field: Field) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_coeffs(c.field(), vec![c])
    }

    pub fn from_i64(field: Field, c: i64) -> Self {
        Self::constant(field.from_i64(c))
    }

    /// `c * z^k`.
    pub fn monomial(c: Scalar, k: usize) -> Self {
        let field = c.field();
        let mut coeffs = vec![field.zero(); k];
        coeffs.push(c);
        Self::from_coeffs(field, coeffs)
    }

    /// The coordinate `z`.
    pub fn z(field: Field) -> Self {
        Self::monomial(field.one(), 1)
    }

    /// `z - x`.
    pub fn linear(x: &Scalar) -> Self {
        let f = x.field();
        Self::from_coeffs(f, vec![-x, f.one()])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(field: Field, roots: &[Scalar]) -> Self {
        roots
            .iter()
            .fold(Self::one(field), |acc, r| acc * Self::linear(r))
    }

    pub fn parse(field: Field, coeffs: &[String]) -> Result<Self> {
        let c = coeffs
            .iter()
            .map(|s| field.parse(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(field, c))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Zero polynomial and nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn lead(&self) -> Scalar {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| self.field.from_i64(k as i64) * c.clone())
            .collect();
        Self::from_coeffs(self.field, c)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::from_coeffs(self.field, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Monic associate; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.lead().inv() {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::ZeroPolynomial)?;
        let inv = d.lead().inv().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(self.field), self.clone()));
        }
        let mut q = vec![self.field.zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = &r[k + j] - &(&c * dc);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((
            Poly::from_coeffs(self.field, q),
            Poly::from_coeffs(self.field, r),
        ))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.div_rem(d)?.1)
    }

    /// Quotient when `d` divides `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        match self.div_rem(d) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.exact_div(self).is_some()
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).unwrap();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*other = g`, `g` the monic gcd.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lead().inv() {
            Some(inv) => (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)),
            None => (r0, s0, t0),
        }
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        (self * other).exact_div(&self.gcd(other)).unwrap().monic()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(m).unwrap();
        let mut acc = Poly::one(self.field).rem(m).unwrap();
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base).rem(m).unwrap();
            }
            base = (&base * &base).rem(m).unwrap();
            e >>= 1;
        }
        acc
    }

    /// True iff `gcd(f, f')` is constant.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.gcd(&self.derivative()).is_constant())
    }

    /// Distinct roots lying in the coefficient field, sorted by value.
    pub fn roots(&self) -> Vec<Scalar> {
        if self.is_constant() {
            return vec![];
        }
        let mut roots = match self.field {
            Field::Prime(l) => prime_field_roots(self, l),
            Field::Rational => rational_roots(self),
        };
        roots.sort_by_key(|r| r.order_key());
        roots.dedup();
        roots
    }

    /// Substitutes `z -> c z`.
    pub fn rescale_var(&self, c: &Scalar) -> Poly {
        let mut pow = self.field.one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pow);
            pow = &pow * c;
        }
        Poly::from_coeffs(self.field, out)
    }
}

fn prime_field_roots(f: &Poly, l: u64) -> Vec<Scalar> {
    let field = f.field;
    let z = Poly::z(field);
    let zl = z.pow_mod(l, f);
    let g = f.gcd(&(&zl - &z));
    let mut out = vec![];
    split_linear_product(&g, l, &mut out);
    out
}

// `g` is a product of distinct linear factors; equal-degree splitting with
// deterministic shifts `(z+a)^((l-1)/2) - 1`, a = 0, 1, 2, ...
fn split_linear_product(g: &Poly, l: u64, out: &mut Vec<Scalar>) {
    let field = g.field;
    match g.degree() {
        None | Some(0) => {}
        Some(1) => out.push(-(&g.coeff(0) * &g.lead().inv().unwrap())),
        Some(_) => {
            let mut a = 0i64;
            loop {
                let t = Poly::from_coeffs(field, vec![field.from_i64(a), field.one()]);
                let h = &t.pow_mod((l - 1) / 2, g) - &Poly::one(field);
                let d = g.gcd(&h);
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && dd < g.degree().unwrap() {
                    split_linear_product(&d, l, out);
                    split_linear_product(&g.exact_div(&d).unwrap(), l, out);
                    return;
                }
                a += 1;
            }
        }
    }
}

fn rational_roots(f: &Poly) -> Vec<Scalar> {
    let field = f.field;
    let mut ints: Vec<BigInt> = {
        let den = f.coeffs.iter().fold(BigInt::one(), |acc, c| match c {
            Scalar::Q(q) => acc.lcm(q.denom()),
            _ => unreachable!(),
        });
        f.coeffs
            .iter()
            .map(|c| match c {
                Scalar::Q(q) => (q * &num_rational::BigRational::from_integer(den.clone())).to_integer(),
                _ => unreachable!(),
            })
            .collect()
    };
    let mut out = vec![];
    if ints[0].is_zero() {
        out.push(field.zero());
        while ints[0].is_zero() {
            ints.remove(0);
        }
    }
    if ints.len() < 2 {
        return out;
    }
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let (Some(n0), Some(nn)) = (a0.to_u128(), an.to_u128()) else {
        return out;
    };
    for p in divisors(n0) {
        for q in divisors(nn) {
            if p.gcd(&q) != 1 {
                continue;
            }
            for sign in [1i64, -1] {
                let cand = field.from_bigint(&(BigInt::from(p) * sign))
                    * field.from_bigint(&BigInt::from(q)).inv().unwrap();
                if f.eval(&cand).is_zero() {
                    out.push(cand);
                }
            }
        }
    }
    out
}

fn divisors(n: u128) -> Vec<u128> {
    let mut small = vec![];
    let mut large = vec![];
    let mut d = 1u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (k, mag.as_str()) {
                (0, m) => write!(f, "{m}")?,
                (1, "1") => write!(f, "z")?,
                (1, m) => write!(f, "{m}*z")?,
                (k, "1") => write!(f, "z^{k}")?,
                (k, m) => write!(f, "{m}*z^{k}")?,
            }
        }
        Ok(())
    }
}

fn add_coeffs(field: Field, a: &[Scalar], b: &[Scalar], negate_b: bool) -> Vec<Scalar> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(|| field.zero());
            let y = b.get(k).cloned().unwrap_or_else(|| field.zero());
            if negate_b {
                x - y
            } else {
                x + y
            }
        })
        .collect()
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::from_coeffs(self.field, add_coeffs(self.field, &self.coeffs, &rhs.coeffs, false))
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::from_coeffs(self.field, add_coeffs(self.field, &self.coeffs, &rhs.coeffs, true))
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::from_coeffs(self.field, out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Polynomial in an auxiliary variable with `k[z]` coefficients, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AuxPoly {
    field: Field,
    coeffs: Vec<Poly>,
}

impl AuxPoly {
    pub fn from_coeffs(field: Field, mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        AuxPoly { field, coeffs }
    }

    pub fn zero(field: Field) -> Self {
        Self::from_coeffs(field, vec![])
    }

    pub fn one(field: Field) -> Self {
        Self::from_coeffs(field, vec![Poly::one(field)])
    }

    /// `c * t^k` for the auxiliary variable `t`.
    pub fn monomial(c: Poly, k: usize) -> Self {
        let field = c.field();
        let mut coeffs = vec![Poly::zero(field); k];
        coeffs.push(c);
        Self::from_coeffs(field, coeffs)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Poly {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.field))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> Poly {
        self.coeff(self.coeffs.len().saturating_sub(1))
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    /// Derivative in the auxiliary variable.
    pub fn derivative(&self) -> Self {
        let f = self.field;
        Self::from_coeffs(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&f.from_i64(k as i64)))
                .collect(),
        )
    }

    /// `f(t) -> f(t^2)`.
    pub fn substitute_square(&self) -> Self {
        let f = self.field;
        let mut out = vec![Poly::zero(f); 2 * self.coeffs.len()];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[2 * k] = c.clone();
        }
        Self::from_coeffs(f, out)
    }

    /// Monic square root of a monic polynomial of even degree, when it exists.
    pub fn sqrt_monic(&self) -> Option<AuxPoly> {
        let f = self.field;
        let d = self.degree()?;
        if d % 2 != 0 || !self.is_monic() {
            return None;
        }
        let m = d / 2;
        let two_inv = f.from_i64(2).inv()?;
        // root coefficients r[m] = 1, solved from the top down
        let mut r = vec![Poly::zero(f); m + 1];
        r[m] = Poly::one(f);
        for k in 1..=m {
            let mut acc = self.coeff(d - k);
            for i in (m - k + 1)..m {
                let j = d - k - i;
                if j > m || j <= m - k {
                    continue;
                }
                acc = &acc - &(&r[i] * &r[j]);
            }
            r[m - k] = acc.scale(&two_inv);
        }
        let root = AuxPoly::from_coeffs(f, r);
        if &root * &root == *self {
            Some(root)
        } else {
            None
        }
    }

    pub fn eval_aux(&self, t: &Poly) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(self.field), |acc, c| &(&acc * t) + c)
    }

    pub fn parse(field: Field, coeffs: &[Vec<String>]) -> Result<Self> {
        let c = coeffs
            .iter()
            .map(|p| Poly::parse(field, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(field, c))
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.coeffs.iter().map(Poly::to_strings).collect()
    }

    /// Human-readable form in the named variable.
    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = vec![];
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                k => format!("{var}^{k}"),
            };
            let cs = c.to_string();
            let term = if k == 0 {
                cs
            } else if c.is_one() {
                mono
            } else if c.is_unit() || !cs.contains([' ']) {
                format!("{cs}*{mono}")
            } else {
                format!("({cs})*{mono}")
            };
            terms.push(term);
        }
        terms.join(" + ")
    }
}

impl<'a> Add<&'a AuxPoly> for &'a AuxPoly {
    type Output = AuxPoly;
    fn add(self, rhs: &AuxPoly) -> AuxPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        AuxPoly::from_coeffs(
            self.field,
            (0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect(),
        )
    }
}

impl<'a> Sub<&'a AuxPoly> for &'a AuxPoly {
    type Output = AuxPoly;
    fn sub(self, rhs: &AuxPoly) -> AuxPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        AuxPoly::from_coeffs(
            self.field,
            (0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect(),
        )
    }
}

impl<'a> Mul<&'a AuxPoly> for &'a AuxPoly {
    type Output = AuxPoly;
    fn mul(self, rhs: &AuxPoly) -> AuxPoly {
        if self.is_zero() || rhs.is_zero() {
            return AuxPoly::zero(self.field);
        }
        let mut out = vec![Poly::zero(self.field); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        AuxPoly::from_coeffs(self.field, out)
    }
}

impl Neg for &AuxPoly {
    type Output = AuxPoly;
    fn neg(self) -> AuxPoly {
        AuxPoly::from_coeffs(self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(Field::default(), c)
    }

    #[test]
    fn squarefree_examples() {
        assert!(p(&[0, 1]).is_squarefree().unwrap());
        assert!(!p(&[0, 0, 1]).is_squarefree().unwrap());
        assert!(p(&[0, 1, 1]).is_squarefree().unwrap());
        assert_eq!(
            Poly::zero(Field::default()).is_squarefree(),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        assert_eq!(a.exact_div(&b).unwrap(), p(&[-1, 1]));
        assert_eq!(a.gcd(&p(&[-1, 1])), p(&[-1, 1]));
        let (g, s, t) = a.ext_gcd(&p(&[2, 1]));
        assert!(g.is_one());
        assert_eq!(&(&s * &a) + &(&t * &p(&[2, 1])), g);
        assert!(a.div_rem(&Poly::zero(Field::default())).is_err());
    }

    #[test]
    fn roots_over_prime_field() {
        let f = Field::default();
        let roots: Vec<Scalar> = [3, -7, 11, 0, 500].iter().map(|&r| f.from_i64(r)).collect();
        let g = &Poly::from_roots(f, &roots) * &p(&[1, 0, 1]);
        let found = g.roots();
        assert_eq!(found.len(), 5);
        for r in &roots {
            assert!(found.contains(r));
        }
        // z^2 + 1 has no roots mod 7
        assert!(Poly::from_ints(Field::Prime(7), &[1, 0, 1]).roots().is_empty());
    }

    #[test]
    fn roots_over_rationals() {
        let q = Field::Rational;
        let roots = vec![q.parse("1/2").unwrap(), q.from_i64(-3), q.zero()];
        let f = Poly::from_roots(q, &roots).scale(&q.from_i64(6));
        let mut expect = roots.clone();
        expect.sort_by_key(|r| r.order_key());
        assert_eq!(f.roots(), expect);
    }

    #[test]
    fn aux_sqrt() {
        let f = Field::default();
        let a = AuxPoly::from_coeffs(f, vec![p(&[0, 1]), Poly::zero(f), Poly::one(f)]);
        let sq = &a * &a;
        assert_eq!(sq.sqrt_monic().unwrap(), a);
        let not_sq = &sq + &AuxPoly::monomial(Poly::one(f), 1);
        assert!(not_sq.sqrt_monic().is_none());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1, 0, 2]).to_string(), "2*z^2 - 1");
        assert_eq!(p(&[0, 1]).to_string(), "z");
    }
}
