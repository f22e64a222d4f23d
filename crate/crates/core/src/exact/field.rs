//! Coefficient fields and their scalars.
//!
//! Two fields are supported: a prime field `F_l` for an odd prime `l`
//! (default `l = 1000003`), and the rationals. The field is runtime data,
//! carried by every scalar, so one process can mix configurations (tests do).
//! Combining scalars from different fields is a programming error and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// A coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    /// `F_l` for an odd prime `l`.
    Prime(u64),
    /// The rational numbers.
    Rational,
}

impl Default for Field {
    fn default() -> Self {
        Field::Prime(Field::DEFAULT_MODULUS)
    }
}

impl Field {
    pub const DEFAULT_MODULUS: u64 = 1_000_003;

    /// Prime field with the given modulus; rejects 2 and composites.
    pub fn prime(modulus: u64) -> Result<Self> {
        if modulus < 3 || !is_prime(modulus) {
            return Err(Error::Schema(format!(
                "field modulus {modulus} is not an odd prime"
            )));
        }
        if modulus >= 1 << 62 {
            return Err(Error::Schema(format!("field modulus {modulus} too large")));
        }
        Ok(Field::Prime(modulus))
    }

    /// 0 for the rationals.
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Prime(m) => m,
            Field::Rational => 0,
        }
    }

    /// Derivative and discriminant arguments need `char = 0` or `char > 2 * degree`.
    pub fn check_degree_bound(self, max_degree: usize) -> Result<()> {
        match self {
            Field::Rational => Ok(()),
            Field::Prime(m) if (m as u128) > 2 * (max_degree as u128) => Ok(()),
            Field::Prime(m) => Err(Error::Schema(format!(
                "characteristic {m} too small for degree {max_degree}"
            ))),
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Prime(m) => Scalar::Fp {
                value: (n as i128).rem_euclid(m as i128) as u64,
                modulus: m,
            },
            Field::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_bigint(self, n: &BigInt) -> Scalar {
        match self {
            Field::Prime(m) => {
                let r = n.mod_floor(&BigInt::from(m));
                Scalar::Fp {
                    value: r.to_u64().expect("reduced residue fits u64"),
                    modulus: m,
                }
            }
            Field::Rational => Scalar::Q(BigRational::from_integer(n.clone())),
        }
    }

    /// Parses `"n"`, `"-n"` or `"n/d"`.
    pub fn parse(self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Schema(format!("cannot parse scalar {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        let d = self.from_bigint(&den);
        let inv = d.inv().ok_or_else(bad)?;
        Ok(self.from_bigint(&num) * inv)
    }

    /// Uniform element of a prime field; small integer for the rationals.
    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> Scalar {
        match self {
            Field::Prime(m) => Scalar::Fp {
                value: rng.gen_range(0..m),
                modulus: m,
            },
            Field::Rational => self.from_i64(rng.gen_range(-9..=9)),
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(self, rng: &mut R) -> Scalar {
        loop {
            let c = self.random(rng);
            if !c.is_zero() {
                return c;
            }
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp { value: u64, modulus: u64 },
    Q(BigRational),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Fp { modulus, .. } => Field::Prime(*modulus),
            Scalar::Q(_) => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp { value, .. } => *value == 0,
            Scalar::Q(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp { value, .. } => *value == 1,
            Scalar::Q(q) => q.is_one(),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Fp { value, modulus } => Scalar::Fp {
                value: inv_mod(*value, *modulus),
                modulus: *modulus,
            },
            Scalar::Q(q) => Scalar::Q(q.recip()),
        })
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    /// Some square root, if one exists in the field.
    pub fn sqrt(&self) -> Option<Scalar> {
        match self {
            Scalar::Fp { value, modulus } => {
                tonelli_shanks(*value, *modulus).map(|r| Scalar::Fp {
                    value: r,
                    modulus: *modulus,
                })
            }
            Scalar::Q(q) => {
                if q.is_negative() {
                    return None;
                }
                let (n, d) = (q.numer(), q.denom());
                let (rn, rd) = (n.sqrt(), d.sqrt());
                if &(&rn * &rn) == n && &(&rd * &rd) == d {
                    Some(Scalar::Q(BigRational::new(rn, rd)))
                } else {
                    None
                }
            }
        }
    }

    /// The square root with the smaller symmetric representative (positive one
    /// over the rationals), so choices are deterministic.
    pub fn canonical_sqrt(&self) -> Option<Scalar> {
        let r = self.sqrt()?;
        let other = -r.clone();
        Some(if r.canonical_key() <= other.canonical_key() {
            r
        } else {
            other
        })
    }

    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }

    /// Symmetric integer representative in `(-l/2, l/2]`, prime fields only.
    pub fn symmetric(&self) -> Option<i64> {
        match self {
            Scalar::Fp { value, modulus } => {
                let v = *value as i64;
                let m = *modulus as i64;
                Some(if v > m / 2 { v - m } else { v })
            }
            Scalar::Q(q) if q.is_integer() => q.to_integer().to_i64(),
            Scalar::Q(_) => None,
        }
    }

    /// Value as a rational, using the symmetric representative on prime fields.
    /// Gives a deterministic total order for sorting roots.
    pub fn order_key(&self) -> BigRational {
        match self {
            Scalar::Fp { .. } => BigRational::from_integer(BigInt::from(self.symmetric().unwrap())),
            Scalar::Q(q) => q.clone(),
        }
    }

    /// A total order key used for canonical choices: absolute value first.
    fn canonical_key(&self) -> (BigRational, bool) {
        match self {
            Scalar::Fp { .. } => {
                let s = self.symmetric().unwrap();
                (BigRational::from_integer(BigInt::from(s.abs())), s < 0)
            }
            Scalar::Q(q) => (q.abs(), q.is_negative()),
        }
    }

    fn assert_same_field(&self, other: &Scalar) {
        assert_eq!(
            self.field(),
            other.field(),
            "arithmetic between scalars of different fields"
        );
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(m as i128));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i128) as u64
}

fn tonelli_shanks(n: u64, p: u64) -> Option<u64> {
    let n = n % p;
    if n == 0 {
        return Some(0);
    }
    if pow_mod(n, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(n, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(n, q, p);
    let mut r = pow_mod(n, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp { .. } => write!(f, "{}", self.symmetric().unwrap()),
            Scalar::Q(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.assert_same_field(rhs);
        match (self, rhs) {
            (Scalar::Fp { value: a, modulus }, Scalar::Fp { value: b, .. }) => {
                let s = a + b;
                Scalar::Fp {
                    value: if s >= *modulus { s - modulus } else { s },
                    modulus: *modulus,
                }
            }
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            _ => unreachable!(),
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.assert_same_field(rhs);
        match (self, rhs) {
            (Scalar::Fp { value: a, modulus }, Scalar::Fp { value: b, .. }) => Scalar::Fp {
                value: mul_mod(*a, *b, *modulus),
                modulus: *modulus,
            },
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            _ => unreachable!(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Fp { value, modulus } => Scalar::Fp {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
            Scalar::Q(q) => Scalar::Q(-q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = Field::Prime(7);
        let a = f.from_i64(3);
        let b = f.from_i64(5);
        assert_eq!(a.clone() + b.clone(), f.from_i64(1));
        assert_eq!(a.clone() * b.clone(), f.from_i64(1));
        assert_eq!(a.inv().unwrap(), b);
        assert_eq!(f.from_i64(-1).to_string(), "-1");
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(Field::prime(2).is_err());
        assert!(Field::prime(15).is_err());
        assert!(Field::prime(1_000_003).is_ok());
    }

    #[test]
    fn parse_fractions() {
        let f = Field::default();
        let half = f.parse("1/2").unwrap();
        assert_eq!(half.clone() + half, f.one());
        let q = Field::Rational;
        assert_eq!(q.parse("-3/6").unwrap().to_string(), "-1/2");
        assert!(q.parse("1/0").is_err());
        assert!(q.parse("x").is_err());
    }

    #[test]
    fn square_roots() {
        // -1 is not a square mod 7, but it is mod 13.
        assert!(Field::Prime(7).from_i64(-1).sqrt().is_none());
        let r = Field::Prime(13).from_i64(-1).sqrt().unwrap();
        assert_eq!(r.clone() * r, Field::Prime(13).from_i64(-1));
        // p = 1 mod 8 exercises the full Tonelli-Shanks loop.
        let f = Field::Prime(17);
        for n in 1..17 {
            let s = f.from_i64(n);
            if let Some(r) = s.sqrt() {
                assert_eq!(r.clone() * r, s);
            }
        }
        let q = Field::Rational;
        assert_eq!(q.parse("9/4").unwrap().canonical_sqrt().unwrap().to_string(), "3/2");
        assert!(q.from_i64(2).sqrt().is_none());
        assert_eq!(Field::default().from_i64(4).canonical_sqrt().unwrap().to_string(), "2");
    }
}
