//! Seeded random instances with `a_p` split into distinct linear factors.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{Field, Poly, Scalar};
use crate::spectral::SpectralCoeffs;

pub type InstanceRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distinct elements of the field; over `Q` drawn from a small window.
pub fn distinct_points<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = vec![];
    while out.len() < n {
        let x = match field {
            Field::Rational => field.from_i64(rng.gen_range(-3 * n as i64 - 3..=3 * n as i64 + 3)),
            Field::Prime(_) => field.random(rng),
        };
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub fn random_poly<R: Rng + ?Sized>(field: Field, max_degree: usize, rng: &mut R) -> Poly {
    Poly::from_coeffs(field, (0..=max_degree).map(|_| field.random(rng)).collect())
}

/// Shape of a random instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceShape {
    pub p: usize,
    pub q: usize,
    pub g: u32,
    /// `deg a_p` is drawn from `1..=max_ap_degree`.
    pub max_ap_degree: usize,
    pub max_coeff_degree: usize,
}

/// Rejection sampling until the regularity checks pass.
pub fn random_regular<R: Rng + ?Sized>(field: Field, shape: InstanceShape, rng: &mut R) -> Result<SpectralCoeffs> {
    if shape.max_ap_degree == 0 {
        return Err(Error::Schema("a_p needs at least one zero".into()));
    }
    for _ in 0..1000 {
        let d = rng.gen_range(1..=shape.max_ap_degree);
        let roots = distinct_points(field, d, rng);
        let ap = Poly::from_roots(field, &roots).scale(&field.random_nonzero(rng));
        let mut a: Vec<Poly> = (1..shape.p).map(|_| random_poly(field, shape.max_coeff_degree, rng)).collect();
        a.push(ap);
        let sc = SpectralCoeffs::new(field, shape.p, shape.q, shape.g, a)?;
        if sc.regularity_check().passed() {
            return Ok(sc);
        }
    }
    Err(Error::DegenerateInput("no regular instance after 1000 draws".into()))
}

pub fn random_signs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i8> {
    (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect()
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_regular() {
        let shape = InstanceShape {
            p: 2,
            q: 1,
            g: 2,
            max_ap_degree: 5,
            max_coeff_degree: 3,
        };
        let f = Field::default();
        let a = random_regular(f, shape, &mut rng_from_seed(7)).unwrap();
        let b = random_regular(f, shape, &mut rng_from_seed(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.regularity_check().passed());
        assert!(a.branch_points().is_ok());
        let q = random_regular(Field::Rational, shape, &mut rng_from_seed(3)).unwrap();
        assert!(q.branch_points().is_ok());
    }
}
