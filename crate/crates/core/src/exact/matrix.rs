//! Dense matrices over the scalar field, `k[z]` and `k(z)`.
//!
//! Determinants use Bareiss elimination, which only ever divides exactly, so
//! polynomial matrices never leave `k[z]`. Characteristic polynomials use
//! Berkowitz's algorithm, which needs no division at all.
//!
//! The resultant `Res_t(f, g)` is the determinant of the Sylvester matrix
//! whose first `deg g` rows hold the coefficients of `f` in descending order
//! (shifted one column per row), followed by `deg f` rows built from `g` the
//! same way. With this convention `Res_t(t^2 + c, 2t) = 4c`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::field::{Field, Scalar};
use super::poly::{AuxPoly, Poly};
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Commutative ring operations shared by scalars, polynomials and rational
/// functions.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero_in(field: Field) -> Self;
    fn one_in(field: Field) -> Self;
    fn is_zero_elem(&self) -> bool;
    /// `self / d` when the quotient exists in the ring.
    fn exact_quo(&self, d: &Self) -> Option<Self>;
}

/// Rings in which every nonzero element is invertible.
pub trait FieldElem: Ring {
    fn inverse(&self) -> Option<Self>;
}

impl Ring for Scalar {
    fn zero_in(field: Field) -> Self {
        field.zero()
    }
    fn one_in(field: Field) -> Self {
        field.one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn exact_quo(&self, d: &Self) -> Option<Self> {
        Some(self * &d.inv()?)
    }
}

impl FieldElem for Scalar {
    fn inverse(&self) -> Option<Self> {
        self.inv()
    }
}

impl Ring for Poly {
    fn zero_in(field: Field) -> Self {
        Poly::zero(field)
    }
    fn one_in(field: Field) -> Self {
        Poly::one(field)
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn exact_quo(&self, d: &Self) -> Option<Self> {
        self.exact_div(d)
    }
}

impl Ring for RatFunc {
    fn zero_in(field: Field) -> Self {
        RatFunc::zero(field)
    }
    fn one_in(field: Field) -> Self {
        RatFunc::one(field)
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn exact_quo(&self, d: &Self) -> Option<Self> {
        Some(self * &d.inv()?)
    }
}

impl FieldElem for RatFunc {
    fn inverse(&self) -> Option<Self> {
        self.inv()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ScalarMat = Matrix<Scalar>;
pub type PolyMat = Matrix<Poly>;
pub type RatMat = Matrix<RatFunc>;

impl<T: Ring> Matrix<T> {
    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self::from_fn(field, rows, cols, |_, _| T::zero_in(field))
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Self::from_fn(field, n, n, |i, j| {
            if i == j {
                T::one_in(field)
            } else {
                T::zero_in(field)
            }
        })
    }

    /// Rows must all have length `cols`; `cols` is needed for 0-row input.
    pub fn from_rows(field: Field, cols: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!(
                "row of length {} in a matrix with {cols} columns",
                r.len()
            )));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// A single column.
    pub fn column(field: Field, v: Vec<T>) -> Self {
        let n = v.len();
        Matrix {
            field,
            rows: n,
            cols: 1,
            data: v,
        }
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(field: Field, rows: usize, cols: &[Vec<T>]) -> Self {
        Self::from_fn(field, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U: Ring>(&self, f: impl Fn(&T) -> Option<U>) -> Option<Matrix<U>> {
        let data = self.data.iter().map(f).collect::<Option<Vec<U>>>()?;
        Some(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero_elem)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_skew(&self) -> bool {
        self.is_square() && *self == -&self.transpose()
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| s.clone() * x.clone())
    }

    /// Product, or a shape error.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.field, self.rows, rhs.cols, |i, j| {
            let mut acc = T::zero_in(self.field);
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero_elem() {
                    continue;
                }
                acc = acc + a.clone() * rhs[(k, j)].clone();
            }
            acc
        }))
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(self.field, rows.len(), cols.len(), |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.field, self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        Self::from_fn(self.field, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)].clone()
            } else {
                other[(i - self.rows, j)].clone()
            }
        })
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let f = self.field;
        Self::from_fn(f, self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)].clone(),
                (false, false) => other[(i - self.rows, j - self.cols)].clone(),
                _ => T::zero_in(f),
            }
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare(self.rows, self.cols))
        }
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Result<T> {
        self.require_square()?;
        let n = self.rows;
        let f = self.field;
        if n == 0 {
            return Ok(T::one_in(f));
        }
        let mut m = self.clone();
        let mut sign_flip = false;
        let mut prev = T::one_in(f);
        for k in 0..n - 1 {
            if m[(k, k)].is_zero_elem() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero_elem()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign_flip = !sign_flip;
                    }
                    None => return Ok(T::zero_in(f)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[(i, j)].clone() * m[(k, k)].clone()
                        - m[(i, k)].clone() * m[(k, j)].clone();
                    m[(i, j)] = num
                        .exact_quo(&prev)
                        .expect("Bareiss division is exact");
                }
                m[(i, k)] = T::zero_in(f);
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        Ok(if sign_flip { -d } else { d })
    }

    /// Coefficients `c_0, ..., c_n` (ascending) of `det(t I - A)`, by
    /// Berkowitz's division-free algorithm.
    pub fn char_poly_coeffs(&self) -> Result<Vec<T>> {
        self.require_square()?;
        let n = self.rows;
        let f = self.field;
        // descending coefficients of the leading principal block's char poly
        let mut cur = vec![T::one_in(f)];
        for r in 0..n {
            let a = self[(r, r)].clone();
            // column of the Toeplitz matrix: 1, -a, -R C, -R A C, ...
            let mut toe = vec![T::one_in(f), -a];
            if r > 0 {
                let mut v: Vec<T> = (0..r).map(|i| self[(i, r)].clone()).collect();
                for _ in 0..r {
                    let rv = (0..r).fold(T::zero_in(f), |acc, j| {
                        acc + self[(r, j)].clone() * v[j].clone()
                    });
                    toe.push(-rv);
                    v = (0..r)
                        .map(|i| {
                            (0..r).fold(T::zero_in(f), |acc, j| {
                                acc + self[(i, j)].clone() * v[j].clone()
                            })
                        })
                        .collect();
                }
            }
            let next: Vec<T> = (0..r + 2)
                .map(|i| {
                    (0..=r.min(i)).fold(T::zero_in(f), |acc, j| {
                        if i - j < toe.len() && j < cur.len() {
                            acc + toe[i - j].clone() * cur[j].clone()
                        } else {
                            acc
                        }
                    })
                })
                .collect();
            cur = next;
        }
        cur.reverse();
        Ok(cur)
    }
}

impl<T: FieldElem> Matrix<T> {
    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[(i, c)].is_zero_elem()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].inverse().unwrap();
            for j in 0..self.cols {
                m[(r, j)] = inv.clone() * m[(r, j)].clone();
            }
            for i in 0..self.rows {
                if i != r && !m[(i, c)].is_zero_elem() {
                    let factor = m[(i, c)].clone();
                    for j in 0..self.cols {
                        m[(i, j)] = m[(i, j)].clone() - factor.clone() * m[(r, j)].clone();
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, as columns.
    pub fn nullspace(&self) -> Self {
        let (r, pivots) = self.rref();
        let f = self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let cols: Vec<Vec<T>> = free
            .iter()
            .map(|&fc| {
                let mut v = vec![T::zero_in(f); self.cols];
                v[fc] = T::one_in(f);
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, fc)].clone();
                }
                v
            })
            .collect();
        Self::from_columns(f, self.cols, &cols)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(self.field, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.submatrix(0..n, n..2 * n))
    }
}

impl PolyMat {
    pub fn from_int_rows(field: Field, rows: &[&[&[i64]]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let r = rows
            .iter()
            .map(|row| row.iter().map(|c| Poly::from_ints(field, c)).collect())
            .collect();
        Self::from_rows(field, cols, r).expect("consistent literal")
    }

    pub fn eval(&self, x: &Scalar) -> ScalarMat {
        self.map(|p| p.eval(x))
    }

    pub fn derivative(&self) -> Self {
        self.map(Poly::derivative)
    }

    pub fn to_ratmat(&self) -> RatMat {
        self.map(|p| RatFunc::from_poly(p.clone()))
    }

    /// Constant matrices over the field.
    pub fn from_scalars(m: &ScalarMat) -> Self {
        m.map(|c| Poly::constant(c.clone()))
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.data.iter().filter_map(Poly::degree).max()
    }

    /// Determinant is a nonzero constant.
    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().map(|d| d.is_unit()).unwrap_or(false)
    }

    pub fn char_poly(&self) -> Result<AuxPoly> {
        Ok(AuxPoly::from_coeffs(self.field, self.char_poly_coeffs()?))
    }

    pub fn to_strings(&self) -> Vec<Vec<Vec<String>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Poly::to_strings).collect())
            .collect()
    }

    /// Parses rows of polynomials (each an ascending coefficient list).
    pub fn parse(field: Field, rows: &[Vec<Vec<String>>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let r = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| Poly::parse(field, p))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, cols, r)
    }
}

impl RatMat {
    pub fn to_polymat(&self) -> Option<PolyMat> {
        self.try_map(RatFunc::to_poly)
    }

    /// Entries with a pole, as `(row, col, entry)`.
    pub fn poles(&self) -> Vec<(usize, usize, String)> {
        let mut out = vec![];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_polynomial() {
                    out.push((i, j, self[(i, j)].to_string()));
                }
            }
        }
        out
    }
}

impl ScalarMat {
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::to_string).collect())
            .collect()
    }
}

impl<T: Ring> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T: Ring> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Ring> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_mul(rhs).expect("matrix shapes")
    }
}

impl<'a, T: Ring> Add<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix shapes");
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + rhs[(i, j)].clone()
        })
    }
}

impl<'a, T: Ring> Sub<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix shapes");
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - rhs[(i, j)].clone()
        })
    }
}

impl<T: Ring> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: Ring> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `Res_t(f, g)` as a polynomial in `z`; see the module docs for the sign.
pub fn resultant(f: &AuxPoly, g: &AuxPoly) -> Result<Poly> {
    let field = f.field();
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return Err(Error::DegenerateInput(
            "resultant of a zero polynomial".into(),
        ));
    };
    let size = m + n;
    if size == 0 {
        return Ok(Poly::one(field));
    }
    let syl = PolyMat::from_fn(field, size, size, |i, j| {
        if i < n {
            // f row shifted by i; column j holds coefficient of t^(m - (j - i))
            j.checked_sub(i)
                .filter(|&d| d <= m)
                .map_or_else(|| Poly::zero(field), |d| f.coeff(m - d))
        } else {
            let r = i - n;
            j.checked_sub(r)
                .filter(|&d| d <= n)
                .map_or_else(|| Poly::zero(field), |d| g.coeff(n - d))
        }
    });
    syl.det()
}
