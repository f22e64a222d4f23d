//! Exact arithmetic: fields, polynomials, rational functions, matrices and
//! their normal forms.

pub mod field;
pub mod matrix;
pub mod normal_form;
pub mod poly;
pub mod ratfunc;

pub use field::{Field, Scalar};
pub use matrix::{resultant, FieldElem, Matrix, PolyMat, RatMat, Ring, ScalarMat};
pub use normal_form::{
    col_hermite, coordinates, maximal_minor_gcd, rank, row_hermite, saturated_kernel,
    smith_hermite_basis, smith_invariants, unimodular_completion, ColHermite, ModuleBasis,
    RowHermite,
};
pub use poly::{AuxPoly, Poly};
pub use ratfunc::RatFunc;
