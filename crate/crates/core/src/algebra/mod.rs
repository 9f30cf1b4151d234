//! Exact multivariate algebra: rational polynomials, resultants, and the
//! derivation of the steady-state and jump polynomials. Also houses the
//! double-double Sylvester determinant used to cross-check border values.

pub mod ddouble;
pub mod ratpoly;
pub mod resultant;
pub mod sylvester;
pub mod tables;

pub use ratpoly::{rat, NumericPoly, RatPoly, Symbol};
pub use resultant::resultant_exact;
pub use sylvester::{sylvester_det_numeric, SylvesterMatrix};
pub use tables::{derived, DerivedTables};

/// Sum of two exact polynomials.
pub fn poly_add(a: &RatPoly, b: &RatPoly) -> RatPoly {
    a + b
}

/// Product of two exact polynomials.
pub fn poly_mul(a: &RatPoly, b: &RatPoly) -> RatPoly {
    a * b
}

/// `p` with `s := num/den`, cleared by `den^max_pow`.
pub fn substitute(
    p: &RatPoly,
    s: Symbol,
    num: &RatPoly,
    den: &RatPoly,
    max_pow: u32,
) -> crate::Result<(RatPoly, u32)> {
    p.substitute(s, num, den, max_pow)
}
