//! Exact resultants via fraction-free (Bareiss) elimination on the
//! Sylvester matrix.

use super::ratpoly::{RatPoly, Symbol};
use crate::error::{Error, Result};

/// Sylvester matrix of `a` (degree n) and `b` (degree m) with respect to
/// `s`, coefficients in descending powers. Rows `0..m` carry `a`, rows
/// `m..m+n` carry `b`.
pub fn sylvester_matrix<T: Clone>(a_desc: &[T], b_desc: &[T], zero: T) -> Vec<Vec<T>> {
    let n = a_desc.len() - 1;
    let m = b_desc.len() - 1;
    let size = n + m;
    let mut rows = Vec::with_capacity(size);
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        row[i..i + n + 1].clone_from_slice(a_desc);
        rows.push(row);
    }
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        row[i..i + m + 1].clone_from_slice(b_desc);
        rows.push(row);
    }
    rows
}

/// Determinant of a square matrix of exact polynomials.
pub fn det_bareiss(mut m: Vec<Vec<RatPoly>>) -> RatPoly {
    let n = m.len();
    if n == 0 {
        return RatPoly::one();
    }
    let mut negate = false;
    let mut prev = RatPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            // Prefer the sparsest nonzero pivot.
            let Some(p) = (k + 1..n)
                .filter(|&i| !m[i][k].is_zero())
                .min_by_key(|&i| m[i][k].num_terms())
            else {
                return RatPoly::zero();
            };
            m.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step is an exact division");
            }
            m[i][k] = RatPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

/// Resultant of `a` and `b` with respect to `s`, eliminating `s`.
///
/// Both leading coefficients in `s` must be nonzero polynomials, which holds
/// by construction for anything built through [`RatPoly::coeffs_in`] unless a
/// polynomial is zero.
pub fn resultant_exact(a: &RatPoly, b: &RatPoly, s: Symbol) -> Result<RatPoly> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let mut ac = a.coeffs_in(s);
    let mut bc = b.coeffs_in(s);
    if ac.last().is_some_and(RatPoly::is_zero) || bc.last().is_some_and(RatPoly::is_zero) {
        return Err(Error::ZeroLeadingCoefficient);
    }
    if ac.len() == 1 && bc.len() == 1 {
        return Ok(RatPoly::one());
    }
    ac.reverse();
    bc.reverse();
    Ok(det_bareiss(sylvester_matrix(&ac, &bc, RatPoly::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratpoly::rat;
    use proptest::prelude::*;
    use Symbol::*;

    fn s() -> RatPoly {
        RatPoly::var(A0)
    }

    #[test]
    fn linear_pair() {
        let u = RatPoly::var(Gamma);
        let v = RatPoly::var(Zeta);
        let r = resultant_exact(&(&s() - &u), &(&s() - &v), A0).unwrap();
        assert_eq!(r, &u - &v);
    }

    #[test]
    fn quadratic_linear() {
        let u = RatPoly::var(Gamma);
        let r = resultant_exact(&(&s().pow(2) - &u), &(&s() - &RatPoly::one()), A0).unwrap();
        assert_eq!(r, &RatPoly::one() - &u);
    }

    #[test]
    fn shared_root_gives_zero() {
        let a = (&s() - &RatPoly::one()).pow(2);
        let r = resultant_exact(&a, &a.derivative(A0), A0).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn zero_input_rejected() {
        assert_eq!(
            resultant_exact(&RatPoly::zero(), &s(), A0),
            Err(Error::ZeroLeadingCoefficient)
        );
    }

    fn eval_univariate(p: &RatPoly, x: &num_rational::BigRational) -> num_rational::BigRational {
        let mut acc = num_rational::BigRational::from_integer(0.into());
        for c in p.coeffs_in(A0).iter().rev() {
            acc = acc * x + c.coefficient(&[0; 7]);
        }
        acc
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        /// Res(a, b) = lead(a)^deg(b) * prod b(r_i) over the planted roots of a.
        #[test]
        fn resultant_matches_root_product(
            roots in prop::collection::vec((-6i64..=6, 1i64..=3), 1..4),
            b_coeffs in prop::collection::vec(-5i64..=5, 2..5),
        ) {
            prop_assume!(*b_coeffs.last().unwrap() != 0);
            let roots: Vec<_> = roots.into_iter().map(|(n, d)| rat(n, d)).collect();
            let mut a = RatPoly::one();
            for r in &roots {
                a = &a * &(&s() - &RatPoly::constant(r.clone()));
            }
            let b = RatPoly::from_coeffs_in(
                A0,
                &b_coeffs.iter().map(|&c| RatPoly::int(c)).collect::<Vec<_>>(),
            );
            let res = resultant_exact(&a, &b, A0).unwrap();
            let mut expect = rat(1, 1);
            for r in &roots {
                expect *= eval_univariate(&b, r);
            }
            prop_assert_eq!(res.coefficient(&[0; 7]), expect.clone());
            prop_assert!(res.num_terms() <= 1);
        }
    }
}
