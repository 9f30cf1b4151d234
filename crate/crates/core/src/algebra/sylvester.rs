//! Numeric Sylvester determinant in double-double arithmetic.

use super::ddouble::DoubleDouble;
use super::resultant::sylvester_matrix;
use crate::error::{Error, Result};
use crate::signed::SignedLog;

/// Leading coefficients at or below this magnitude are treated as zero.
pub const MIN_LEADING: f64 = 1e-300;

/// `(m+n) x (m+n)` Sylvester matrix of a degree-n and a degree-m polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterMatrix {
    pub entries: Vec<Vec<f64>>,
}

fn trimmed(coeffs: &[f64]) -> Result<&[f64]> {
    let end = coeffs
        .iter()
        .rposition(|c| *c != 0.0)
        .ok_or(Error::ZeroLeadingCoefficient)?;
    if coeffs[end].abs() <= MIN_LEADING {
        return Err(Error::ZeroLeadingCoefficient);
    }
    Ok(&coeffs[..=end])
}

impl SylvesterMatrix {
    /// Builds the matrix from ascending coefficient lists.
    pub fn new(a_coeffs: &[f64], b_coeffs: &[f64]) -> Result<Self> {
        let a: Vec<f64> = trimmed(a_coeffs)?.iter().rev().copied().collect();
        let b: Vec<f64> = trimmed(b_coeffs)?.iter().rev().copied().collect();
        Ok(Self {
            entries: sylvester_matrix(&a, &b, 0.0),
        })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Determinant by partially pivoted elimination in double-double. Rows
    /// are first scaled by powers of two so that each has max magnitude in
    /// [1, 2); the scale is folded back into the returned log-magnitude and
    /// never changes the sign.
    pub fn determinant(&self) -> SignedLog {
        let n = self.size();
        if n == 0 {
            return SignedLog::ONE;
        }
        let mut ln_scale = 0.0;
        let mut m: Vec<Vec<DoubleDouble>> = Vec::with_capacity(n);
        for row in &self.entries {
            let max = row.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            if max == 0.0 {
                return SignedLog::ZERO;
            }
            let e = max.log2().floor() as i32;
            ln_scale += f64::from(e) * std::f64::consts::LN_2;
            m.push(
                row.iter()
                    .map(|&x| DoubleDouble::new(x).ldexp(-e))
                    .collect(),
            );
        }

        let mut sign: i8 = 1;
        let mut ln_abs = ln_scale;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| {
                    m[i][k]
                        .abs()
                        .partial_cmp(&m[j][k].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty pivot range");
            let pivot = m[p][k];
            if pivot.is_zero() {
                return SignedLog::ZERO;
            }
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            sign *= pivot.signum();
            let a = pivot.abs();
            ln_abs += a.hi.ln() + a.lo / a.hi;
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let factor = m[i][k] / pivot;
                for j in k + 1..n {
                    let t = m[k][j];
                    if !t.is_zero() {
                        m[i][j] = m[i][j] - factor * t;
                    }
                }
                m[i][k] = DoubleDouble::ZERO;
            }
        }
        SignedLog { sign, ln_abs }
    }
}

/// Resultant of two polynomials given as ascending coefficient lists,
/// evaluated as the Sylvester determinant in double-double precision.
pub fn sylvester_det_numeric(a_coeffs: &[f64], b_coeffs: &[f64]) -> Result<SignedLog> {
    Ok(SylvesterMatrix::new(a_coeffs, b_coeffs)?.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_pair_sign_convention() {
        let m = SylvesterMatrix::new(&[-2.0, 1.0], &[-3.0, 1.0]).unwrap();
        assert_eq!(m.entries, vec![vec![1.0, -2.0], vec![1.0, -3.0]]);
        assert_eq!(m.determinant().value().unwrap(), -1.0);
    }

    #[test]
    fn shared_root_is_zero() {
        let d = sylvester_det_numeric(&[1.0, -2.0, 1.0], &[-2.0, 2.0]).unwrap();
        assert!(d.sign == 0 || d.ln_abs < -60.0, "{d:?}");
    }

    #[test]
    fn layout_matches_shifted_rows() {
        // a = x^2 + 2x + 3 (n = 2), b = 4x + 5 (m = 1)
        let m = SylvesterMatrix::new(&[3.0, 2.0, 1.0], &[5.0, 4.0]).unwrap();
        assert_eq!(
            m.entries,
            vec![
                vec![1.0, 2.0, 3.0],
                vec![4.0, 5.0, 0.0],
                vec![0.0, 4.0, 5.0]
            ]
        );
        assert!((m.determinant().value().unwrap() - 33.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_vanishing_leading_coefficient() {
        assert_eq!(
            sylvester_det_numeric(&[1.0, 1e-301], &[1.0, 1.0]),
            Err(Error::ZeroLeadingCoefficient)
        );
        assert_eq!(
            sylvester_det_numeric(&[0.0, 0.0], &[1.0, 1.0]),
            Err(Error::ZeroLeadingCoefficient)
        );
    }

    #[test]
    fn survives_extreme_scaling() {
        // Res(x - 1e-200, x - 2e-200) = -1e-200
        let d = sylvester_det_numeric(&[-1e-200, 1.0], &[-2e-200, 1.0]).unwrap();
        assert_eq!(d.sign, -1);
        let d = sylvester_det_numeric(&[-2e-200, 1.0], &[-1e-200, 1.0]).unwrap();
        assert_eq!(d.sign, 1);
        assert!((d.log10_abs() + 200.0).abs() < 1e-9);
    }
}
