use serde::Serialize;

use crate::error::{Error, Result};

/// A real number held as sign and natural-log magnitude, so that products
/// of many small or large factors keep their sign without underflowing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedLog {
    /// -1, 0 or 1.
    pub sign: i8,
    /// ln |value|; `-inf` when `sign == 0`.
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: Self = Self {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: Self = Self {
        sign: 1,
        ln_abs: 0.0,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn mul_f64(self, x: f64) -> Self {
        self * Self::from_f64(x)
    }

    pub fn log10_abs(self) -> f64 {
        self.ln_abs / std::f64::consts::LN_10
    }

    /// Plain `f64` value, or [`Error::Overflow`] when the magnitude is not
    /// representable.
    pub fn value(self) -> Result<f64> {
        if self.sign == 0 {
            return Ok(0.0);
        }
        // Largest finite f64 is ~e^709.78; subnormals reach ~e^-744.4.
        if !(-744.0..=709.0).contains(&self.ln_abs) {
            return Err(Error::Overflow {
                log10_abs: self.log10_abs(),
            });
        }
        Ok(f64::from(self.sign) * self.ln_abs.exp())
    }
}

impl std::ops::Mul for SignedLog {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs + rhs.ln_abs,
        }
    }
}
