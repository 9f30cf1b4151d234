//! Exact derivation of the steady-state polynomial f(X, A0) and the jump
//! polynomial J(A0). Production code evaluates these derived forms; their
//! coefficients are never typed in by hand.

use std::fmt::Write as _;
use std::sync::OnceLock;

use super::ratpoly::{rat, NumericPoly, RatPoly, Symbol, NUM_SYMBOLS};
use super::resultant::resultant_exact;
use crate::error::Result;

use Symbol::*;

/// Steady-state balance with the phase eliminated:
/// `A1^2 (-X + 3 gamma A0^2 + 3/4 gamma A1^2)^2 + 4 X zeta^2 A1^2 - F^2`.
pub fn phase_free_balance() -> RatPoly {
    let a1sq = RatPoly::var(A1sq);
    let detuning = &(&(&RatPoly::var(Gamma) * &RatPoly::var_pow(A0, 2)).scale(&rat(3, 1))
        + &(&RatPoly::var(Gamma) * &a1sq).scale(&rat(3, 4)))
        - &RatPoly::var(X);
    let damping = (&(&RatPoly::var(X) * &RatPoly::var_pow(Zeta, 2)) * &a1sq).scale(&rat(4, 1));
    &(&(&a1sq * &detuning.pow(2)) + &damping) - &RatPoly::var_pow(F, 2)
}

/// Mean-force balance `gamma A0^3 + 3/2 gamma A0 A1^2 - F0`.
pub fn mean_balance() -> RatPoly {
    let g = RatPoly::var(Gamma);
    &(&(&g * &RatPoly::var_pow(A0, 3)) + &(&(&g * &RatPoly::var(A0)) * &RatPoly::var(A1sq)).scale(&rat(3, 2)))
        - &RatPoly::var(F0)
}

/// `A1^2 = num / den` solved from [`mean_balance`].
pub fn a1sq_from_mean_balance() -> (RatPoly, RatPoly) {
    let g = RatPoly::var(Gamma);
    let num = (&RatPoly::var(F0) - &(&g * &RatPoly::var_pow(A0, 3))).scale(&rat(2, 1));
    let den = (&g * &RatPoly::var(A0)).scale(&rat(3, 1));
    (num, den)
}

/// The derived polynomials together with the factors that relate them to
/// the raw elimination results.
#[derive(Debug, Clone)]
pub struct DerivedTables {
    /// f(X, A0; gamma, zeta, F, F0), degree 9 in A0 and 2 in X.
    pub steady: RatPoly,
    /// `cleared substitution = steady_scale * steady`.
    pub steady_scale: RatPoly,
    /// J(A0; gamma, zeta, F, F0), degree 21.
    pub jump: RatPoly,
    /// `Res_X(f, df/dA0) = jump_scale * jump`.
    pub jump_scale: RatPoly,
    steady_num: NumericPoly,
    steady_da0_num: NumericPoly,
    jump_num: NumericPoly,
}

impl DerivedTables {
    pub fn derive() -> Result<Self> {
        let (num, den) = a1sq_from_mean_balance();
        let (cleared, _) = phase_free_balance().substitute(A1sq, &num, &den, 3)?;
        let (steady_scale, steady) = cleared.primitive_part();

        let da0 = steady.derivative(A0);
        let res = resultant_exact(&steady, &da0, X)?;
        let (jump_scale, jump) = res.primitive_part();

        Ok(Self {
            steady_num: steady.to_numeric(),
            steady_da0_num: da0.to_numeric(),
            jump_num: jump.to_numeric(),
            steady,
            steady_scale,
            jump,
            jump_scale,
        })
    }

    /// Coefficient of `A0^k` in f, as a polynomial in X and the parameters.
    pub fn steady_coeff(&self, k: usize) -> RatPoly {
        self.steady.coeffs_in(A0).get(k).cloned().unwrap_or_default()
    }

    /// Coefficient of `A0^k` in J.
    pub fn jump_coeff(&self, k: usize) -> RatPoly {
        self.jump.coeffs_in(A0).get(k).cloned().unwrap_or_default()
    }

    /// Dense A0-coefficients of f at numeric `X` and parameters.
    pub fn steady_coeffs_at(&self, values: &[f64; NUM_SYMBOLS]) -> Vec<f64> {
        self.steady_num.coeffs_in(A0, values)
    }

    pub fn steady_da0_coeffs_at(&self, values: &[f64; NUM_SYMBOLS]) -> Vec<f64> {
        self.steady_da0_num.coeffs_in(A0, values)
    }

    /// Dense A0-coefficients of J at numeric parameters.
    pub fn jump_coeffs_at(&self, values: &[f64; NUM_SYMBOLS]) -> Vec<f64> {
        self.jump_num.coeffs_in(A0, values)
    }

    /// Audit report: one `name = expression` line per nonzero coefficient.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# steady-state polynomial f = sum c_k A0^k  (X = Omega^2)");
        let _ = writeln!(out, "# cleared substitution = ({}) * f", self.steady_scale);
        for (k, c) in self.steady.coeffs_in(A0).iter().enumerate().rev() {
            let _ = writeln!(out, "c{k} = {c}");
        }
        let _ = writeln!(out, "# jump polynomial J = sum a_k A0^k");
        let _ = writeln!(out, "# Res_X(f, df/dA0) = ({}) * J", self.jump_scale);
        for (k, c) in self.jump.coeffs_in(A0).iter().enumerate().rev() {
            if !c.is_zero() {
                let _ = writeln!(out, "a{k} = {c}");
            }
        }
        out
    }
}

/// Process-wide derived tables, computed on first use.
pub fn derived() -> &'static DerivedTables {
    static TABLES: OnceLock<DerivedTables> = OnceLock::new();
    TABLES.get_or_init(|| DerivedTables::derive().expect("table derivation is infallible"))
}

/// Symbol value vector for numeric evaluation.
pub fn symbol_values(a0: f64, x: f64, gamma: f64, zeta: f64, f: f64, f0: f64) -> [f64; NUM_SYMBOLS] {
    let mut v = [0.0; NUM_SYMBOLS];
    v[A0.index()] = a0;
    v[X.index()] = x;
    v[Gamma.index()] = gamma;
    v[Zeta.index()] = zeta;
    v[F.index()] = f;
    v[F0.index()] = f0;
    v
}
