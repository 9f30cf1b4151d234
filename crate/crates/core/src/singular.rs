//! Singular points of the steady-state curve: simultaneous zeros of f and
//! both of its partial derivatives.
//!
//! `df/dOmega` factors into `8 A0 * Omega * (F0 - gamma A0^3) * h` with
//! `h = F0 + A0 (5 gamma A0^2 - 4 zeta^2 - 2 Omega^2)`. The only nontrivial
//! branch is `h = 0`; eliminating A0 from f and `df/dA0` on it leaves a
//! quartic in `X = Omega^2` whose coefficients depend only on zeta and
//! `c = gamma F^2`. A singular point needs a positive root of that quartic.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::poly::{real_roots, RealPoly, DEFAULT_IMAG_TOL};
use crate::steady::Params;

/// The four factors of `df/dOmega`, in the order
/// `(8 A0, Omega, F0 - gamma A0^3, F0 + A0 (5 gamma A0^2 - 4 zeta^2 - 2 Omega^2))`.
pub fn df_domega_factored(pr: &Params, omega: f64, a0: f64) -> (f64, f64, f64, f64) {
    (
        8.0 * a0,
        omega,
        pr.f0 - pr.gamma * a0.powi(3),
        pr.f0 + a0 * (5.0 * pr.gamma * a0 * a0 - 4.0 * pr.zeta * pr.zeta - 2.0 * omega * omega),
    )
}

/// F0 making the last factor of [`df_domega_factored`] vanish.
pub fn f0_branch(pr: &Params, omega: f64, a0: f64) -> f64 {
    2.0 * omega * omega * a0 + 4.0 * pr.zeta * pr.zeta * a0 - 5.0 * pr.gamma * a0.powi(3)
}

/// The quartic in X, ascending coefficients.
pub fn singular_quartic(zeta: f64, c: f64) -> RealPoly {
    let z2 = zeta * zeta;
    let z4 = z2 * z2;
    let z6 = z4 * z2;
    let z8 = z4 * z4;
    RealPoly::new(vec![
        512.0 * z8 * z4 - 240.0 * z6 * c + 45.0 * c * c,
        -336.0 * c * z4 + 1792.0 * z8 * z2,
        -96.0 * c * z2 + 2304.0 * z8,
        1280.0 * z6,
        256.0 * z4,
    ])
}

/// A0^2 at a root X of the quartic:
/// `(16 zeta^2 X^3 + 64 zeta^4 X^2 + (9 gamma F^2 + 80 zeta^6) X + 15 gamma F^2 zeta^2 + 32 zeta^8) / (45 F^2 gamma^2)`.
pub fn a0sq_expression(zeta: f64, gamma: f64, f_amp: f64, x: f64) -> Result<f64> {
    let den = 45.0 * f_amp * f_amp * gamma * gamma;
    if den == 0.0 {
        return Err(Error::DivisionByZero("A0^2 expression needs F, gamma > 0"));
    }
    let z2 = zeta * zeta;
    let z4 = z2 * z2;
    let c = gamma * f_amp * f_amp;
    let rhs = 16.0 * z2 * x.powi(3)
        + 64.0 * z4 * x * x
        + (9.0 * c + 80.0 * z4 * z2) * x
        + 15.0 * c * z2
        + 32.0 * z4 * z4;
    Ok(rhs / den)
}

/// Sign changes in a coefficient sequence, zeros skipped.
pub fn descartes_sign_changes(coeffs: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for &c in coeffs {
        if c == 0.0 {
            continue;
        }
        if last != 0.0 && (c > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = c;
    }
    changes
}

/// Positive roots of the quartic at `(zeta, c)`.
pub fn positive_quartic_roots(zeta: f64, c: f64) -> Result<Vec<f64>> {
    let q = singular_quartic(zeta, c);
    if descartes_sign_changes(q.coeffs()) == 0 {
        return Ok(Vec::new());
    }
    real_roots(&q, DEFAULT_IMAG_TOL, Interval::POSITIVE)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanGrid {
    pub zeta: Interval,
    pub c: Interval,
    pub n_zeta: usize,
    pub n_c: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub zeta: f64,
    pub c: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub grid: ScanGrid,
    pub violations: Vec<Violation>,
    pub checked: usize,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Grid samples: geometric when the range is strictly positive, linear
/// when it starts at zero.
fn axis(range: Interval, n: usize) -> Vec<f64> {
    if range.lo > 0.0 {
        range.geomspace(n)
    } else {
        range.linspace(n)
    }
}

/// Checks every grid point for positive roots of the quartic.
pub fn scan_no_singular(zeta_range: Interval, c_range: Interval, grid: (usize, usize)) -> Result<ScanReport> {
    if !(zeta_range.lo > 0.0) || c_range.lo < 0.0 || !zeta_range.hi.is_finite() || !c_range.hi.is_finite() {
        return Err(Error::InvalidParams(
            "scan needs zeta > 0, c >= 0 and finite ranges".into(),
        ));
    }
    let zetas = axis(zeta_range, grid.0);
    let cs = axis(c_range, grid.1);
    let points: Vec<(f64, f64)> = zetas
        .iter()
        .flat_map(|&z| cs.iter().map(move |&c| (z, c)))
        .collect();
    let per_point: Vec<Vec<Violation>> = points
        .par_iter()
        .map(|&(zeta, c)| {
            positive_quartic_roots(zeta, c).map(|xs| xs.into_iter().map(|x| Violation { zeta, c, x }).collect())
        })
        .collect::<Result<_>>()?;
    Ok(ScanReport {
        grid: ScanGrid {
            zeta: zeta_range,
            c: c_range,
            n_zeta: zetas.len(),
            n_c: cs.len(),
        },
        violations: per_point.into_iter().flatten().collect(),
        checked: points.len(),
    })
}

/// Default scan: zeta in [0.005, 0.5], c in [1e-6, 10], 200 x 200.
pub fn default_scan() -> Result<ScanReport> {
    scan_no_singular(Interval::new(0.005, 0.5)?, Interval::new(1e-6, 10.0)?, (200, 200))
}
