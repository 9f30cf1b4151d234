//! Steady-state response of `y = A0 + A1 cos(Omega t + theta)`.
//!
//! The phase-free balance and the mean-force balance combine into the
//! degree-9 polynomial f(Omega, A0) (see [`crate::algebra::tables`]). Each
//! real positive root A0 gives a harmonic amplitude A1 through the mean
//! balance, and the same pair solves the implicit amplitude equation
//! g(Omega, A1) with A0 recovered from the real root of the cubic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::tables::{derived, symbol_values};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::output::csv_row;
use crate::poly::{real_roots, RealPoly, DEFAULT_IMAG_TOL};

/// Radicands of `A1^2` down to this value are clamped to zero.
pub const RADICAND_TOL: f64 = -1e-12;

/// Branch continuation rejects a match further from the extrapolated A0
/// than this multiple of the local step.
pub const BRANCH_JUMP_FACTOR: f64 = 5.0;

/// Physical parameters of `y'' + 2 zeta y' + gamma y^3 = F0 + F cos(Omega t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub gamma: f64,
    pub zeta: f64,
    /// Forcing amplitude F.
    pub f_amp: f64,
    /// Constant force F0.
    pub f0: f64,
}

impl Params {
    pub const REFERENCE_GAMMA: f64 = 0.0783;
    pub const REFERENCE_ZETA: f64 = 0.025;
    pub const REFERENCE_F: f64 = 0.1;

    pub fn new(gamma: f64, zeta: f64, f_amp: f64, f0: f64) -> Result<Self> {
        let p = Self {
            gamma,
            zeta,
            f_amp,
            f0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.gamma, self.zeta, self.f_amp, self.f0];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite value in {self:?}")));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParams(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if self.zeta <= 0.0 {
            return Err(Error::InvalidParams(format!("zeta must be > 0, got {}", self.zeta)));
        }
        if self.f_amp < 0.0 || self.f0 < 0.0 {
            return Err(Error::InvalidParams(format!(
                "forces must be >= 0, got F = {}, F0 = {}",
                self.f_amp, self.f0
            )));
        }
        Ok(())
    }

    /// gamma = 0.0783, zeta = 0.025, F = 0.1 with the given F0.
    pub fn reference(f0: f64) -> Self {
        Self {
            gamma: Self::REFERENCE_GAMMA,
            zeta: Self::REFERENCE_ZETA,
            f_amp: Self::REFERENCE_F,
            f0,
        }
    }

    /// c = gamma F^2.
    pub fn c(&self) -> f64 {
        self.gamma * self.f_amp * self.f_amp
    }

    /// The static equilibrium (F0/gamma)^(1/3), where A1 = 0.
    pub fn equilibrium(&self) -> f64 {
        (self.f0 / self.gamma).cbrt()
    }

    pub(crate) fn symbols(&self, a0: f64, x: f64) -> [f64; 7] {
        symbol_values(a0, x, self.gamma, self.zeta, self.f_amp, self.f0)
    }
}

/// One solution of the steady-state balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub omega: f64,
    pub a0: f64,
    pub a1: f64,
    pub theta: f64,
}

/// f(Omega, A0) as a degree-9 polynomial in A0.
pub fn build_f_poly(pr: &Params, omega: f64) -> Result<RealPoly> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParams(format!("omega must be > 0, got {omega}")));
    }
    let coeffs = derived().steady_coeffs_at(&pr.symbols(0.0, omega * omega));
    Ok(RealPoly::new(coeffs))
}

/// A1 from the mean-force balance, `None` when `A1^2` would be negative.
pub fn a1_from_a0(pr: &Params, a0: f64) -> Result<Option<f64>> {
    if a0 == 0.0 {
        return Err(Error::DivisionByZero("A1 from A0 at A0 = 0"));
    }
    let radicand = 2.0 * (pr.f0 - pr.gamma * a0.powi(3)) / (3.0 * pr.gamma * a0);
    Ok(if radicand >= 0.0 {
        Some(radicand.sqrt())
    } else if radicand >= RADICAND_TOL {
        Some(0.0)
    } else {
        None
    })
}

/// The unique real root A0 of `gamma A0^3 + 3/2 gamma A0 A1^2 = F0`.
pub fn a0_from_a1(pr: &Params, a1: f64) -> Result<f64> {
    if !(a1 >= 0.0) {
        return Err(Error::InvalidParams(format!("A1 must be >= 0, got {a1}")));
    }
    if !(pr.f0 > 0.0) {
        return Err(Error::InvalidParams("A0 from A1 needs F0 > 0".into()));
    }
    let a1sq = a1 * a1;
    let half_q = pr.f0 / (2.0 * pr.gamma);
    let y = ((a1sq.powi(3) / 8.0 + half_q * half_q).sqrt() + half_q).cbrt();
    let v = a1sq / (2.0 * y);
    // Y - A1^2/(2Y), rewritten as (Y^3 - v^3)/(Y^2 + Y v + v^2) to avoid
    // cancellation at large A1.
    let mut a0 = (2.0 * half_q) / (y * y + y * v + v * v);
    // One Newton step on the cubic to clean up the last bits.
    let cubic = a0 * a0 * a0 + 1.5 * a0 * a1sq - 2.0 * half_q;
    let slope = 3.0 * a0 * a0 + 1.5 * a1sq;
    if slope > 0.0 {
        a0 -= cubic / slope;
    }
    Ok(a0)
}

/// Residual of the implicit amplitude equation g(Omega, A1).
pub fn g_residual(pr: &Params, omega: f64, a1: f64) -> Result<f64> {
    let a0 = a0_from_a1(pr, a1)?;
    Ok(g_residual_with(pr, omega, a0, a1))
}

pub(crate) fn g_residual_with(pr: &Params, omega: f64, a0: f64, a1: f64) -> f64 {
    let a1sq = a1 * a1;
    let detuning = 3.0 * pr.gamma * a0 * a0 + 0.75 * pr.gamma * a1sq - omega * omega;
    a1sq * detuning * detuning + 4.0 * omega * omega * pr.zeta * pr.zeta * a1sq
        - pr.f_amp * pr.f_amp
}

/// Phase in (-pi, 0] with `F sin(theta) = -2 zeta A1 Omega` and
/// `F cos(theta) = A1 (3 gamma A0^2 + 3/4 gamma A1^2 - Omega^2)`.
pub fn theta_of(pr: &Params, omega: f64, a0: f64, a1: f64) -> f64 {
    let s = -2.0 * pr.zeta * a1 * omega;
    let c = a1 * (-omega * omega + 3.0 * pr.gamma * a0 * a0 + 0.75 * pr.gamma * a1 * a1);
    let t = s.atan2(c);
    if t > 0.0 {
        -std::f64::consts::PI
    } else {
        t
    }
}

/// Relative residuals of the three balance equations (in-phase, quadrature,
/// mean), each divided by the largest term of its equation.
pub fn balance_residuals(pr: &Params, st: &SteadyState) -> [f64; 3] {
    let SteadyState { omega, a0, a1, theta } = *st;
    let g = pr.gamma;
    let rel = |terms: &[f64]| {
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let sum: f64 = terms.iter().sum();
        if scale == 0.0 {
            0.0
        } else {
            sum.abs() / scale
        }
    };
    [
        rel(&[
            -a1 * omega * omega,
            3.0 * g * a0 * a0 * a1,
            0.75 * g * a1.powi(3),
            -pr.f_amp * theta.cos(),
        ]),
        rel(&[-2.0 * pr.zeta * a1 * omega, -pr.f_amp * theta.sin()]),
        rel(&[g * a0.powi(3), 1.5 * g * a0 * a1 * a1, -pr.f0]),
    ]
}

/// Steady states at one frequency: real roots of f mapped through the mean
/// balance. Positive A0 only unless `include_negative`.
pub fn steady_states_at(pr: &Params, omega: f64, include_negative: bool) -> Result<Vec<SteadyState>> {
    let p = build_f_poly(pr, omega)?;
    let domain = if include_negative {
        Interval::ALL
    } else {
        Interval::POSITIVE
    };
    let roots = real_roots(&p, DEFAULT_IMAG_TOL, domain).map_err(|e| Error::AtFrequency {
        omega,
        source: Box::new(e),
    })?;
    let mut out = Vec::with_capacity(roots.len());
    for a0 in roots {
        if a0 == 0.0 {
            continue;
        }
        if let Some(a1) = a1_from_a0(pr, a0)? {
            let theta = if a1 > 0.0 && pr.f_amp > 0.0 {
                theta_of(pr, omega, a0, a1)
            } else {
                0.0
            };
            out.push(SteadyState { omega, a0, a1, theta });
        }
    }
    Ok(out)
}

/// One point of a traced response curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub omega: f64,
    pub branch: usize,
    pub a0: f64,
    pub a1: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseCurve {
    pub params: Params,
    pub samples: Vec<CurveSample>,
}

impl ResponseCurve {
    pub const CSV_HEADER: &'static str = "omega,branch,a0,a1,theta";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_row(&[s.omega]),
                s.branch,
                csv_row(&[s.a0, s.a1, s.theta])
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }

    pub fn branch_count(&self) -> usize {
        self.samples.iter().map(|s| s.branch + 1).max().unwrap_or(0)
    }

    /// Number of solutions at each sampled frequency, in sweep order.
    pub fn counts(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for s in &self.samples {
            match out.last_mut() {
                Some((w, n)) if *w == s.omega => *n += 1,
                _ => out.push((s.omega, 1)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CurveOptions {
    pub include_negative: bool,
}

struct Track {
    id: usize,
    last: f64,
    step: Option<f64>,
}

/// Assigns branch ids by nearest-neighbour continuation in A0. A track's
/// second sample is taken unconditionally; later ones must lie near the
/// linear extrapolation of its last step.
fn assign_branches(per_omega: Vec<Vec<SteadyState>>) -> Vec<CurveSample> {
    let mut active: Vec<Track> = Vec::new();
    let mut next_id = 0;
    let mut out = Vec::new();
    for states in per_omega {
        let mut motion: Vec<f64> = active.iter().filter_map(|t| t.step.map(f64::abs)).collect();
        motion.sort_by(f64::total_cmp);
        let typical = motion.get(motion.len() / 2).copied().unwrap_or(0.0);
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ti, t) in active.iter().enumerate() {
            let (predicted, limit) = match t.step {
                Some(step) => (
                    t.last + step,
                    BRANCH_JUMP_FACTOR * step.abs().max(typical) + 1e-9 * (1.0 + t.last.abs()),
                ),
                None => (t.last, f64::INFINITY),
            };
            for (si, s) in states.iter().enumerate() {
                let d = (s.a0 - predicted).abs();
                if d <= limit {
                    pairs.push((d, ti, si));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut track_used = vec![false; active.len()];
        let mut state_branch: Vec<Option<usize>> = vec![None; states.len()];
        for (_, ti, si) in pairs {
            if track_used[ti] || state_branch[si].is_some() {
                continue;
            }
            track_used[ti] = true;
            state_branch[si] = Some(ti);
            let t = &mut active[ti];
            t.step = Some(states[si].a0 - t.last);
            t.last = states[si].a0;
        }
        let mut next_active = Vec::new();
        let mut labelled = Vec::with_capacity(states.len());
        for (ti, t) in active.into_iter().enumerate() {
            if track_used[ti] {
                next_active.push((ti, t));
            }
        }
        for (si, s) in states.iter().enumerate() {
            let id = match state_branch[si] {
                Some(ti) => next_active
                    .iter()
                    .find(|(i, _)| *i == ti)
                    .map(|(_, t)| t.id)
                    .expect("matched track stays active"),
                None => {
                    let id = next_id;
                    next_id += 1;
                    next_active.push((usize::MAX, Track { id, last: s.a0, step: None }));
                    id
                }
            };
            labelled.push(CurveSample {
                omega: s.omega,
                branch: id,
                a0: s.a0,
                a1: s.a1,
                theta: s.theta,
            });
        }
        labelled.sort_by_key(|s| s.branch);
        out.extend(labelled);
        active = next_active.into_iter().map(|(_, t)| t).collect();
    }
    out
}

/// Samples the amplitude-frequency response over `omega_range`.
pub fn response_curve(
    pr: &Params,
    omega_range: Interval,
    n_samples: usize,
    opts: CurveOptions,
) -> Result<ResponseCurve> {
    pr.validate()?;
    if n_samples < 2 {
        return Err(Error::InvalidParams("response curve needs >= 2 samples".into()));
    }
    if !(omega_range.lo > 0.0) || !omega_range.hi.is_finite() {
        return Err(Error::InvalidParams(format!(
            "omega range must lie in (0, inf), got [{}, {}]",
            omega_range.lo, omega_range.hi
        )));
    }
    let per_omega: Vec<Vec<SteadyState>> = omega_range
        .linspace(n_samples)
        .into_par_iter()
        .map(|w| steady_states_at(pr, w, opts.include_negative))
        .collect::<Result<_>>()?;
    Ok(ResponseCurve {
        params: *pr,
        samples: assign_branches(per_omega),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> Params {
        Params::reference(0.4)
    }

    #[test]
    fn rejects_bad_params() {
        assert!(Params::new(0.0, 0.025, 0.1, 0.4).is_err());
        assert!(Params::new(0.0783, -1.0, 0.1, 0.4).is_err());
        assert!(Params::new(0.0783, 0.025, f64::NAN, 0.4).is_err());
        assert!(Params::new(0.0783, 0.025, 0.1, 0.4).is_ok());
        assert!((reference().c() - 0.0783 * 0.01).abs() < 1e-18);
    }

    #[test]
    fn f_poly_leading_terms() {
        let p = build_f_poly(&reference(), 0.7).unwrap();
        assert_eq!(p.degree(), 9);
        assert!((p.coeffs()[9] - 25.0 * 0.0783f64.powi(3)).abs() < 1e-15);
        assert!((p.coeffs()[9] - 0.0120012).abs() < 1e-6);
        assert_eq!(p.coeffs()[8], 0.0);
        assert!(build_f_poly(&reference(), 0.0).is_err());
    }

    #[test]
    fn f_vanishes_on_tangency_rows() {
        for (omega, a0) in [(0.576122891, 0.846633527), (0.643209846, 0.755260872)] {
            let p = build_f_poly(&reference(), omega).unwrap();
            assert!(p.relative_residual(a0) < 1e-8, "{}", p.relative_residual(a0));
        }
    }

    #[test]
    fn a1_from_a0_cases() {
        let pr = reference();
        let a0 = pr.equilibrium();
        assert!(a1_from_a0(&pr, a0).unwrap().unwrap().abs() < 1e-6);
        let a1 = a1_from_a0(&pr, 0.846633527).unwrap().unwrap();
        assert!((a1 - 1.882759746).abs() < 1e-6);
        let a1 = a1_from_a0(&pr, 1.583776750).unwrap().unwrap();
        assert!((a1 - 0.691474188).abs() < 1e-6);
        assert_eq!(a1_from_a0(&pr, 2.0 * a0).unwrap(), None);
        assert!(a1_from_a0(&pr, 0.0).is_err());
    }

    #[test]
    fn a0_from_a1_cases() {
        let pr = reference();
        assert!((a0_from_a1(&pr, 0.0).unwrap() - pr.equilibrium()).abs() < 1e-14);
        assert!((a0_from_a1(&pr, 1.882759746).unwrap() - 0.846633527).abs() < 1e-6);
        assert!(a0_from_a1(&pr, -1.0).is_err());
        assert!(a0_from_a1(&Params::reference(0.0), 1.0).is_err());
        // residual of the cubic stays small even at large amplitude
        for a1 in [1e-3, 0.5, 3.0, 50.0, 1e4] {
            let a0 = a0_from_a1(&pr, a1).unwrap();
            let terms = [pr.gamma * a0.powi(3), 1.5 * pr.gamma * a0 * a1 * a1, pr.f0];
            let res = (terms[0] + terms[1] - terms[2]).abs() / terms[2];
            assert!(res < 1e-10, "a1 = {a1}: {res}");
        }
    }

    #[test]
    fn a0_a1_round_trip() {
        let pr = reference();
        let top = pr.equilibrium();
        for i in 1..1000 {
            let x = top * i as f64 / 1000.0;
            let a1 = a1_from_a0(&pr, x).unwrap().unwrap();
            let back = a0_from_a1(&pr, a1).unwrap();
            assert!((back - x).abs() < 1e-9, "{x}: {back}");
        }
    }

    #[test]
    fn g_vanishes_at_tangencies() {
        let pr = reference();
        let tol = 1e-8 * pr.f_amp * pr.f_amp;
        assert!(g_residual(&pr, 0.576122891, 1.882759746).unwrap().abs() < tol);
        assert!(g_residual(&pr, 0.711882658, 2.806379023).unwrap().abs() < tol);
        assert!((g_residual(&pr, 0.5, 0.0).unwrap() + 0.01).abs() < 1e-15);
    }

    #[test]
    fn theta_branch_conventions() {
        let mut pr = reference();
        pr.zeta = 1e-300;
        // positive detuning term -> theta -> 0
        assert!(theta_of(&pr, 0.1, 1.0, 1.0).abs() < 1e-12);
        // negative detuning term -> theta -> -pi
        assert!((theta_of(&pr, 3.0, 1.0, 1.0) + std::f64::consts::PI).abs() < 1e-12);
        pr.zeta = 0.0;
        assert_eq!(theta_of(&pr, 3.0, 1.0, 1.0), -std::f64::consts::PI);
    }

    #[test]
    fn theta_at_first_tangency() {
        let pr = reference();
        let (w, a0, a1) = (0.576122891, 0.846633527, 1.882759746);
        let t = theta_of(&pr, w, a0, a1);
        let expect_sin = -2.0 * 0.025 * a1 * w / 0.1;
        assert!((t.sin() - expect_sin).abs() < 1e-7);
        let st = SteadyState { omega: w, a0, a1, theta: t };
        let r = balance_residuals(&pr, &st);
        assert!(r.iter().all(|x| *x < 1e-8), "{r:?}");
    }

    #[test]
    fn unforced_curve_is_equilibrium() {
        let pr = Params::new(0.0783, 0.025, 0.0, 0.4).unwrap();
        let curve = response_curve(&pr, Interval::new(0.2, 1.2).unwrap(), 41, CurveOptions::default()).unwrap();
        assert_eq!(curve.samples.len(), 41);
        for s in &curve.samples {
            assert!(s.a1.abs() < 1e-6);
            assert!((s.a0 - pr.equilibrium()).abs() < 1e-6);
        }
        assert_eq!(curve.branch_count(), 1);
    }

    #[test]
    fn reference_curve_counts_and_closure() {
        let pr = reference();
        let curve = response_curve(&pr, Interval::new(0.3, 1.0).unwrap(), 701, CurveOptions::default()).unwrap();
        let counts: Vec<usize> = curve.counts().iter().map(|c| c.1).collect();
        assert!(counts.iter().all(|c| [1, 3, 5].contains(c)), "{counts:?}");
        let mut changes = 0;
        for w in counts.windows(2) {
            if w[0] != w[1] {
                changes += 1;
            }
        }
        assert_eq!(changes, 4);
        assert!(counts.contains(&5));
        let tol = 1e-8 * pr.f_amp * pr.f_amp;
        for s in &curve.samples {
            assert!(g_residual_with(&pr, s.omega, s.a0, s.a1).abs() < tol);
            let st = SteadyState { omega: s.omega, a0: s.a0, a1: s.a1, theta: s.theta };
            let r = balance_residuals(&pr, &st);
            assert!(r.iter().all(|x| *x < 1e-8), "{r:?} at {s:?}");
        }
    }

    #[test]
    fn csv_layout() {
        let pr = reference();
        let curve = response_curve(&pr, Interval::new(0.3, 0.31).unwrap(), 2, CurveOptions::default()).unwrap();
        let csv = curve.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("omega,branch,a0,a1,theta"));
        assert_eq!(lines.next().unwrap().split(',').count(), 5);
        let v: serde_json::Value = serde_json::from_str(&curve.to_json()).unwrap();
        assert!(v["params"]["gamma"].as_f64().is_some());
        assert!(v["samples"].as_array().unwrap().len() >= 2);
    }

    #[test]
    fn branches_break_only_at_folds() {
        for f0 in [0.2, 0.301, 0.4, 0.429, 0.6] {
            let pr = Params::reference(f0);
            let folds = crate::jump::jump_points(&pr).unwrap();
            assert!(folds.iter().all(|p| p.omega > 0.3 && p.omega < 1.0));
            let curve = response_curve(&pr, Interval::new(0.3, 1.0).unwrap(), 500, CurveOptions::default()).unwrap();
            assert_eq!(curve.branch_count(), folds.len() + 1, "F0 = {f0}");
        }
    }
}
