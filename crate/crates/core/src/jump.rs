//! Vertical tangencies of the response curve (jumps), the degree-21 jump
//! polynomial J(A0), its projections onto parameter space, border sets
//! where the number of tangencies changes, and frequency coincidences
//! between tangencies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::tables::derived;
use crate::algebra::sylvester_det_numeric;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::output::csv_row;
use crate::poly::{all_roots, discriminant_from_roots, real_roots, RealPoly, RootSet, DEFAULT_IMAG_TOL};
use crate::steady::{a1_from_a0, build_f_poly, Params};

/// Relative size below which a denominator factor of the frequency closed
/// form counts as zero.
pub const POLE_TOL: f64 = 1e-10;

/// Coarse grid size used to bracket border points.
pub const DEFAULT_BORDER_GRID: usize = 400;

/// Coarse grid size used to bracket frequency coincidences.
pub const DEFAULT_DOUBLE_OMEGA_GRID: usize = 200;

/// Relative residual bound on f and `df/dA0` at a vertical tangency.
pub const RESIDUAL_TOL: f64 = 1e-8;

const BISECTION_ITERATIONS: usize = 100;

/// A vertical tangency of the response curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpPoint {
    pub omega: f64,
    pub a0: f64,
    pub a1: f64,
}

/// The four physical parameters, by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    Gamma,
    Zeta,
    F,
    F0,
}

impl ParamName {
    pub fn name(self) -> &'static str {
        match self {
            ParamName::Gamma => "gamma",
            ParamName::Zeta => "zeta",
            ParamName::F => "f",
            ParamName::F0 => "f0",
        }
    }

    pub fn get(self, pr: &Params) -> f64 {
        match self {
            ParamName::Gamma => pr.gamma,
            ParamName::Zeta => pr.zeta,
            ParamName::F => pr.f_amp,
            ParamName::F0 => pr.f0,
        }
    }

    pub fn with(self, pr: &Params, value: f64) -> Params {
        let mut p = *pr;
        match self {
            ParamName::Gamma => p.gamma = value,
            ParamName::Zeta => p.zeta = value,
            ParamName::F => p.f_amp = value,
            ParamName::F0 => p.f0 = value,
        }
        p
    }

    /// Forces may vanish; gamma and zeta may not.
    fn allows_zero(self) -> bool {
        matches!(self, ParamName::F | ParamName::F0)
    }
}

/// J(A0) at the given parameters.
pub fn build_jump_poly(pr: &Params) -> RealPoly {
    RealPoly::new(derived().jump_coeffs_at(&pr.symbols(0.0, 0.0)))
}

/// `df/dA0` as a polynomial in A0 at frequency `omega`.
pub fn build_f_da0_poly(pr: &Params, omega: f64) -> RealPoly {
    RealPoly::new(derived().steady_da0_coeffs_at(&pr.symbols(0.0, omega * omega)))
}

/// Omega^2 paired with a root A0 of J.
pub fn omega_sq_at(pr: &Params, a0: f64) -> Result<f64> {
    let (g, f0, f) = (pr.gamma, pr.f0, pr.f_amp);
    let a3 = a0.powi(3);
    let ga3 = g * a3;
    let small = |value: f64, scale: f64| value.abs() <= POLE_TOL * scale;
    let a0_scale = if f0 > 0.0 { pr.equilibrium() } else { 1.0 };
    if small(a0, a0_scale)
        || small(f0 - 10.0 * ga3, f0.max(10.0 * ga3.abs()))
        || small(f0 - ga3, f0.max(ga3.abs()))
    {
        return Err(Error::Pole { a0 });
    }
    let a6 = a3 * a3;
    let num = -50.0 * g.powi(4) * a6 * a6 + 95.0 * g.powi(3) * f0 * a6 * a3
        + (6.0 * f * f * g * g - 39.0 * g * g * f0 * f0) * a6
        + (3.0 * f * f * g * f0 - 7.0 * g * f0.powi(3)) * a3
        + f0.powi(4);
    let den = 2.0 * a0 * (f0 - 10.0 * ga3) * (f0 - ga3).powi(2);
    Ok(num / den)
}

/// Relative residuals `(|f| / scale, |df/dA0| / scale)` at a point.
pub fn tangency_residuals(pr: &Params, omega: f64, a0: f64) -> Result<(f64, f64)> {
    let f = build_f_poly(pr, omega)?;
    let d = build_f_da0_poly(pr, omega);
    Ok((f.relative_residual(a0), d.relative_residual(a0)))
}

/// Positive real roots of J at `pr`, or an empty list when J vanishes
/// identically.
pub fn positive_jump_roots(pr: &Params) -> Result<Vec<f64>> {
    let j = build_jump_poly(pr);
    if j.is_zero() {
        return Ok(Vec::new());
    }
    real_roots(&j, DEFAULT_IMAG_TOL, Interval::POSITIVE)
}

/// Completes a root of J into a vertical tangency, or `None` when the root
/// is non-physical: on a pole of the frequency closed form, with
/// `Omega^2 <= 0`, with complex A1, or failing the tangency residuals. The
/// last test removes roots that J acquires near the pole without a
/// matching tangency of f.
pub fn tangency_from_root(pr: &Params, a0: f64) -> Result<Option<JumpPoint>> {
    if !(a0 > 0.0) {
        return Ok(None);
    }
    let x = match omega_sq_at(pr, a0) {
        Ok(x) => x,
        Err(Error::Pole { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if !(x > 0.0) || !x.is_finite() {
        return Ok(None);
    }
    let Some(a1) = a1_from_a0(pr, a0)? else {
        return Ok(None);
    };
    let omega = x.sqrt();
    let (r1, r2) = tangency_residuals(pr, omega, a0)?;
    if r1 > RESIDUAL_TOL || r2 > RESIDUAL_TOL {
        return Ok(None);
    }
    Ok(Some(JumpPoint { omega, a0, a1 }))
}

/// All vertical tangencies, sorted by Omega.
pub fn jump_points(pr: &Params) -> Result<Vec<JumpPoint>> {
    pr.validate()?;
    let mut out = Vec::new();
    for a0 in positive_jump_roots(pr)? {
        if let Some(p) = tangency_from_root(pr, a0)? {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    Ok(out)
}

pub fn jump_points_csv(points: &[JumpPoint]) -> String {
    let mut out = String::from("omega,a0,a1\n");
    for p in points {
        out.push_str(&csv_row(&[p.omega, p.a0, p.a1]));
        out.push('\n');
    }
    out
}

/// Number of positive real roots of f at one frequency.
pub fn count_solutions(pr: &Params, omega: f64) -> Result<usize> {
    let p = build_f_poly(pr, omega)?;
    Ok(real_roots(&p, DEFAULT_IMAG_TOL, Interval::POSITIVE)?.len())
}

/// Zero set of J sampled over one or two free parameters. Each point is
/// the free-parameter values followed by A0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpManifoldSlice {
    pub fixed: Vec<(ParamName, f64)>,
    pub free: Vec<ParamName>,
    pub points: Vec<Vec<f64>>,
}

impl JumpManifoldSlice {
    pub fn csv_header(&self) -> String {
        let mut cols: Vec<&str> = self.free.iter().map(|p| p.name()).collect();
        cols.push("a0");
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        for p in &self.points {
            out.push_str(&csv_row(p));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("slice serializes")
    }
}

fn slice_points(samples: Vec<Vec<f64>>, make: impl Fn(&[f64]) -> Params + Sync) -> Result<Vec<Vec<f64>>> {
    let per: Vec<Vec<Vec<f64>>> = samples
        .into_par_iter()
        .map(|free| {
            let roots = positive_jump_roots(&make(&free))?;
            Ok(roots
                .into_iter()
                .map(|a0| {
                    let mut row = free.clone();
                    row.push(a0);
                    row
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// (F0, A0) pairs on J = 0 at fixed gamma, zeta, F.
pub fn manifold_slice_2d(gamma: f64, zeta: f64, f_amp: f64, f0_range: Interval, n: usize) -> Result<JumpManifoldSlice> {
    if n < 2 {
        return Err(Error::InvalidParams("slice needs >= 2 samples".into()));
    }
    let base = Params::new(gamma, zeta, f_amp, f0_range.lo.max(0.0))?;
    Params::new(gamma, zeta, f_amp, f0_range.hi)?;
    let samples = f0_range.linspace(n).into_iter().map(|f0| vec![f0]).collect();
    Ok(JumpManifoldSlice {
        fixed: vec![(ParamName::Gamma, gamma), (ParamName::Zeta, zeta), (ParamName::F, f_amp)],
        free: vec![ParamName::F0],
        points: slice_points(samples, |v| ParamName::F0.with(&base, v[0]))?,
    })
}

/// (F, F0, A0) triples on J = 0 at fixed gamma, zeta.
pub fn manifold_slice_3d(
    gamma: f64,
    zeta: f64,
    f_range: Interval,
    f0_range: Interval,
    grid: (usize, usize),
) -> Result<JumpManifoldSlice> {
    if grid.0 < 2 || grid.1 < 2 {
        return Err(Error::InvalidParams("slice grid needs >= 2 samples per axis".into()));
    }
    let base = Params::new(gamma, zeta, f_range.lo, f0_range.lo)?;
    Params::new(gamma, zeta, f_range.hi, f0_range.hi)?;
    let f0s = f0_range.linspace(grid.1);
    let samples = f_range
        .linspace(grid.0)
        .into_iter()
        .flat_map(|f| f0s.iter().map(move |&f0| vec![f, f0]))
        .collect();
    Ok(JumpManifoldSlice {
        fixed: vec![(ParamName::Gamma, gamma), (ParamName::Zeta, zeta)],
        free: vec![ParamName::F, ParamName::F0],
        points: slice_points(samples, |v| Params {
            f_amp: v[0],
            f0: v[1],
            ..base
        })?,
    })
}

/// A parameter value where the number of vertical tangencies changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BorderPoint {
    pub param: ParamName,
    pub value: f64,
    /// The coalescing root; absent for the degenerate boundary at zero force.
    pub a0_double: Option<f64>,
    pub count_below: Option<usize>,
    pub count_above: Option<usize>,
}

/// One comparison between the discriminant sign (from roots) and the
/// Sylvester determinant sign of `(J, J')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignCheck {
    pub value: f64,
    /// `(-1)^(n(n-1)/2) * sign(a_n) * sign(disc)`.
    pub expected: i8,
    pub determinant: i8,
}

impl SignCheck {
    pub fn agrees(&self) -> bool {
        self.expected == self.determinant
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BorderSearch {
    pub points: Vec<BorderPoint>,
    pub sign_checks: Vec<SignCheck>,
}

pub fn border_points_json(points: &[BorderPoint]) -> String {
    serde_json::to_string_pretty(points).expect("border points serialize")
}

/// Real-root data of J at one parameter value.
struct JumpRootState {
    value: f64,
    count: usize,
    disc_sign: i8,
    roots: RootSet,
    poly: RealPoly,
}

fn root_state(base: &Params, varied: ParamName, value: f64) -> Result<JumpRootState> {
    let pr = varied.with(base, value);
    let poly = build_jump_poly(&pr);
    let roots = all_roots(&poly)?;
    let mut count = 0;
    for a0 in positive_real_roots_with_multiplicity(&roots) {
        if tangency_from_root(&pr, a0)?.is_some() {
            count += 1;
        }
    }
    let disc_sign = discriminant_from_roots(&poly, &roots).sign;
    Ok(JumpRootState {
        value,
        count,
        disc_sign,
        roots,
        poly,
    })
}

/// Positive real roots with multiplicity. Unlike [`crate::poly::real_parts`],
/// nearly coalesced roots are not merged, so counts keep their parity
/// right up to a border.
fn positive_real_roots_with_multiplicity(rs: &RootSet) -> impl Iterator<Item = f64> + '_ {
    rs.roots
        .iter()
        .filter(|z| z.re > 0.0 && z.im.abs() < DEFAULT_IMAG_TOL * (1.0 + z.re.abs()))
        .map(|z| z.re)
}

/// Sign of `Res(p, p') = (-1)^(n(n-1)/2) a_n Disc(p)` predicted from the
/// discriminant, against the Sylvester determinant.
fn sign_check(st: &JumpRootState) -> Result<SignCheck> {
    let n = st.poly.degree();
    let parity = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    let lead = if st.poly.leading() > 0.0 { 1 } else { -1 };
    let det = sylvester_det_numeric(st.poly.coeffs(), st.poly.derivative().coeffs())?;
    Ok(SignCheck {
        value: st.value,
        expected: parity * lead * st.disc_sign,
        determinant: det.sign,
    })
}

/// Midpoint of the closest pair among roots with positive real part.
fn coalescing_root(rs: &RootSet) -> Option<f64> {
    let cand: Vec<_> = rs.roots.iter().filter(|z| z.re > 0.0).collect();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..cand.len() {
        for j in i + 1..cand.len() {
            let d = (cand[i] - cand[j]).norm();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, 0.5 * (cand[i].re + cand[j].re)));
            }
        }
    }
    best.map(|(_, x)| x)
}

/// Bisects `[lo, hi]`, whose positive-root counts differ, down to a single
/// count change. Steps follow the discriminant sign while it differs at the
/// ends and the root count otherwise.
fn locate(
    base: &Params,
    varied: ParamName,
    mut lo: JumpRootState,
    mut hi: JumpRootState,
    use_disc: bool,
    checks: &mut Vec<SignCheck>,
) -> Result<(JumpRootState, JumpRootState)> {
    for _ in 0..BISECTION_ITERATIONS {
        let width = hi.value - lo.value;
        if width <= 1e-14 * hi.value.abs().max(lo.value.abs()) {
            break;
        }
        let mid = root_state(base, varied, 0.5 * (lo.value + hi.value))?;
        checks.push(sign_check(&mid)?);
        let go_low = if use_disc && lo.disc_sign != hi.disc_sign {
            mid.disc_sign != lo.disc_sign
        } else {
            mid.count != lo.count
        };
        if go_low {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

fn border_from(varied: ParamName, lo: &JumpRootState, hi: &JumpRootState) -> BorderPoint {
    let mid = if lo.disc_sign != hi.disc_sign { lo } else { hi };
    BorderPoint {
        param: varied,
        value: 0.5 * (lo.value + hi.value),
        a0_double: coalescing_root(&mid.roots),
        count_below: Some(lo.count),
        count_above: Some(hi.count),
    }
}

/// Border set along one parameter with the default grid.
pub fn border_set(base: &Params, varied: ParamName, range: Interval) -> Result<Vec<BorderPoint>> {
    Ok(border_search(base, varied, range, DEFAULT_BORDER_GRID)?.points)
}

/// Values of `varied` in `range` where J gains or loses a pair of positive
/// roots, with the determinant cross-check history.
pub fn border_search(base: &Params, varied: ParamName, range: Interval, grid: usize) -> Result<BorderSearch> {
    if !range.hi.is_finite() || range.hi <= 0.0 || range.lo < 0.0 || grid < 2 {
        return Err(Error::InvalidParams(format!(
            "border range must be finite, non-negative and non-empty with >= 2 grid points, got [{}, {}]",
            range.lo, range.hi
        )));
    }
    let boundary = range.lo <= 0.0;
    if boundary && !varied.allows_zero() {
        return Err(Error::InvalidParams(format!("{} must stay positive", varied.name())));
    }
    varied.with(base, range.hi).validate()?;

    let mut values = range.linspace(grid);
    if boundary {
        // zero force is degenerate; start the grid just inside
        values[0] = range.hi * 1e-6;
    }
    let states: Vec<JumpRootState> = values
        .par_iter()
        .map(|&v| root_state(base, varied, v))
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    let mut checks = Vec::new();
    if boundary {
        points.push(BorderPoint {
            param: varied,
            value: 0.0,
            a0_double: None,
            count_below: None,
            count_above: Some(states[0].count),
        });
    }
    let mut states = states.into_iter();
    let mut prev = states.next().expect("grid has >= 2 points");
    for next in states {
        if prev.count == next.count {
            prev = next;
            continue;
        }
        let mut lo = root_state(base, varied, prev.value)?;
        while lo.count != next.count {
            let hi = root_state(base, varied, next.value)?;
            let (a, b) = locate(base, varied, lo, hi, true, &mut checks)?;
            let (a, b) = if a.count == b.count {
                // the discriminant tracked a coalescence off the positive axis
                let lo2 = root_state(base, varied, prev.value)?;
                let hi2 = root_state(base, varied, next.value)?;
                locate(base, varied, lo2, hi2, false, &mut checks)?
            } else {
                (a, b)
            };
            if a.count == b.count {
                return Err(Error::UnresolvedBracket {
                    lo: prev.value,
                    hi: next.value,
                });
            }
            points.push(border_from(varied, &a, &b));
            lo = b;
        }
        prev = next;
    }
    Ok(BorderSearch {
        points,
        sign_checks: checks,
    })
}

/// Two jump points sharing the same frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleOmega {
    pub f0: f64,
    pub omega: f64,
    pub a0_pair: (f64, f64),
}

pub fn double_omega_csv(events: &[DoubleOmega]) -> String {
    let mut out = String::from("f0,omega,a0_low,a0_high\n");
    for e in events {
        out.push_str(&csv_row(&[e.f0, e.omega, e.a0_pair.0, e.a0_pair.1]));
        out.push('\n');
    }
    out
}

/// Jump points ordered by A0.
fn by_a0(pr: &Params) -> Result<Vec<JumpPoint>> {
    let mut pts = jump_points(pr)?;
    pts.sort_by(|a, b| a.a0.total_cmp(&b.a0));
    Ok(pts)
}

/// F0 values in `f0_range` where two jump points share Omega.
pub fn double_omega_points(gamma: f64, zeta: f64, f_amp: f64, f0_range: Interval, grid: usize) -> Result<Vec<DoubleOmega>> {
    if !(f0_range.lo > 0.0) || !f0_range.hi.is_finite() || grid < 2 {
        return Err(Error::InvalidParams("double-omega range must be positive and finite".into()));
    }
    let base = Params::new(gamma, zeta, f_amp, f0_range.lo)?;
    let f0s = f0_range.linspace(grid);
    let sets: Vec<Vec<JumpPoint>> = f0s
        .par_iter()
        .map(|&f0| by_a0(&ParamName::F0.with(&base, f0)))
        .collect::<Result<_>>()?;

    let mut events = Vec::new();
    for k in 0..f0s.len() - 1 {
        let (a, b) = (&sets[k], &sets[k + 1]);
        if a.len() != b.len() {
            continue;
        }
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                let gap = |s: &[JumpPoint]| s[i].omega - s[j].omega;
                if gap(a).signum() == gap(b).signum() {
                    continue;
                }
                if let Some(ev) = bisect_gap(&base, (f0s[k], f0s[k + 1]), a.len(), (i, j), gap(a))? {
                    events.push(ev);
                }
            }
        }
    }
    events.sort_by(|a, b| a.f0.total_cmp(&b.f0));
    Ok(events)
}

fn bisect_gap(base: &Params, (mut lo, mut hi): (f64, f64), len: usize, (i, j): (usize, usize), gap_lo: f64) -> Result<Option<DoubleOmega>> {
    let mut last = None;
    for _ in 0..BISECTION_ITERATIONS {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let pts = by_a0(&ParamName::F0.with(base, mid))?;
        if pts.len() != len {
            return Ok(None);
        }
        let gap = pts[i].omega - pts[j].omega;
        if gap.signum() == gap_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        last = Some(pts);
    }
    Ok(last.map(|pts| DoubleOmega {
        f0: 0.5 * (lo + hi),
        omega: 0.5 * (pts[i].omega + pts[j].omega),
        a0_pair: (pts[i].a0, pts[j].a0),
    }))
}
