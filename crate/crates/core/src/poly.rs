//! Dense univariate polynomials with `f64` coefficients: evaluation,
//! derivative, Aberth–Ehrlich root finding, and root-based discriminants.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::signed::SignedLog;

/// Default tolerance on `|Im z| / (1 + |Re z|)` for accepting a root as real.
pub const DEFAULT_IMAG_TOL: f64 = 1e-7;
/// Roots closer than this are reported once by [`real_roots`].
pub const DEDUP_SPACING: f64 = 1e-9;

const MAX_ITERATIONS: usize = 200;
const STEP_TOL: f64 = 1e-13;

/// Polynomial with ascending coefficients. Trailing zeros are trimmed; the
/// zero polynomial is `[0.0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    /// Monic polynomial with the given real roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= r * a;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().expect("non-empty")
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Largest monomial magnitude `max_k |c_k x^k|`, the scale for relative
    /// residuals.
    pub fn max_monomial(&self, x: f64) -> f64 {
        let mut p = 1.0;
        let mut m = 0.0f64;
        for c in &self.coeffs {
            m = m.max((c * p).abs());
            p *= x;
        }
        m
    }

    /// `|p(x)| / max_k |c_k x^k|`; zero when every monomial vanishes.
    pub fn relative_residual(&self, x: f64) -> f64 {
        let scale = self.max_monomial(x);
        if scale == 0.0 {
            0.0
        } else {
            self.eval(x).abs() / scale
        }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut c = vec![0.0];
        c.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a / (k + 1) as f64),
        );
        Self::new(c)
    }
}

/// All complex roots of a polynomial with per-root diagnostics.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// Size of the root cluster each root belongs to.
    pub multiplicity: Vec<usize>,
    /// Cluster label per root; roots whose inclusion disks overlap share one.
    pub cluster: Vec<usize>,
    /// `|p(root)|` on the input polynomial.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl RootSet {
    /// Cluster centroids with their multiplicity estimates.
    pub fn clusters(&self) -> Vec<(Complex64, usize)> {
        let mut labels: Vec<usize> = self.cluster.clone();
        labels.sort_unstable();
        labels.dedup();
        labels
            .into_iter()
            .map(|l| {
                let members: Vec<Complex64> = self
                    .roots
                    .iter()
                    .zip(&self.cluster)
                    .filter(|(_, c)| **c == l)
                    .map(|(z, _)| *z)
                    .collect();
                let m = members.len();
                (members.into_iter().sum::<Complex64>() / m as f64, m)
            })
            .collect()
    }
}

/// Power-of-two scale `s` for `x = s*y` that minimizes the spread of
/// `log|c_k s^k|` over the nonzero coefficients.
fn balancing_exponent(coeffs: &[f64]) -> i32 {
    let pts: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| (k as f64, c.abs().log2()))
        .collect();
    if pts.len() < 2 {
        return 0;
    }
    let spread = |t: f64| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (k, l) in &pts {
            let v = l + k * t;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    };
    let span = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
        - pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
        + 1.0;
    let (mut a, mut b) = (-span, span);
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if spread(m1) <= spread(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    (0.5 * (a + b)).round().clamp(-1000.0, 1000.0) as i32
}

/// Initial approximations on circles whose radii come from the upper convex
/// hull of `(k, log|c_k|)`.
fn newton_polygon_start(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| (k, c.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (k1, l1) = hull[hull.len() - 2];
            let (k2, l2) = hull[hull.len() - 1];
            // Drop the middle point when it lies on or below the chord.
            let cross = (k2 as f64 - k1 as f64) * (p.1 - l1) - (l2 - l1) * (p.0 as f64 - k1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma = 0.7;
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (k1, l1) = w[0];
        let (k2, l2) = w[1];
        let m = k2 - k1;
        let r = ((l1 - l2) / m as f64).exp();
        for j in 0..m {
            let ang = 2.0 * PI * j as f64 / m as f64 + 2.0 * PI * k2 as f64 / n as f64 + sigma;
            out.push(Complex64::from_polar(r, ang));
        }
    }
    out
}

/// p(z) and the Newton correction p(z)/p'(z), evaluated through the
/// reversed polynomial when |z| > 1.
fn newton_ratio(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let n = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = Complex64::new(coeffs[n], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut bound = coeffs[n].abs();
        let az = z.norm();
        for &c in coeffs[..n].iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            bound = bound * az + c.abs();
        }
        (p, p / dp, bound)
    } else {
        let w = z.inv();
        let aw = w.norm();
        let mut r = Complex64::new(coeffs[0], 0.0);
        let mut dr = Complex64::new(0.0, 0.0);
        let mut bound = coeffs[0].abs();
        for &c in coeffs[1..].iter() {
            dr = dr * w + r;
            r = r * w + c;
            bound = bound * aw + c.abs();
        }
        // p(z) = z^n r(w); p'(z)/p(z) = (n - w r'(w)/r(w)) / z
        let zn = z.powi(n as i32);
        let ratio = z / (Complex64::new(n as f64, 0.0) - w * dr / r);
        (zn * r, ratio, bound * z.norm().powi(n as i32))
    }
}

fn weierstrass_radii(coeffs: &[f64], roots: &[Complex64]) -> Vec<f64> {
    let n = roots.len();
    let lead = coeffs[n];
    roots
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let (p, _, bound) = newton_ratio(coeffs, z);
            let mut denom = SignedLog::from_f64(lead.abs());
            for (j, &w) in roots.iter().enumerate() {
                if j != i {
                    denom = denom.mul_f64((z - w).norm());
                }
            }
            let num = p.norm().max(4.0 * f64::EPSILON * bound);
            let r = n as f64 * (num.ln() - denom.ln_abs).exp();
            r.max(4.0 * f64::EPSILON * z.norm())
        })
        .collect()
}

/// Connected components of overlapping inclusion disks.
fn cluster_labels(roots: &[Complex64], radii: &[f64]) -> Vec<usize> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= radii[i] + radii[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

fn sizes(labels: &[usize]) -> Vec<usize> {
    labels
        .iter()
        .map(|c| labels.iter().filter(|d| *d == c).count())
        .collect()
}

/// Aberth–Ehrlich iteration on a polynomial with nonzero constant term and
/// degree >= 1. Returns roots of `coeffs` and the iteration count.
fn aberth(coeffs: &[f64]) -> (Vec<Complex64>, usize, bool) {
    let n = coeffs.len() - 1;
    let mut z = newton_polygon_start(coeffs);
    let mut done = vec![false; n];
    let mut iters = 0;
    while iters < MAX_ITERATIONS && done.iter().any(|d| !d) {
        iters += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, ratio, bound) = newton_ratio(coeffs, z[i]);
            if p.norm() <= 4.0 * f64::EPSILON * bound {
                done[i] = true;
                continue;
            }
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !w.is_finite() {
                done[i] = true;
                continue;
            }
            z[i] -= w;
            if w.norm() <= STEP_TOL * z[i].norm() {
                done[i] = true;
            }
        }
    }
    let converged = done.iter().all(|d| *d);
    (z, iters, converged)
}

/// One or two Newton steps on the balanced polynomial, accepted only when
/// they reduce the residual.
fn polish(coeffs: &[f64], z: &mut [Complex64]) {
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (p, ratio, _) = newton_ratio(coeffs, *zi);
            if !ratio.is_finite() {
                break;
            }
            let cand = *zi - ratio;
            let (pc, _, _) = newton_ratio(coeffs, cand);
            if pc.norm() < p.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
}

/// Pairs roots of a real polynomial into exact conjugates; unpaired roots
/// are projected onto the real axis. Two roots pair only when their
/// conjugate mismatch is below their distance from the real axis.
fn enforce_conjugate_symmetry(z: &mut [Complex64]) {
    let upper: Vec<usize> = (0..z.len()).filter(|&i| z[i].im > 0.0).collect();
    let lower: Vec<usize> = (0..z.len()).filter(|&i| z[i].im < 0.0).collect();
    let mut pairs: Vec<(f64, usize, usize)> = upper
        .iter()
        .flat_map(|&i| lower.iter().map(move |&j| (i, j)))
        .map(|(i, j)| ((z[i] - z[j].conj()).norm(), i, j))
        .filter(|&(d, i, j)| d < z[i].im.abs().max(z[j].im.abs()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used = vec![false; z.len()];
    for (_, i, j) in pairs {
        if used[i] || used[j] {
            continue;
        }
        used[i] = true;
        used[j] = true;
        let m = (z[i] + z[j].conj()) * 0.5;
        z[i] = m;
        z[j] = m.conj();
    }
    for (zi, u) in z.iter_mut().zip(&used) {
        if !u {
            zi.im = 0.0;
        }
    }
}

/// All complex roots by Aberth–Ehrlich simultaneous iteration on the
/// coefficient-balanced polynomial, Newton-polished.
pub fn all_roots(p: &RealPoly) -> Result<RootSet> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let c = p.coeffs();
    let zeros = c.iter().take_while(|x| **x == 0.0).count();
    let reduced = &c[zeros..];

    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let mut iterations = 0;
    if reduced.len() > 1 {
        let e = balancing_exponent(reduced);
        let mut b: Vec<f64> = reduced
            .iter()
            .enumerate()
            .map(|(k, a)| a * 2f64.powi(e * k as i32))
            .collect();
        let max = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let norm = 2f64.powi(-(max.log2().floor() as i32));
        b.iter_mut().for_each(|x| *x *= norm);

        let (mut z, it, ok) = aberth(&b);
        polish(&b, &mut z);
        enforce_conjugate_symmetry(&mut z);
        iterations = it;
        let s = 2f64.powi(e);
        roots.extend(z.into_iter().map(|y| y * s));

        let radii: Vec<f64> = weierstrass_radii(&b, &roots[zeros..].iter().map(|r| r / s).collect::<Vec<_>>())
            .into_iter()
            .map(|r| r * s)
            .collect();
        let mut cluster = vec![usize::MAX; zeros];
        cluster.extend(cluster_labels(&roots[zeros..], &radii));
        let multiplicity = sizes(&cluster);
        let residuals: Vec<f64> = roots.iter().map(|r| p.eval_complex(*r).norm()).collect();
        if !ok {
            return Err(Error::NonConvergence {
                iterations,
                max_residual: residuals.iter().fold(0.0, |m: f64, x| m.max(*x)),
                roots: roots.iter().map(|r| (r.re, r.im)).collect(),
            });
        }
        return Ok(RootSet {
            roots,
            multiplicity,
            cluster,
            residuals,
            iterations,
        });
    }
    let residuals = vec![0.0; zeros];
    Ok(RootSet {
        multiplicity: vec![zeros; zeros],
        cluster: vec![usize::MAX; zeros],
        roots,
        residuals,
        iterations,
    })
}

/// Real roots inside the open `domain`, sorted ascending and de-duplicated.
pub fn real_roots(p: &RealPoly, imag_tol: f64, domain: Interval) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let rs = all_roots(p)?;
    Ok(real_parts(&rs, imag_tol, domain))
}

/// The real-root filter of [`real_roots`] applied to an existing root set.
pub fn real_parts(rs: &RootSet, imag_tol: f64, domain: Interval) -> Vec<f64> {
    let mut out: Vec<f64> = rs
        .roots
        .iter()
        .filter(|z| z.im.abs() < imag_tol * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .filter(|x| domain.contains_open(*x))
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < DEDUP_SPACING);
    out
}

/// `lead^(2n-2) * prod_{i<j} (r_i - r_j)^2` from a computed root set, kept
/// in sign/log form. Root sets from [`all_roots`] are conjugate-closed, so
/// the product is real up to rounding.
pub fn discriminant_from_roots(p: &RealPoly, rs: &RootSet) -> SignedLog {
    let n = rs.roots.len();
    if n < 2 {
        return SignedLog::ONE;
    }
    let mut acc = Complex64::new(1.0, 0.0);
    let mut ln_abs = (2 * n - 2) as f64 * p.leading().abs().ln();
    for i in 0..n {
        for j in i + 1..n {
            let d = rs.roots[i] - rs.roots[j];
            let d2 = d * d;
            let m = d2.norm();
            if m == 0.0 {
                return SignedLog::ZERO;
            }
            acc *= d2 / m;
            ln_abs += m.ln();
            let a = acc.norm();
            acc /= a;
            ln_abs += a.ln();
        }
    }
    if acc.re == 0.0 {
        return SignedLog::ZERO;
    }
    // lead^(2n-2) has even power, so only the product decides the sign.
    SignedLog {
        sign: if acc.re > 0.0 { 1 } else { -1 },
        ln_abs: ln_abs + acc.re.abs().ln(),
    }
}
