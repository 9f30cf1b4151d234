//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use duffing_jump::algebra::ratpoly::Monomial;
use duffing_jump::algebra::{derived, rat, sylvester_det_numeric, RatPoly, Symbol};
use duffing_jump::jump::{
    border_set, build_jump_poly, count_solutions, double_omega_points, jump_points, omega_sq_at,
    positive_jump_roots, tangency_residuals, ParamName, DEFAULT_DOUBLE_OMEGA_GRID,
};
use duffing_jump::poly::{all_roots, discriminant_from_roots, RealPoly};
use duffing_jump::sim::{bifurcation_sweep, detect_jumps, Direction, SweepOptions};
use duffing_jump::singular::{default_scan, df_domega_factored};
use duffing_jump::steady::{build_f_poly, steady_states_at, Params};
use duffing_jump::Interval;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use Symbol::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

/// Vertical tangencies at the reference point, `(Omega, A0, A1)`.
const REFERENCE_TANGENCIES: [(f64, f64, f64); 4] = [
    (0.576122891, 0.846633527, 1.882759746),
    (0.643209846, 0.755260872, 2.032001367),
    (0.690545624, 1.583776750, 0.691474188),
    (0.711882658, 0.425889574, 2.806379023),
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let used = start.elapsed();
    ensure(used <= budget, || format!("took {:.2?}, budget {:.0?}", used, budget))
}

fn err(e: duffing_jump::Error) -> String {
    e.to_string()
}

fn tangency_table() -> Check {
    let start = Instant::now();
    let pts = jump_points(&Params::reference(0.4)).map_err(err)?;
    within_budget(start, Duration::from_secs(1))?;
    ensure(pts.len() == 4, || format!("{} points", pts.len()))?;
    let mut worst = 0.0f64;
    for (p, (w, a0, a1)) in pts.iter().zip(REFERENCE_TANGENCIES) {
        worst = worst.max((p.omega - w).abs()).max((p.a0 - a0).abs()).max((p.a1 - a1).abs());
    }
    ensure(worst < 1e-6, || format!("max abs error {worst:.3e}"))?;
    Ok(format!("4 points, max abs error {worst:.1e}, {:.3?}", start.elapsed()))
}

fn interior(points: &[duffing_jump::jump::BorderPoint]) -> Vec<&duffing_jump::jump::BorderPoint> {
    points.iter().filter(|p| p.value > 0.0).collect()
}

fn f0_border() -> Check {
    let start = Instant::now();
    let base = Params::reference(0.4);
    let pts = border_set(&base, ParamName::F0, Interval::new(0.0, 10.0).map_err(err)?).map_err(err)?;
    within_budget(start, Duration::from_secs(30))?;
    let inner = interior(&pts);
    let want = [0.092075, 0.738510, 6.532092];
    ensure(inner.len() == want.len(), || format!("{} interior points", inner.len()))?;
    for (p, w) in inner.iter().zip(want) {
        ensure((p.value - w).abs() < 1e-4, || format!("{} vs {w}", p.value))?;
    }
    let counts: Vec<Option<usize>> =
        std::iter::once(inner[0].count_below).chain(inner.iter().map(|p| p.count_above)).collect();
    ensure(counts == [Some(2), Some(4), Some(2), Some(0)], || format!("counts {counts:?}"))?;
    Ok(format!(
        "F0 = {:.6}, {:.6}, {:.6}; counts 2/4/2/0; {:.2?}",
        inner[0].value,
        inner[1].value,
        inner[2].value,
        start.elapsed()
    ))
}

fn f_border() -> Check {
    let base = Params::reference(0.5);
    let pts = border_set(&base, ParamName::F, Interval::new(0.0, 1.0).map_err(err)?).map_err(err)?;
    let inner = interior(&pts);
    let want = [0.0269989, 0.0779256, 0.5448595];
    ensure(inner.len() == want.len(), || format!("{} interior points", inner.len()))?;
    for (p, w) in inner.iter().zip(want) {
        ensure((p.value - w).abs() < 1e-4, || format!("{} vs {w}", p.value))?;
    }
    let a0 = inner[2].a0_double.ok_or("no double root at the last border")?;
    ensure((a0 - 1.238340).abs() < 1e-4, || format!("double root A0 {a0}"))?;
    Ok(format!(
        "F = {:.7}, {:.7}, {:.7}; double root A0 = {a0:.6}",
        inner[0].value, inner[1].value, inner[2].value
    ))
}

fn double_omega() -> Check {
    let ev = double_omega_points(0.0783, 0.025, 0.1, Interval::new(0.1, 0.7).map_err(err)?, DEFAULT_DOUBLE_OMEGA_GRID)
        .map_err(err)?;
    let want = [
        (0.301007, 0.597114, 0.679284, 1.411787),
        (0.429166, 0.714419, 0.459118, 1.628271),
    ];
    ensure(ev.len() == 2, || format!("{} events", ev.len()))?;
    for (e, w) in ev.iter().zip(want) {
        let got = [e.f0, e.omega, e.a0_pair.0, e.a0_pair.1];
        let exp = [w.0, w.1, w.2, w.3];
        ensure(got.iter().zip(exp).all(|(g, x)| (g - x).abs() < 1e-4), || format!("{got:?} vs {exp:?}"))?;
    }
    let pr = Params::reference(0.36);
    let mut most = 0;
    for w in Interval::new(0.55, 0.75).map_err(err)?.linspace(401) {
        most = most.max(count_solutions(&pr, w).map_err(err)?);
    }
    ensure(most == 5, || format!("max count {most} at F0 = 0.36"))?;
    Ok(format!("F0 = {:.6}, {:.6}; max count 5 at F0 = 0.36", ev[0].f0, ev[1].f0))
}

fn singular_scan() -> Check {
    let start = Instant::now();
    let report = default_scan().map_err(err)?;
    within_budget(start, Duration::from_secs(10))?;
    ensure(report.violations.is_empty(), || format!("{} violations", report.violations.len()))?;
    Ok(format!("0 violations over {} points, {:.2?}", report.checked, start.elapsed()))
}

fn term(c: i64, powers: &[(Symbol, u32)]) -> RatPoly {
    RatPoly::from_terms([(rat(c, 1), powers)])
}

fn sum(terms: Vec<RatPoly>) -> RatPoly {
    terms.iter().fold(RatPoly::zero(), |acc, t| &acc + t)
}

/// Published coefficients of J, by power of A0.
fn published_jump() -> Vec<(usize, RatPoly)> {
    vec![
        (21, term(4000, &[(Gamma, 7), (Zeta, 2)])),
        (18, term(-16000, &[(Gamma, 6), (Zeta, 2), (F0, 1)])),
        (17, term(600, &[(F, 2), (Gamma, 6)])),
        (
            15,
            sum(vec![
                term(23880, &[(Gamma, 5), (Zeta, 2), (F0, 2)]),
                term(-480, &[(F, 2), (Gamma, 5), (Zeta, 2)]),
            ]),
        ),
        (14, term(-1920, &[(F, 2), (Gamma, 5), (F0, 1)])),
        (
            12,
            sum(vec![
                term(768, &[(F, 2), (Gamma, 4), (Zeta, 2), (F0, 1)]),
                term(-15512, &[(Gamma, 4), (Zeta, 2), (F0, 3)]),
            ]),
        ),
        (
            11,
            sum(vec![term(36, &[(F, 4), (Gamma, 4)]), term(2166, &[(F, 2), (Gamma, 4), (F0, 2)])]),
        ),
        (
            9,
            sum(vec![
                term(3248, &[(Gamma, 3), (Zeta, 2), (F0, 4)]),
                term(-72, &[(F, 2), (Gamma, 3), (Zeta, 2), (F0, 2)]),
            ]),
        ),
        (
            8,
            sum(vec![
                term(36, &[(F, 4), (Gamma, 3), (F0, 1)]),
                term(-978, &[(F, 2), (Gamma, 3), (F0, 3)]),
            ]),
        ),
        (
            6,
            sum(vec![
                term(528, &[(Gamma, 2), (Zeta, 2), (F0, 5)]),
                term(-240, &[(F, 2), (Gamma, 2), (Zeta, 2), (F0, 3)]),
            ]),
        ),
        (
            5,
            sum(vec![
                term(9, &[(F, 4), (Gamma, 2), (F0, 2)]),
                term(138, &[(F, 2), (Gamma, 2), (F0, 4)]),
            ]),
        ),
        (
            3,
            sum(vec![
                term(24, &[(F, 2), (Gamma, 1), (Zeta, 2), (F0, 4)]),
                term(-152, &[(Gamma, 1), (Zeta, 2), (F0, 6)]),
            ]),
        ),
        (2, term(-6, &[(F, 2), (Gamma, 1), (F0, 5)])),
        (0, term(8, &[(Zeta, 2), (F0, 7)])),
    ]
}

/// Published rows of f, by power of A0. The A0^5 row is not usable.
fn published_steady() -> Vec<(usize, RatPoly)> {
    vec![
        (9, term(25, &[(Gamma, 3)])),
        (8, RatPoly::zero()),
        (7, term(-20, &[(X, 1), (Gamma, 2)])),
        (6, term(-15, &[(Gamma, 2), (F0, 1)])),
        (4, term(16, &[(X, 1), (Gamma, 1), (F0, 1)])),
        (3, sum(vec![term(-9, &[(Gamma, 1), (F0, 2)]), term(6, &[(Gamma, 1), (F, 2)])])),
        (2, sum(vec![term(-4, &[(F0, 1), (X, 2)]), term(-16, &[(Zeta, 2), (X, 1), (F0, 1)])])),
        (1, term(4, &[(X, 1), (F0, 2)])),
        (0, term(-1, &[(F0, 3)])),
    ]
}

fn single_monomial(p: &RatPoly) -> Option<Monomial> {
    (p.num_terms() == 1).then(|| *p.terms().next().unwrap().0)
}

/// Checks `derived[k] == s * published[k]` for one rational `s` fixed by
/// the first row. Returns the number of nonzero rows compared.
fn matches_up_to_factor(derived_coeffs: &[RatPoly], published: &[(usize, RatPoly)]) -> Result<usize, String> {
    let (k0, p0) = &published[0];
    let m = single_monomial(p0).ok_or("first published row must be a monomial")?;
    let factor = derived_coeffs[*k0].coefficient(&m) / p0.coefficient(&m);
    let mut nonzero = 0;
    for (k, p) in published {
        let d = derived_coeffs.get(*k).cloned().unwrap_or_else(RatPoly::zero);
        ensure(d == p.scale(&factor), || format!("A0^{k}: derived {d} vs published {p}"))?;
        nonzero += usize::from(!p.is_zero());
    }
    Ok(nonzero)
}

fn coefficient_tables() -> Check {
    let tables = derived();
    let jump = tables.jump.coeffs_in(A0);
    let published = published_jump();
    matches_up_to_factor(&jump, &published)?;
    let pattern: Vec<usize> = (0..jump.len()).filter(|k| !jump[*k].is_zero()).rev().collect();
    let want: Vec<usize> = published.iter().map(|(k, _)| *k).collect();
    ensure(pattern == want, || format!("exponent pattern {pattern:?} vs {want:?}"))?;
    let steady = tables.steady.coeffs_in(A0);
    let rows = matches_up_to_factor(&steady, &published_steady())?;
    Ok(format!(
        "J: {} nonzero coefficients match; f: {rows} nonzero rows match; derived c5 = {}",
        pattern.len(),
        steady[5]
    ))
}

fn random_params(rng: &mut ChaCha8Rng) -> Params {
    Params::new(
        rng.gen_range(0.02..0.5),
        rng.gen_range(0.005..0.1),
        rng.gen_range(0.02..0.5),
        rng.gen_range(0.05..2.0),
    )
    .expect("sampled parameters are valid")
}

fn closed_form_residuals() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut sets, mut roots, mut draws) = (0, 0, 0);
    let mut worst = 0.0f64;
    while sets < 100 {
        draws += 1;
        ensure(draws < 100_000, || "too few parameter sets with tangencies".into())?;
        let pr = random_params(&mut rng);
        if jump_points(&pr).map_err(err)?.is_empty() {
            continue;
        }
        sets += 1;
        for a0 in positive_jump_roots(&pr).map_err(err)? {
            let Ok(x) = omega_sq_at(&pr, a0) else { continue };
            if !(x > 0.0) {
                continue;
            }
            let (r1, r2) = tangency_residuals(&pr, x.sqrt(), a0).map_err(err)?;
            roots += 1;
            worst = worst.max(r1).max(r2);
            ensure(r1 < 1e-8 && r2 < 1e-8, || format!("{pr:?} A0 = {a0}: residuals {r1:.2e}, {r2:.2e}"))?;
        }
    }
    Ok(format!("{sets} parameter sets, {roots} roots, max relative residual {worst:.1e}"))
}

/// Smallest relative a1 distance from a simulated point to the asymptotic
/// response at the same frequency.
fn proximity(pr: &Params, omega: f64, a1_sim: f64) -> Result<f64, String> {
    let states = steady_states_at(pr, omega, false).map_err(err)?;
    Ok(states
        .iter()
        .map(|s| (a1_sim - s.a1).abs() / s.a1.abs())
        .fold(f64::INFINITY, f64::min))
}

fn sweep_agreement() -> Check {
    let start = Instant::now();
    let pr = Params::reference(0.4);
    let sweep =
        bifurcation_sweep(&pr, Interval::new(0.45, 0.85).map_err(err)?, 161, SweepOptions::default()).map_err(err)?;
    let elapsed = start.elapsed();
    let up = sweep.branch(Direction::Up);
    let down = sweep.branch(Direction::Down);
    let mut failures = Vec::new();
    let mut gap = 0.0f64;
    for (u, d) in up.iter().zip(down.iter().rev()) {
        gap = gap.max((u.a1_sim - d.a1_sim).abs());
    }
    if gap < 0.1 {
        failures.push(format!("no hysteresis (max branch gap {gap:.3})"));
    }
    let mut ends = Vec::new();
    for (dir, branch) in [("up", &up), ("down", &down)] {
        for w in detect_jumps(branch) {
            let (nearest, rel) = REFERENCE_TANGENCIES
                .iter()
                .map(|t| (t.0, (w - t.0).abs() / t.0))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            ends.push(format!("{dir} {w:.4} vs {nearest:.4} ({:.1}%)", 100.0 * rel));
            if rel > 0.02 {
                failures.push(format!("{dir} jump at {w:.4} is {:.1}% from {nearest:.4}", 100.0 * rel));
            }
        }
    }
    let mut worst = (0.0f64, 0.0);
    for r in &sweep.records {
        let d = proximity(&pr, r.omega, r.a1_sim)?;
        if d > worst.0 {
            worst = (d, r.omega);
        }
    }
    if worst.0 > 0.03 {
        failures.push(format!("a1 off the asymptotic response by {:.1}% at Omega = {:.4}", 100.0 * worst.0, worst.1));
    }
    if elapsed > Duration::from_secs(120) {
        failures.push(format!("took {elapsed:.2?}"));
    }
    let summary = format!("jumps: {}; {:.1?}", ends.join(", "), elapsed);
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join("; ")))
    }
}

fn factor_finite_difference(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let pr = random_params(rng);
        let w = rng.gen_range(0.2..2.0);
        let a0 = rng.gen_range(0.1..3.0);
        let (a, b, c, d) = df_domega_factored(&pr, w, a0);
        let exact = a * b * c * d;
        let h = 1e-6 * w;
        let up = build_f_poly(&pr, w + h).map_err(err)?.eval(a0);
        let dn = build_f_poly(&pr, w - h).map_err(err)?.eval(a0);
        let fd = (up - dn) / (2.0 * h);
        let scale = build_f_poly(&pr, w).map_err(err)?.max_monomial(a0) / w;
        let rel = (fd - exact).abs() / exact.abs().max(scale);
        worst = worst.max(rel);
    }
    ensure(worst < 1e-6, || format!("finite difference off by {worst:.2e}"))?;
    Ok(worst)
}

fn sign_agreement(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut agree = 0;
    for _ in 0..50 {
        let pr = random_params(rng);
        let p = build_jump_poly(&pr);
        let n = p.degree();
        let rs = all_roots(&p).map_err(err)?;
        let parity = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
        let lead = if p.leading() > 0.0 { 1 } else { -1 };
        let expected = parity * lead * discriminant_from_roots(&p, &rs).sign;
        let det = sylvester_det_numeric(p.coeffs(), p.derivative().coeffs()).map_err(err)?;
        agree += usize::from(expected == det.sign);
    }
    ensure(agree == 50, || format!("signs agree on {agree}/50"))?;
    Ok(agree)
}

fn planted(roots: &[Complex64]) -> RealPoly {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= r * a;
        }
        c = next;
    }
    RealPoly::new(c.into_iter().map(|z| z.re).collect())
}

fn separated_roots(rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let target = rng.gen_range(1..=12);
        let mut roots: Vec<Complex64> = Vec::new();
        while roots.len() < target {
            let r = rng.gen_range(0.2..2.0);
            let ang: f64 = rng.gen_range(0.0..PI);
            if rng.gen_bool(0.5) || roots.len() + 2 > target {
                roots.push(Complex64::new(if ang > PI / 2.0 { -r } else { r }, 0.0));
            } else {
                let z = Complex64::from_polar(r, ang.clamp(0.3, PI - 0.3));
                roots.push(z);
                roots.push(z.conj());
            }
        }
        let separated = (0..roots.len()).all(|i| (i + 1..roots.len()).all(|j| (roots[i] - roots[j]).norm() >= 0.3));
        if separated {
            return roots;
        }
    }
}

fn planted_roots(rng: &mut ChaCha8Rng) -> Result<(usize, f64), String> {
    let mut worst = 0.0f64;
    let mut max_degree = 0;
    for _ in 0..200 {
        let roots = separated_roots(rng);
        max_degree = max_degree.max(roots.len());
        let rs = all_roots(&planted(&roots)).map_err(err)?;
        ensure(rs.roots.len() == roots.len(), || "root count mismatch".into())?;
        for r in &roots {
            let best = rs.roots.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
    }
    ensure(worst < 1e-10, || format!("planted root missed by {worst:.2e}"))?;
    Ok((max_degree, worst))
}

fn hygiene() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fd = factor_finite_difference(&mut rng)?;
    let agree = sign_agreement(&mut rng)?;
    let (deg, miss) = planted_roots(&mut rng)?;
    Ok(format!(
        "factor FD error {fd:.1e}; sign agreement {agree}/50; planted roots to {miss:.1e} up to degree {deg}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("reference tangencies", tangency_table),
        ("border set in F0", f0_border),
        ("border set in F", f_border),
        ("double-frequency events", double_omega),
        ("no singular points", singular_scan),
        ("derived coefficients", coefficient_tables),
        ("closed-form frequency residuals", closed_form_residuals),
        ("simulation agreement", sweep_agreement),
        ("numerical hygiene", hygiene),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
