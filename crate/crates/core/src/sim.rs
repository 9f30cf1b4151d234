//! Direct time integration of `y'' + 2 zeta y' + gamma y^3 = F0 + F cos(Omega t)`
//! and frequency sweeps with state continuation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::output::csv_row;
use crate::steady::Params;

pub const DEFAULT_STEPS_PER_PERIOD: usize = 2000;
pub const DEFAULT_TRANSIENT_PERIODS: usize = 400;
pub const DEFAULT_MEASURE_PERIODS: usize = 100;
pub const MIN_STEPS_PER_PERIOD: usize = 500;
/// `|y|` beyond this counts as divergence.
pub const DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscState {
    pub y: f64,
    pub v: f64,
    pub t: f64,
}

impl OscState {
    pub fn at_rest(y: f64) -> Self {
        Self { y, v: 0.0, t: 0.0 }
    }
}

/// Fixed-step RK4 stepper for one drive frequency.
#[derive(Debug, Clone, Copy)]
struct Stepper {
    pr: Params,
    omega: f64,
    h: f64,
}

impl Stepper {
    fn new(pr: &Params, omega: f64, steps_per_period: usize) -> Result<Self> {
        pr.validate()?;
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParams(format!("omega must be > 0, got {omega}")));
        }
        if steps_per_period < MIN_STEPS_PER_PERIOD {
            return Err(Error::InvalidParams(format!(
                "steps per period must be >= {MIN_STEPS_PER_PERIOD}, got {steps_per_period}"
            )));
        }
        Ok(Self {
            pr: *pr,
            omega,
            h: std::f64::consts::TAU / (omega * steps_per_period as f64),
        })
    }

    fn accel(&self, y: f64, v: f64, t: f64) -> f64 {
        -2.0 * self.pr.zeta * v - self.pr.gamma * y * y * y + self.pr.f0 + self.pr.f_amp * (self.omega * t).cos()
    }

    fn step(&self, s: OscState, t_next: f64) -> OscState {
        let h = self.h;
        let (y, v, t) = (s.y, s.v, s.t);
        let k1y = v;
        let k1v = self.accel(y, v, t);
        let k2y = v + 0.5 * h * k1v;
        let k2v = self.accel(y + 0.5 * h * k1y, k2y, t + 0.5 * h);
        let k3y = v + 0.5 * h * k2v;
        let k3v = self.accel(y + 0.5 * h * k2y, k3y, t + 0.5 * h);
        let k4y = v + h * k3v;
        let k4v = self.accel(y + h * k3y, k4y, t + h);
        OscState {
            y: y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
            v: v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
            t: t_next,
        }
    }

    /// Runs `n` steps from `s`, calling `visit` on every new state. Times
    /// are `t0 + i h`, so no drift accumulates.
    fn run(&self, s: OscState, n: usize, direction: &'static str, mut visit: impl FnMut(&OscState)) -> Result<OscState> {
        let t0 = s.t;
        let mut cur = s;
        for i in 1..=n {
            cur = self.step(cur, t0 + i as f64 * self.h);
            if !(cur.y.abs() <= DIVERGENCE_BOUND) || !cur.v.is_finite() {
                return Err(Error::Divergence {
                    t: cur.t,
                    omega: self.omega,
                    direction,
                });
            }
            visit(&cur);
        }
        Ok(cur)
    }
}

/// Equally spaced states, `steps_per_period` per drive period, starting
/// with the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub omega: f64,
    pub steps_per_period: usize,
    pub states: Vec<OscState>,
}

impl Trajectory {
    pub fn last(&self) -> OscState {
        *self.states.last().expect("trajectory holds the initial state")
    }
}

/// Integrates for `periods` drive periods.
pub fn integrate(pr: &Params, omega: f64, init: OscState, periods: usize, steps_per_period: usize) -> Result<Trajectory> {
    let stepper = Stepper::new(pr, omega, steps_per_period)?;
    let n = periods * steps_per_period;
    let mut states = Vec::with_capacity(n + 1);
    states.push(init);
    stepper.run(init, n, "none", |s| states.push(*s))?;
    Ok(Trajectory {
        omega,
        steps_per_period,
        states,
    })
}

/// Running mean and first Fourier coefficient of y at the drive frequency.
/// Fed one sample per step over whole periods, the rectangle rule is exact
/// for every harmonic below the sampling rate.
#[derive(Debug, Clone, Copy)]
pub struct SteadyMeter {
    omega: f64,
    n: usize,
    sum: f64,
    sum_cos: f64,
    sum_sin: f64,
}

impl SteadyMeter {
    pub fn new(omega: f64) -> Self {
        Self {
            omega,
            n: 0,
            sum: 0.0,
            sum_cos: 0.0,
            sum_sin: 0.0,
        }
    }

    pub fn push(&mut self, t: f64, y: f64) {
        let (s, c) = (self.omega * t).sin_cos();
        self.n += 1;
        self.sum += y;
        self.sum_cos += y * c;
        self.sum_sin += y * s;
    }

    /// `(mean, 2 |<y e^{-i Omega t}>|)`.
    pub fn finish(&self) -> (f64, f64) {
        if self.n == 0 {
            return (f64::NAN, f64::NAN);
        }
        let n = self.n as f64;
        (self.sum / n, 2.0 * self.sum_cos.hypot(self.sum_sin) / n)
    }
}

/// `(a0_sim, a1_sim)` over the last `measure_periods` of a trajectory.
pub fn measure_steady(traj: &Trajectory, omega: f64, measure_periods: usize) -> Result<(f64, f64)> {
    let n = measure_periods * traj.steps_per_period;
    if measure_periods == 0 || traj.states.len() < n + 1 {
        return Err(Error::InvalidParams(format!(
            "trajectory of {} states is shorter than {measure_periods} periods",
            traj.states.len()
        )));
    }
    let mut meter = SteadyMeter::new(omega);
    // n samples covering exactly measure_periods periods: skip the window's
    // closing endpoint, which duplicates its opening phase.
    let end = traj.states.len() - 1;
    for s in &traj.states[end - n..end] {
        meter.push(s.t, s.y);
    }
    Ok(meter.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub omega: f64,
    pub direction: Direction,
    pub a0_sim: f64,
    pub a1_sim: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptions {
    pub steps_per_period: usize,
    pub transient_periods: usize,
    pub measure_periods: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            steps_per_period: DEFAULT_STEPS_PER_PERIOD,
            transient_periods: DEFAULT_TRANSIENT_PERIODS,
            measure_periods: DEFAULT_MEASURE_PERIODS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub params: Params,
    pub omega_range: Interval,
    pub n: usize,
    #[serde(flatten)]
    pub options: SweepOptions,
    pub seed: OscState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub metadata: SweepMetadata,
    pub records: Vec<SweepRecord>,
}

impl Sweep {
    pub const CSV_HEADER: &'static str = "omega,direction,a0_sim,a1_sim";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_row(&[r.omega]),
                r.direction.name(),
                csv_row(&[r.a0_sim, r.a1_sim])
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep serializes")
    }

    pub fn branch(&self, direction: Direction) -> Vec<SweepRecord> {
        self.records.iter().filter(|r| r.direction == direction).copied().collect()
    }
}

/// Settles the oscillator at one frequency, measuring after the transient.
/// Returns the record and the final state with time reset to zero; the
/// run spans whole periods, so the drive phase carries over unchanged.
fn settle(pr: &Params, omega: f64, seed: OscState, opts: &SweepOptions, direction: Direction) -> Result<(SweepRecord, OscState)> {
    let stepper = Stepper::new(pr, omega, opts.steps_per_period)?;
    let dir = direction.name();
    let transient = stepper.run(seed, opts.transient_periods * opts.steps_per_period, dir, |_| {})?;
    let mut meter = SteadyMeter::new(omega);
    meter.push(transient.t, transient.y);
    let n = opts.measure_periods * opts.steps_per_period;
    let mut count = 1;
    let end = stepper.run(transient, n, dir, |s| {
        // n samples: the window's closing point is left out
        if count < n {
            meter.push(s.t, s.y);
            count += 1;
        }
    })?;
    let (a0_sim, a1_sim) = meter.finish();
    Ok((
        SweepRecord {
            omega,
            direction,
            a0_sim,
            a1_sim,
        },
        OscState { t: 0.0, ..end },
    ))
}

/// Sweeps `omega_range` upward, then back down, each frequency seeded with
/// the final state of the previous one.
pub fn bifurcation_sweep(pr: &Params, omega_range: Interval, n: usize, opts: SweepOptions) -> Result<Sweep> {
    pr.validate()?;
    if n < 2 {
        return Err(Error::InvalidParams("sweep needs >= 2 frequencies".into()));
    }
    if !(omega_range.lo > 0.0) || !omega_range.hi.is_finite() {
        return Err(Error::InvalidParams("sweep range must lie in (0, inf)".into()));
    }
    if opts.measure_periods == 0 {
        return Err(Error::InvalidParams("measurement window must cover >= 1 period".into()));
    }
    let seed = OscState::at_rest(pr.equilibrium());
    let omegas = omega_range.linspace(n);
    let mut records = Vec::with_capacity(2 * n);
    let mut state = seed;
    for &w in &omegas {
        let (rec, next) = settle(pr, w, state, &opts, Direction::Up)?;
        records.push(rec);
        state = next;
    }
    for &w in omegas.iter().rev() {
        let (rec, next) = settle(pr, w, state, &opts, Direction::Down)?;
        records.push(rec);
        state = next;
    }
    Ok(Sweep {
        metadata: SweepMetadata {
            params: *pr,
            omega_range,
            n,
            options: opts,
            seed,
        },
        records,
    })
}

/// Fraction of a branch's largest `a1_sim` that a single-step change must
/// exceed to count as a jump.
pub const JUMP_FRACTION: f64 = 0.1;

/// Jumps along one sweep branch, located at the midpoint of the two
/// frequencies that straddle them, in sweep order.
pub fn detect_jumps(branch: &[SweepRecord]) -> Vec<f64> {
    let top = branch.iter().fold(0.0f64, |m, r| m.max(r.a1_sim));
    let threshold = JUMP_FRACTION * top;
    branch
        .windows(2)
        .filter(|w| (w[1].a1_sim - w[0].a1_sim).abs() > threshold)
        .map(|w| 0.5 * (w[0].omega + w[1].omega))
        .collect()
}
