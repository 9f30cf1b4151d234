//! Command-line front end: argument parsing, dispatch and output writing.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::algebra::derived;
use crate::error::Error;
use crate::interval::Interval;
use crate::jump::{
    border_points_json, border_search, double_omega_csv, double_omega_points, jump_points, jump_points_csv,
    manifold_slice_2d, manifold_slice_3d, ParamName,
};
use crate::output::{csv_row, fmt_sig};
use crate::sim::{bifurcation_sweep, detect_jumps, Direction, SweepOptions};
use crate::singular::scan_no_singular;
use crate::steady::{response_curve, CurveOptions, Params};

/// Directory for output files when `--out` is absent.
pub const OUT_DIR_ENV: &str = "DUFFING_JUMP_OUT_DIR";

pub const DEFAULT_COUNT: usize = 400;

/// Significant digits of numbers in the one-line summary.
const SUMMARY_DIGITS: usize = 9;

/// `min:max[:count]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeArg {
    pub interval: Interval,
    pub count: usize,
}

impl std::str::FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(format!("expected min:max[:count], got `{s}`"));
        }
        let num = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{t}` is not finite"))
            }
        };
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let count = match parts.get(2) {
            Some(c) => c.trim().parse().map_err(|_| format!("`{c}` is not a count"))?,
            None => DEFAULT_COUNT,
        };
        if count == 0 {
            return Err("count must be positive".into());
        }
        let interval = Interval::new(lo, hi).map_err(|e| e.to_string())?;
        Ok(Self { interval, count })
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args)]
struct GlobalArgs {
    #[arg(long, global = true, default_value_t = Params::REFERENCE_GAMMA, value_parser = finite)]
    gamma: f64,
    #[arg(long, global = true, default_value_t = Params::REFERENCE_ZETA, value_parser = finite, allow_hyphen_values = true)]
    zeta: f64,
    /// Forcing amplitude F.
    #[arg(long = "f", global = true, default_value_t = Params::REFERENCE_F, value_parser = finite)]
    f_amp: f64,
    /// Constant force F0.
    #[arg(long, global = true, default_value_t = 0.4, value_parser = finite)]
    f0: f64,
    /// Output file; defaults to `$DUFFING_JUMP_OUT_DIR/<command>.<ext>`, or
    /// standard output when that variable is unset.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Amplitude-frequency response curve.
    Response {
        #[arg(long)]
        omega: RangeArg,
        /// Keep roots with A0 < 0.
        #[arg(long)]
        include_negative: bool,
    },
    /// Vertical tangencies at the given parameters.
    Jumps,
    /// Jump manifold over F0 at fixed gamma, zeta, F.
    Manifold2d {
        #[arg(long)]
        f0_range: RangeArg,
    },
    /// Jump manifold over (F, F0) at fixed gamma, zeta.
    Manifold3d {
        #[arg(long)]
        f_range: RangeArg,
        #[arg(long)]
        f0_range: RangeArg,
    },
    /// Parameter values where the number of tangencies changes.
    Border {
        #[arg(long, value_enum)]
        vary: ParamName,
        /// Search range; the count sets the bracketing grid.
        #[arg(long)]
        range: RangeArg,
    },
    /// F0 values where two tangencies share one frequency.
    DoubleOmega {
        #[arg(long, default_value = "0.1:0.7:200")]
        f0_range: RangeArg,
    },
    /// Grid check for singular points of the steady-state curve.
    SingularScan {
        #[arg(long, default_value = "0.005:0.5:200")]
        zeta_range: RangeArg,
        /// Range of c = gamma F^2.
        #[arg(long, default_value = "1e-6:10:200")]
        c_range: RangeArg,
    },
    /// Simulated up/down frequency sweep.
    Sweep {
        #[arg(long)]
        omega: RangeArg,
        #[arg(long, default_value_t = crate::sim::DEFAULT_STEPS_PER_PERIOD)]
        steps_per_period: usize,
        #[arg(long, default_value_t = crate::sim::DEFAULT_TRANSIENT_PERIODS)]
        transient: usize,
        #[arg(long, default_value_t = crate::sim::DEFAULT_MEASURE_PERIODS)]
        measure: usize,
    },
    /// Exact derivation report of the steady-state and jump polynomials.
    DeriveTables,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Response { .. } => "response",
            Command::Jumps => "jumps",
            Command::Manifold2d { .. } => "manifold2d",
            Command::Manifold3d { .. } => "manifold3d",
            Command::Border { .. } => "border",
            Command::DoubleOmega { .. } => "double-omega",
            Command::SingularScan { .. } => "singular-scan",
            Command::Sweep { .. } => "sweep",
            Command::DeriveTables => "derive-tables",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Border { .. } | Command::SingularScan { .. } => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "duffing-jump", version, about = "Jump analysis of the forced asymmetric Duffing oscillator")]
struct Cli {
    #[command(flatten)]
    globals: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: Params,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 for help/version, 2 usage, 3 numerical, 4 divergence, 1 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(e) if !e.use_stderr() => 0,
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Compute(Error::Divergence { .. }) => 4,
            CliError::Compute(Error::InvalidParams(_)) => 2,
            CliError::Compute(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

/// Parses and validates `argv` (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let g = cli.globals;
    let params = Params {
        gamma: g.gamma,
        zeta: g.zeta,
        f_amp: g.f_amp,
        f0: g.f0,
    };
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if g.threads == Some(0) {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    let format = g.format.unwrap_or_else(|| cli.command.default_format());
    Ok(RunConfig {
        command: cli.command,
        params,
        out: g.out,
        format,
        threads: g.threads,
    })
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    /// Rendered output document.
    pub body: String,
    /// Where the body went; `None` means the caller should print it.
    pub written: Option<PathBuf>,
}

fn list(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| fmt_sig(v, SUMMARY_DIGITS)).collect::<Vec<_>>().join(", ")
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn csv_with_header(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

/// Computes the requested data and renders it in the configured format.
fn render(cfg: &RunConfig) -> Result<(String, String), CliError> {
    let pr = &cfg.params;
    let json = cfg.format == Format::Json;
    Ok(match &cfg.command {
        Command::Response { omega, include_negative } => {
            let curve = response_curve(
                pr,
                omega.interval,
                omega.count,
                CurveOptions {
                    include_negative: *include_negative,
                },
            )?;
            let summary = format!(
                "response: {} samples on {} branches over omega [{}, {}]",
                curve.samples.len(),
                curve.branch_count(),
                list([omega.interval.lo]),
                list([omega.interval.hi])
            );
            (summary, if json { curve.to_json() } else { curve.to_csv() })
        }
        Command::Jumps => {
            let pts = jump_points(pr)?;
            let summary = format!("jumps: {} points at omega = {}", pts.len(), list(pts.iter().map(|p| p.omega)));
            (summary, if json { to_json(&pts) } else { jump_points_csv(&pts) })
        }
        Command::Manifold2d { f0_range } => {
            let s = manifold_slice_2d(pr.gamma, pr.zeta, pr.f_amp, f0_range.interval, f0_range.count)?;
            let summary = format!("manifold2d: {} points over {} F0 samples", s.points.len(), f0_range.count);
            (summary, if json { s.to_json() } else { s.to_csv() })
        }
        Command::Manifold3d { f_range, f0_range } => {
            let s = manifold_slice_3d(
                pr.gamma,
                pr.zeta,
                f_range.interval,
                f0_range.interval,
                (f_range.count, f0_range.count),
            )?;
            let summary = format!(
                "manifold3d: {} points over {}x{} (F, F0) samples",
                s.points.len(),
                f_range.count,
                f0_range.count
            );
            (summary, if json { s.to_json() } else { s.to_csv() })
        }
        Command::Border { vary, range } => {
            let found = border_search(pr, *vary, range.interval, range.count.max(2))?;
            let pts = found.points;
            let mut counts: Vec<String> = pts
                .first()
                .and_then(|p| p.count_below.or(p.count_above))
                .into_iter()
                .chain(pts.iter().filter_map(|p| p.count_above))
                .map(|c| c.to_string())
                .collect();
            counts.dedup();
            let summary = format!(
                "border {}: {} (tangency counts {})",
                vary.name(),
                list(pts.iter().map(|p| p.value)),
                counts.join("/")
            );
            let body = if json {
                border_points_json(&pts)
            } else {
                let opt = |v: Option<usize>| v.map(|c| c.to_string()).unwrap_or_default();
                csv_with_header(
                    "param,value,a0_double,count_below,count_above",
                    pts.iter().map(|p| {
                        format!(
                            "{},{},{},{},{}",
                            p.param.name(),
                            csv_row(&[p.value]),
                            p.a0_double.map(|a| csv_row(&[a])).unwrap_or_default(),
                            opt(p.count_below),
                            opt(p.count_above)
                        )
                    }),
                )
            };
            (summary, body)
        }
        Command::DoubleOmega { f0_range } => {
            let ev = double_omega_points(pr.gamma, pr.zeta, pr.f_amp, f0_range.interval, f0_range.count.max(2))?;
            let summary = format!(
                "double-omega: {} events; {}",
                ev.len(),
                ev.iter()
                    .map(|e| format!(
                        "F0 = {} at omega = {} (A0 = {}, {})",
                        fmt_sig(e.f0, SUMMARY_DIGITS),
                        fmt_sig(e.omega, SUMMARY_DIGITS),
                        fmt_sig(e.a0_pair.0, SUMMARY_DIGITS),
                        fmt_sig(e.a0_pair.1, SUMMARY_DIGITS)
                    ))
                    .collect::<Vec<_>>()
                    .join("; ")
            );
            (summary, if json { to_json(&ev) } else { double_omega_csv(&ev) })
        }
        Command::SingularScan { zeta_range, c_range } => {
            let rep = scan_no_singular(zeta_range.interval, c_range.interval, (zeta_range.count, c_range.count))?;
            let summary = format!(
                "singular-scan: {} violations in {} grid points",
                rep.violations.len(),
                rep.checked
            );
            let body = if json {
                rep.to_json()
            } else {
                csv_with_header("zeta,c,x", rep.violations.iter().map(|v| csv_row(&[v.zeta, v.c, v.x])))
            };
            (summary, body)
        }
        Command::Sweep {
            omega,
            steps_per_period,
            transient,
            measure,
        } => {
            let opts = SweepOptions {
                steps_per_period: *steps_per_period,
                transient_periods: *transient,
                measure_periods: *measure,
            };
            let sw = bifurcation_sweep(pr, omega.interval, omega.count, opts)?;
            let summary = format!(
                "sweep: {} records; up jumps near omega = [{}], down jumps near omega = [{}]",
                sw.records.len(),
                list(detect_jumps(&sw.branch(Direction::Up))),
                list(detect_jumps(&sw.branch(Direction::Down)))
            );
            (summary, if json { sw.to_json() } else { sw.to_csv() })
        }
        Command::DeriveTables => {
            let t = derived();
            let summary = format!(
                "derive-tables: f has degree {} in A0, J has degree {} with {} nonzero coefficients",
                t.steady.degree_in(crate::algebra::Symbol::A0),
                t.jump.degree_in(crate::algebra::Symbol::A0),
                t.jump.coeffs_in(crate::algebra::Symbol::A0).iter().filter(|c| !c.is_zero()).count()
            );
            (summary, t.report())
        }
    })
}

fn destination(cfg: &RunConfig) -> Option<PathBuf> {
    if let Some(p) = &cfg.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV)?;
    let ext = match cfg.command {
        Command::DeriveTables => "txt",
        _ => cfg.format.extension(),
    };
    Some(PathBuf::from(dir).join(format!("{}.{ext}", cfg.command.name())))
}

/// Runs a validated configuration, writing the output file when one is
/// configured.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (summary, body) = render(cfg)?;
    let written = match destination(cfg) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|source| CliError::Io {
                    path: parent.to_path_buf(),
                    source,
                })?;
            }
            std::fs::write(&path, &body).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Some(path)
        }
        None => None,
    };
    Ok(Outcome { summary, body, written })
}
