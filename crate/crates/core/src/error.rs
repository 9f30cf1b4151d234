use thiserror::Error;

/// Errors raised across the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("symbol {symbol} appears with degree {degree}, above the allowed {max_pow}")]
    DegreeExceeded {
        symbol: &'static str,
        degree: u32,
        max_pow: u32,
    },

    #[error("leading coefficient is zero; trim the degree first")]
    ZeroLeadingCoefficient,

    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,

    #[error("polynomial of degree 0 has no roots")]
    ConstantPolynomial,

    #[error("root finder did not converge after {iterations} iterations (max residual {max_residual:e})")]
    NonConvergence {
        iterations: usize,
        max_residual: f64,
        /// Best roots found so far, as (re, im) pairs.
        roots: Vec<(f64, f64)>,
    },

    #[error("determinant magnitude 10^{log10_abs:.1} is outside the representable range")]
    Overflow { log10_abs: f64 },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("pole of the frequency closed form at A0 = {a0}")]
    Pole { a0: f64 },

    #[error("unresolved bracket [{lo}, {hi}]: discriminant sign oscillates below precision")]
    UnresolvedBracket { lo: f64, hi: f64 },

    #[error("trajectory diverged at t = {t} (omega = {omega}, sweep {direction})")]
    Divergence {
        t: f64,
        omega: f64,
        direction: &'static str,
    },

    #[error("root finding failed at omega = {omega}: {source}")]
    AtFrequency {
        omega: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
