//! Sparse multivariate polynomials with exact rational coefficients over a
//! fixed set of seven symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const NUM_SYMBOLS: usize = 7;

/// The closed symbol universe. `X` is the squared frequency, `A1sq` the
/// squared harmonic amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    A0,
    A1sq,
    X,
    Gamma,
    Zeta,
    F,
    F0,
}

impl Symbol {
    pub const ALL: [Symbol; NUM_SYMBOLS] = [
        Symbol::A0,
        Symbol::A1sq,
        Symbol::X,
        Symbol::Gamma,
        Symbol::Zeta,
        Symbol::F,
        Symbol::F0,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::A0 => "A0",
            Symbol::A1sq => "A1sq",
            Symbol::X => "X",
            Symbol::Gamma => "gamma",
            Symbol::Zeta => "zeta",
            Symbol::F => "F",
            Symbol::F0 => "F0",
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector, one entry per [`Symbol`]. Array ordering gives the lex
/// monomial order with `A0` most significant.
pub type Monomial = [u32; NUM_SYMBOLS];

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m = *a;
    for (x, y) in m.iter_mut().zip(b) {
        *x += y;
    }
    m
}

fn mono_div(a: &Monomial, b: &Monomial) -> Option<Monomial> {
    let mut m = *a;
    for (x, y) in m.iter_mut().zip(b) {
        *x = x.checked_sub(*y)?;
    }
    Some(m)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact polynomial in the seven [`Symbol`]s. No zero coefficient is ever
/// stored, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl RatPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial([0; NUM_SYMBOLS], c)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn var(s: Symbol) -> Self {
        Self::var_pow(s, 1)
    }

    pub fn var_pow(s: Symbol, k: u32) -> Self {
        let mut m = [0; NUM_SYMBOLS];
        m[s.index()] = k;
        Self::monomial(m, BigRational::one())
    }

    /// Builds a polynomial from `(coefficient, [(symbol, power)])` pairs.
    pub fn from_terms<'a>(
        terms: impl IntoIterator<Item = (BigRational, &'a [(Symbol, u32)])>,
    ) -> Self {
        let mut p = Self::zero();
        for (c, powers) in terms {
            let mut m = [0; NUM_SYMBOLS];
            for &(s, k) in powers {
                m[s.index()] += k;
            }
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Lex-leading term (highest `A0` power first).
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|m| m[s.index()]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &BigRational) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, x)| (mono_mul(k, m), x * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficients with respect to `s`, ascending in the power of `s`.
    pub fn coeffs_in(&self, s: Symbol) -> Vec<RatPoly> {
        let i = s.index();
        let mut out = vec![RatPoly::zero(); self.degree_in(s) as usize + 1];
        for (m, c) in &self.terms {
            let mut rest = *m;
            let k = rest[i] as usize;
            rest[i] = 0;
            out[k].add_term(rest, c.clone());
        }
        out
    }

    /// Inverse of [`RatPoly::coeffs_in`].
    pub fn from_coeffs_in(s: Symbol, coeffs: &[RatPoly]) -> Self {
        let mut p = Self::zero();
        for (k, c) in coeffs.iter().enumerate() {
            p = &p + &(c * &Self::var_pow(s, k as u32));
        }
        p
    }

    pub fn derivative(&self, s: Symbol) -> Self {
        let i = s.index();
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut d = *m;
            d[i] -= 1;
            p.add_term(d, c * BigRational::from_integer(m[i].into()));
        }
        p
    }

    /// Replaces `s` by `num/den` and multiplies through by `den^max_pow`,
    /// returning the cleared polynomial together with `max_pow`.
    pub fn substitute(
        &self,
        s: Symbol,
        num: &RatPoly,
        den: &RatPoly,
        max_pow: u32,
    ) -> Result<(RatPoly, u32)> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("substitution denominator"));
        }
        let degree = self.degree_in(s);
        if degree > max_pow {
            return Err(Error::DegreeExceeded {
                symbol: s.name(),
                degree,
                max_pow,
            });
        }
        let coeffs = self.coeffs_in(s);
        let num_pows: Vec<RatPoly> = (0..=degree).map(|k| num.pow(k)).collect();
        let den_pows: Vec<RatPoly> = (0..=max_pow).map(|k| den.pow(k)).collect();
        let mut out = RatPoly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = &(c * &num_pows[k]) * &den_pows[max_pow as usize - k];
            out = &out + &term;
        }
        Ok((out, max_pow))
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &RatPoly) -> Option<RatPoly> {
        let (lm, lc) = d.leading()?;
        let (lm, lc) = (*lm, lc.clone());
        let mut r = self.clone();
        let mut q = RatPoly::zero();
        while let Some((m, c)) = r.leading() {
            let qm = mono_div(m, &lm)?;
            let qc = c / &lc;
            r = &r - &d.mul_term(&qm, &qc);
            q.add_term(qm, qc);
        }
        Some(q)
    }

    /// Splits off the monomial-times-rational content so that the remaining
    /// factor has coprime integer coefficients, no symbol dividing every
    /// term, and a positive lex-leading coefficient. Returns `(content,
    /// primitive)` with `self == content * primitive`.
    pub fn primitive_part(&self) -> (RatPoly, RatPoly) {
        let Some((_, lead)) = self.leading() else {
            return (RatPoly::zero(), RatPoly::zero());
        };
        let mut mono = [u32::MAX; NUM_SYMBOLS];
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for (m, c) in &self.terms {
            for (g, e) in mono.iter_mut().zip(m) {
                *g = (*g).min(*e);
            }
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if lead.is_negative() {
            content = -content;
        }
        let inv = content.recip();
        let primitive = Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (mono_div(m, &mono).expect("min exponent"), c * &inv))
                .collect(),
        };
        (RatPoly::monomial(mono, content), primitive)
    }

    /// Evaluates at the given symbol values (indexed by [`Symbol::index`]).
    pub fn eval_f64(&self, values: &[f64; NUM_SYMBOLS]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| ratio_to_f64(c) * mono_eval(m, values))
            .sum()
    }

    /// Rounds every coefficient to `f64`.
    pub fn to_numeric(&self) -> NumericPoly {
        NumericPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (ratio_to_f64(c), *m))
                .collect(),
        }
    }
}

pub(crate) fn ratio_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn mono_eval(m: &Monomial, values: &[f64; NUM_SYMBOLS]) -> f64 {
    m.iter()
        .zip(values)
        .filter(|(e, _)| **e > 0)
        .map(|(e, v)| v.powi(*e as i32))
        .product()
}

/// Floating snapshot of a [`RatPoly`], used to evaluate the derived tables
/// quickly at numeric parameter values.
#[derive(Debug, Clone)]
pub struct NumericPoly {
    terms: Vec<(f64, Monomial)>,
}

impl NumericPoly {
    /// Dense coefficients in `s` (ascending), with every other symbol
    /// evaluated from `values`.
    pub fn coeffs_in(&self, s: Symbol, values: &[f64; NUM_SYMBOLS]) -> Vec<f64> {
        let i = s.index();
        let deg = self.terms.iter().map(|(_, m)| m[i]).max().unwrap_or(0) as usize;
        let mut out = vec![0.0; deg + 1];
        for (c, m) in &self.terms {
            let mut rest = *m;
            let k = rest[i] as usize;
            rest[i] = 0;
            out[k] += c * mono_eval(&rest, values);
        }
        out
    }

    pub fn eval(&self, values: &[f64; NUM_SYMBOLS]) -> f64 {
        self.terms.iter().map(|(c, m)| c * mono_eval(m, values)).sum()
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        let mut out = RatPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for RatPoly {
            type Output = RatPoly;
            fn $f(self, rhs: RatPoly) -> RatPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn fmt_monomial(m: &Monomial) -> String {
    Symbol::ALL
        .iter()
        .zip(m)
        .filter(|(_, e)| **e > 0)
        .map(|(s, e)| {
            if *e == 1 {
                s.name().to_string()
            } else {
                format!("{}^{}", s.name(), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mono = fmt_monomial(m);
            match (mono.is_empty(), a.is_one()) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => f.write_str(&mono)?,
                (false, false) => write!(f, "{a}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}
