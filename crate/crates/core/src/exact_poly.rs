//! Exact Laurent polynomials in one variable `r` with arbitrary-precision
//! rational coefficients.
//!
//! Everything in the family layer is computed with these; floating point only
//! enters through [`LaurentPoly::eval_f`] and [`LaurentPoly::coefficients_f64`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("cannot integrate r^-1 term (coefficient {0}) within Laurent polynomials")]
    NonIntegrableTerm(Rational),
    #[error("evaluation at r = 0 of a polynomial with negative exponents")]
    ZeroBase,
    #[error("odd exponent {0} cannot be evaluated from the square of the variable")]
    OddExponent(i64),
    #[error("invalid rational literal {0:?}")]
    Parse(String),
}

/// Builds a rational from an integer numerator and denominator.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer-valued rational.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or a plain integer, with optional sign and surrounding
/// whitespace. Decimal literals such as `"1.25"` are accepted and converted
/// exactly.
pub fn parse_rational(text: &str) -> Result<Rational, PolyError> {
    let s = text.trim();
    if let Some((whole, frac)) = s.split_once('.') {
        if !frac.chars().all(|ch| ch.is_ascii_digit()) || frac.is_empty() {
            return Err(PolyError::Parse(text.to_string()));
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let whole_digits = if whole_digits.is_empty() { "0" } else { whole_digits };
        let mantissa = BigInt::from_str(&format!("{whole_digits}{frac}"))
            .map_err(|_| PolyError::Parse(text.to_string()))?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| PolyError::Parse(text.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| PolyError::Parse(text.to_string()))?;
    if den.is_zero() {
        return Err(PolyError::Parse(text.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Out of range for the direct conversion: go through the ratio of
        // scaled integers.
        let num = value.numer().to_f64().unwrap_or(f64::NAN);
        let den = value.denom().to_f64().unwrap_or(f64::NAN);
        num / den
    })
}

/// Rational approximation of a float on a fixed decimal grid (12 digits).
/// Used where a float-valued grid has to be fed back into exact code.
pub fn from_f64_decimal(value: f64) -> Rational {
    let scale = 1_000_000_000_000i64;
    let scaled = (value * scale as f64).round();
    Rational::new(BigInt::from(scaled as i128), BigInt::from(scale))
}

/// Finite sum `sum_k a_k r^k` over integer exponents `k` (possibly negative).
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(value: Rational) -> Self {
        Self::monomial(value, 0)
    }

    /// `coeff * r^exponent`.
    pub fn monomial(coeff: Rational, exponent: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        Self { terms }
    }

    /// The variable `r`.
    pub fn var() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// Collects `(exponent, coefficient)` pairs, summing repeated exponents.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(terms: &[(i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(k, c)| (k, int(c))))
    }

    fn add_term(&mut self, exponent: i64, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `r^exponent` (zero if absent).
    pub fn coeff(&self, exponent: i64) -> Rational {
        self.terms.get(&exponent).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> + '_ {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Coefficient of the highest power, or zero for the zero polynomial.
    pub fn leading_coeff(&self) -> Rational {
        self.terms
            .values()
            .next_back()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, c)| (k, c * factor)).collect(),
        }
    }

    /// Multiplies by `r^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&k, c)| (k + shift, c.clone())).collect(),
        }
    }

    /// Exact `k`-th power by repeated squaring.
    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&k, _)| k != 0)
                .map(|(&k, c)| (k - 1, c * int(k))),
        )
    }

    /// Term-by-term antiderivative with zero constant of integration.
    pub fn antiderivative(&self) -> Result<Self, PolyError> {
        if let Some(c) = self.terms.get(&-1) {
            return Err(PolyError::NonIntegrableTerm(c.clone()));
        }
        Ok(Self::from_terms(
            self.terms.iter().map(|(&k, c)| (k + 1, c / int(k + 1))),
        ))
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, PolyError> {
        if x.is_zero() {
            if self.min_exponent().is_some_and(|k| k < 0) {
                return Err(PolyError::ZeroBase);
            }
            return Ok(self.coeff(0));
        }
        let mut acc = Rational::zero();
        for (&k, c) in &self.terms {
            acc += c * pow_signed(x, k);
        }
        Ok(acc)
    }

    /// Exact value at `r` given only `r^2`; every exponent must be even.
    pub fn eval_at_sq(&self, x_sq: &Rational) -> Result<Rational, PolyError> {
        if let Some((&k, _)) = self.terms.iter().find(|(&k, _)| k % 2 != 0) {
            return Err(PolyError::OddExponent(k));
        }
        let halved = Self {
            terms: self.terms.iter().map(|(&k, c)| (k / 2, c.clone())).collect(),
        };
        halved.eval(x_sq)
    }

    /// Floating evaluation; each coefficient is rounded once to `f64`.
    pub fn eval_f(&self, x: f64) -> Result<f64, PolyError> {
        if x == 0.0 && self.min_exponent().is_some_and(|k| k < 0) {
            return Err(PolyError::ZeroBase);
        }
        Ok(self
            .terms
            .iter()
            .map(|(&k, c)| to_f64(c) * x.powi(k as i32))
            .sum())
    }

    /// `(exponent, coefficient)` pairs rounded to `f64`.
    pub fn coefficients_f64(&self) -> Vec<(i64, f64)> {
        self.terms.iter().map(|(&k, c)| (k, to_f64(c))).collect()
    }

    /// Taylor coefficients `[p(a), p'(a), p''(a)/2, ...]` up to `order`
    /// inclusive, computed exactly from repeated differentiation.
    pub fn taylor_at(&self, a: &Rational, order: usize) -> Result<Vec<Rational>, PolyError> {
        let mut out = Vec::with_capacity(order + 1);
        let mut current = self.clone();
        let mut factorial = Rational::one();
        for j in 0..=order {
            if j > 0 {
                factorial *= int(j as i64);
            }
            out.push(current.eval(a)? / &factorial);
            current = current.derivative();
        }
        Ok(out)
    }

    /// `p(r)` as an ordinary polynomial in `u = r - a`. Requires
    /// nonnegative exponents; returns `None` otherwise.
    pub fn shifted_to(&self, a: &Rational) -> Option<Vec<Rational>> {
        if self.min_exponent().is_some_and(|k| k < 0) {
            return None;
        }
        let degree = self.max_exponent().unwrap_or(0) as usize;
        self.taylor_at(a, degree).ok()
    }
}

fn pow_signed(x: &Rational, k: i64) -> Rational {
    let magnitude = num_traits::pow(x.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        magnitude.recip()
    } else {
        magnitude
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, c.clone());
        }
        out
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, -c.clone());
        }
        out
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&i, a) in &self.terms {
            for (&j, b) in &rhs.terms {
                out.add_term(i + j, a * b);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$method(rhs)
            }
        }
        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

/// Canonical text form: decreasing exponents, `"c*r^k"` terms joined by
/// `" + "` / `" - "`, unit coefficients elided, exact `"p/q"` coefficients.
/// For example `r^4 - 4*r + 3` or `1/3*r^3 + r^-1`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (&k, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let magnitude = c.abs();
            let unit = magnitude.is_one();
            match k {
                0 => write!(f, "{magnitude}")?,
                1 if unit => write!(f, "r")?,
                1 => write!(f, "{magnitude}*r")?,
                _ if unit => write!(f, "r^{k}")?,
                _ => write!(f, "{magnitude}*r^{k}")?,
            }
        }
        Ok(())
    }
}
