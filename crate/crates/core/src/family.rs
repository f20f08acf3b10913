//! The Page–Pope family: exact profile `P(r)`, metric coefficients and the
//! scalar invariants read off near the zero section and near infinity.
//!
//! The metric on `{r > r1}` is
//!
//! ```text
//! g = (r^2-1)^n / P dr^2 + c^2 P / (r^2-1)^n theta^2 + c (r^2-1) g_base
//! ```
//!
//! where `P` solves `d/dr(P/r) = r^-2 [|L| (r^2-1)^(n+1) + (lambda/c) (r^2-1)^n]`
//! with `P(r1) = 0`. Every quantity here is an exact rational.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact_poly::{int, rat, to_f64, LaurentPoly, PolyError, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("r1 = 1 is the conic case; use the conic model")]
    ConicCase,
    #[error("r1 > 1 is the edge case; use the edge model")]
    EdgeCase,
    #[error("no smooth metric: need 2*r1 > lambda (r1 = {r1}, lambda = {lambda})")]
    NoSmoothMetric { r1: Box<Rational>, lambda: Box<Rational> },
    #[error("audit mismatch in {quantity}: {expected} vs {actual}")]
    AuditMismatch {
        quantity: &'static str,
        expected: Box<Rational>,
        actual: Box<Rational>,
    },
    #[error("P(r) = {value} is not positive at r = {r}")]
    PositivityViolation { r: Box<Rational>, value: Box<Rational> },
    #[error("expansion does not have the model form: {0}")]
    ModelMismatch(String),
    #[error("large-r ratios do not approach 1: {ratios:?}")]
    AsymptoticsMismatch { ratios: Vec<[f64; 3]> },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn mismatch(quantity: &'static str, expected: &Rational, actual: &Rational) -> FamilyError {
    FamilyError::AuditMismatch {
        quantity,
        expected: Box::new(expected.clone()),
        actual: Box::new(actual.clone()),
    }
}

/// `(n, lambda, c, Lambda, r1)`: complex dimension of the base, base Einstein
/// constant, fibre scale, Einstein constant of `g`, and the zero of `P`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilyParams {
    n: u32,
    lambda: Rational,
    c: Rational,
    einstein_constant: Rational,
    r1: Rational,
}

impl FamilyParams {
    pub fn new(
        n: u32,
        lambda: Rational,
        c: Rational,
        einstein_constant: Rational,
        r1: Rational,
    ) -> Result<Self, FamilyError> {
        if n == 0 {
            return Err(FamilyError::InvalidParams("n must be >= 1".into()));
        }
        if !lambda.is_positive() {
            return Err(FamilyError::InvalidParams(format!("lambda = {lambda} must be > 0")));
        }
        if !c.is_positive() {
            return Err(FamilyError::InvalidParams(format!("c = {c} must be > 0")));
        }
        if !einstein_constant.is_negative() {
            return Err(FamilyError::InvalidParams(format!(
                "Lambda = {einstein_constant} must be < 0"
            )));
        }
        if r1 < Rational::one() {
            return Err(FamilyError::InvalidParams(format!("r1 = {r1} must be >= 1")));
        }
        Ok(Self {
            n,
            lambda,
            c,
            einstein_constant,
            r1,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }
    pub fn c(&self) -> &Rational {
        &self.c
    }
    pub fn einstein_constant(&self) -> &Rational {
        &self.einstein_constant
    }
    pub fn r1(&self) -> &Rational {
        &self.r1
    }

    /// `|Lambda|`.
    pub fn abs_einstein(&self) -> Rational {
        self.einstein_constant.abs()
    }

    pub fn is_conic(&self) -> bool {
        self.r1.is_one()
    }

    pub fn with_c(&self, c: Rational) -> Result<Self, FamilyError> {
        Self::new(self.n, self.lambda.clone(), c, self.einstein_constant.clone(), self.r1.clone())
    }

    pub fn with_r1(&self, r1: Rational) -> Result<Self, FamilyError> {
        Self::new(self.n, self.lambda.clone(), self.c.clone(), self.einstein_constant.clone(), r1)
    }

    fn r1_sq_minus_one(&self) -> Rational {
        &self.r1 * &self.r1 - Rational::one()
    }
}

fn r_sq_minus_one() -> LaurentPoly {
    LaurentPoly::from_int_terms(&[(2, 1), (0, -1)])
}

fn pow_rat(x: &Rational, k: u32) -> Rational {
    num_traits::pow(x.clone(), k as usize)
}

/// Right-hand side `r^-2 [|L| (r^2-1)^(n+1) + (lambda/c) (r^2-1)^n]` of the
/// profile equation.
pub fn ode_rhs(params: &FamilyParams) -> LaurentPoly {
    let s = r_sq_minus_one();
    let s_n = s.pow(params.n);
    let s_n1 = &s_n * &s;
    let bracket = &s_n1.scale(&params.abs_einstein()) + &s_n.scale(&(&params.lambda / &params.c));
    bracket.shift(-2)
}

/// Exact profile `P` with `P(r1) = 0`.
pub fn solve_p(params: &FamilyParams) -> LaurentPoly {
    // The integrand only has even exponents 2j-2, so there is never an r^-1
    // term to integrate.
    let q0 = ode_rhs(params)
        .antiderivative()
        .expect("profile integrand has no r^-1 term");
    let q0_at_r1 = q0.eval(&params.r1).expect("r1 >= 1 is nonzero");
    let q = &q0 - &LaurentPoly::constant(q0_at_r1);
    q.shift(1)
}

/// `d/dr(P/r) - rhs`; identically zero for `P = solve_p(params)`.
pub fn ode_residual(params: &FamilyParams, p: &LaurentPoly) -> LaurentPoly {
    &p.shift(-1).derivative() - &ode_rhs(params)
}

/// Closed form `P'(r1) = (|L| (r1^2-1)^(n+1) + (lambda/c) (r1^2-1)^n) / r1`.
pub fn p_prime_closed_form(params: &FamilyParams) -> Rational {
    let s1 = params.r1_sq_minus_one();
    let bracket = params.abs_einstein() * pow_rat(&s1, params.n + 1)
        + &params.lambda / &params.c * pow_rat(&s1, params.n);
    bracket / &params.r1
}

/// `P'(r1)`, checked against direct differentiation of `p`.
pub fn p_prime_at_r1(params: &FamilyParams, p: &LaurentPoly) -> Result<Rational, FamilyError> {
    let closed = p_prime_closed_form(params);
    let direct = p.derivative().eval(&params.r1)?;
    if closed != direct {
        return Err(mismatch("P'(r1)", &closed, &direct));
    }
    Ok(closed)
}

/// Exact coefficient functions of the metric. The `dr^2` and `theta^2`
/// slots are quotients `numerator / denominator` of Laurent polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricCoefficients {
    pub dr2: (LaurentPoly, LaurentPoly),
    pub theta2: (LaurentPoly, LaurentPoly),
    pub base: LaurentPoly,
}

impl MetricCoefficients {
    fn quotient(pair: &(LaurentPoly, LaurentPoly), r: &Rational) -> Result<Rational, FamilyError> {
        let den = pair.1.eval(r)?;
        if den.is_zero() {
            return Err(FamilyError::InvalidParams(format!("coefficient singular at r = {r}")));
        }
        Ok(pair.0.eval(r)? / den)
    }

    pub fn eval_dr2(&self, r: &Rational) -> Result<Rational, FamilyError> {
        Self::quotient(&self.dr2, r)
    }

    pub fn eval_theta2(&self, r: &Rational) -> Result<Rational, FamilyError> {
        Self::quotient(&self.theta2, r)
    }

    pub fn eval_base(&self, r: &Rational) -> Result<Rational, FamilyError> {
        Ok(self.base.eval(r)?)
    }
}

pub fn metric_coefficients(params: &FamilyParams, p: &LaurentPoly) -> MetricCoefficients {
    let s = r_sq_minus_one();
    let s_n = s.pow(params.n);
    let c_sq = &params.c * &params.c;
    MetricCoefficients {
        dr2: (s_n.clone(), p.clone()),
        theta2: (p.scale(&c_sq), s_n),
        base: s.scale(&params.c),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    pub samples: usize,
    pub min_sampled: Rational,
    /// The right-hand side factors as `r^-2 (r^2-1)^n (|L|(r^2-1) + lambda/c)`
    /// with positive constants, so `P/r` increases from `0` past `r1`.
    pub sign_argument: bool,
}

/// Samples `P` at `r1 + 10 i / samples`, `i = 1..=samples`, and checks the
/// factorisation behind the sign argument.
pub fn positivity_check(
    params: &FamilyParams,
    p: &LaurentPoly,
    samples: usize,
) -> Result<PositivityReport, FamilyError> {
    if samples == 0 {
        return Err(FamilyError::InvalidParams("samples must be >= 1".into()));
    }
    let mut min_sampled: Option<Rational> = None;
    for i in 1..=samples {
        let r = &params.r1 + rat(10 * i as i64, samples as i64);
        let value = p.eval(&r)?;
        if !value.is_positive() {
            return Err(FamilyError::PositivityViolation { r: Box::new(r), value: Box::new(value) });
        }
        if min_sampled.as_ref().is_none_or(|m| value < *m) {
            min_sampled = Some(value);
        }
    }
    let s = r_sq_minus_one();
    let factor = &s.scale(&params.abs_einstein()) + &LaurentPoly::constant(&params.lambda / &params.c);
    let factored = (&s.pow(params.n) * &factor).shift(-2);
    let constants_positive = params.abs_einstein().is_positive() && (&params.lambda / &params.c).is_positive();
    let sign_argument = factored == ode_rhs(params) && constants_positive && p.eval(&params.r1)?.is_zero();
    Ok(PositivityReport {
        samples,
        min_sampled: min_sampled.expect("samples >= 1"),
        sign_argument,
    })
}

/// `(c|L|/2) r1 + (lambda - c|L|) / (2 r1)`. Valid for every `r1 >= 1`; at
/// `r1 = 1` it is the limit `lambda/2` of the cone angle factor.
pub fn alpha_continuation(params: &FamilyParams) -> Rational {
    let cl = &params.c * params.abs_einstein();
    &cl / int(2) * &params.r1 + (&params.lambda - &cl) / (int(2) * &params.r1)
}

/// `d alpha / d r1 = c|L|/2 - (lambda - c|L|) / (2 r1^2)`.
pub fn alpha_derivative_r1(params: &FamilyParams) -> Rational {
    let cl = &params.c * params.abs_einstein();
    &cl / int(2) - (&params.lambda - &cl) / (int(2) * &params.r1 * &params.r1)
}

/// Cone angle factor `alpha` (the cone angle is `2 pi alpha`) along the zero
/// section. Three closed forms are evaluated and must agree exactly.
pub fn cone_angle(params: &FamilyParams) -> Result<Rational, FamilyError> {
    if params.is_conic() {
        return Err(FamilyError::ConicCase);
    }
    let s1 = params.r1_sq_minus_one();
    let two_r1 = int(2) * &params.r1;
    let cl = &params.c * params.abs_einstein();
    let from_model = &cl / &two_r1 * &s1 + &params.lambda / &two_r1;
    let from_p_prime = &params.c * p_prime_closed_form(params) / (int(2) * pow_rat(&s1, params.n));
    let expanded = alpha_continuation(params);
    if from_model != from_p_prime {
        return Err(mismatch("alpha (c P'(r1) form)", &from_model, &from_p_prime));
    }
    if from_model != expanded {
        return Err(mismatch("alpha (expanded form)", &from_model, &expanded));
    }
    Ok(from_model)
}

/// Near-zero-section model `scale * (ds^2 + alpha^2 s^2 theta^2 + beta^2 g_base)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeModel {
    #[serde(serialize_with = "crate::serde_rational")]
    pub scale: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub alpha: Rational,
    /// `alpha (r1^2 - 1) / 2`, what the expansion produces.
    #[serde(serialize_with = "crate::serde_rational")]
    pub beta_sq_derived: Rational,
    /// `alpha^2 (r1^2 - 1) / 2`, the printed variant kept for the audit.
    #[serde(serialize_with = "crate::serde_rational")]
    pub beta_sq_printed: Rational,
}

pub fn edge_model(params: &FamilyParams, p: &LaurentPoly) -> Result<EdgeModel, FamilyError> {
    if params.is_conic() {
        return Err(FamilyError::ConicCase);
    }
    let s1 = params.r1_sq_minus_one();
    let p_prime = p_prime_at_r1(params, p)?;
    let scale = int(4) * pow_rat(&s1, params.n) / &p_prime;
    let alpha = cone_angle(params)?;
    let beta_sq_derived = &alpha * &s1 / int(2);
    let beta_sq_printed = &alpha * &alpha * &s1 / int(2);
    let beta_from_p = &params.c * &p_prime / (int(4) * pow_rat(&s1, params.n - 1));
    if beta_from_p != beta_sq_derived {
        return Err(mismatch("beta^2", &beta_from_p, &beta_sq_derived));
    }
    Ok(EdgeModel {
        scale,
        alpha,
        beta_sq_derived,
        beta_sq_printed,
    })
}

/// Leading term `coeff * s^order` of a one-variable expansion.
#[derive(Clone, Debug, PartialEq)]
struct Lead {
    coeff: Rational,
    order: i64,
}

impl Lead {
    fn new(coeff: Rational, order: i64) -> Self {
        Self { coeff, order }
    }

    /// Leading term of a Taylor series `sum a_k u^k`, with `u = mult * s^2`.
    fn of_series(series: &[Rational], mult: &Rational) -> Option<Self> {
        series.iter().enumerate().find(|(_, a)| !a.is_zero()).map(|(k, a)| {
            Self::new(a * pow_rat(mult, k as u32), 2 * k as i64)
        })
    }

    fn mul(&self, other: &Lead) -> Lead {
        Lead::new(&self.coeff * &other.coeff, self.order + other.order)
    }

    fn div(&self, other: &Lead) -> Lead {
        Lead::new(&self.coeff / &other.coeff, self.order - other.order)
    }

    fn pow(&self, k: u32) -> Lead {
        Lead::new(pow_rat(&self.coeff, k), self.order * k as i64)
    }

    fn expect_order(self, order: i64, what: &str) -> Result<Rational, FamilyError> {
        if self.order != order {
            return Err(FamilyError::ModelMismatch(format!(
                "{what} has order s^{} (expected s^{order})",
                self.order
            )));
        }
        Ok(self.coeff)
    }
}

/// Model coefficients read off by substituting `r = r1 + s^2` into the exact
/// Taylor jets of the metric coefficients at `r1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeExpansion {
    pub scale: Rational,
    pub alpha_sq: Rational,
    pub beta_sq: Rational,
}

/// Independent route to [`edge_model`]: uses only the Taylor coefficients of
/// `p` and of `(r^2-1)^n` at `r1`, never the closed forms.
pub fn expand_at_edge(params: &FamilyParams, p: &LaurentPoly) -> Result<EdgeExpansion, FamilyError> {
    if params.is_conic() {
        return Err(FamilyError::ConicCase);
    }
    let n = params.n;
    let one = Rational::one();
    let p_jet = p.taylor_at(&params.r1, (2 * n + 2) as usize)?;
    let s_jet = r_sq_minus_one().taylor_at(&params.r1, 2)?;
    let p_lead = Lead::of_series(&p_jet, &one)
        .ok_or_else(|| FamilyError::ModelMismatch("P vanishes identically".into()))?;
    let s_lead = Lead::of_series(&s_jet, &one).expect("r1 > 1");
    let s_n = s_lead.pow(n);
    // dr = 2 s ds
    let dr_sq = Lead::new(int(4), 2);
    let c = Lead::new(params.c.clone(), 0);

    let ds2 = s_n.div(&p_lead).mul(&dr_sq).expect_order(0, "ds^2 coefficient")?;
    let theta2 = c.mul(&c).mul(&p_lead).div(&s_n).expect_order(2, "theta^2 coefficient")?;
    let base = c.mul(&s_lead).expect_order(0, "base coefficient")?;
    Ok(EdgeExpansion {
        alpha_sq: &theta2 / &ds2,
        beta_sq: &base / &ds2,
        scale: ds2,
    })
}

/// Near-apex model `ds^2 + s^2 (theta_coeff theta^2 + base_coeff g_base)` at
/// `r1 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConicModel {
    /// `K` in `P(1 + u) ~ K u^(n+1)`.
    #[serde(serialize_with = "crate::serde_rational")]
    pub leading_constant: Rational,
    /// `2^(n+1) / (n+1)`, the printed variant of `K`.
    #[serde(serialize_with = "crate::serde_rational")]
    pub leading_constant_printed: Rational,
    /// `a` in `u = a s^2`, chosen so the `ds^2` coefficient is one.
    #[serde(serialize_with = "crate::serde_rational")]
    pub u_scale: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub theta_coeff: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub base_coeff_derived: Rational,
    /// `c lambda / (2n+2)`, the printed variant.
    #[serde(serialize_with = "crate::serde_rational")]
    pub base_coeff_printed: Rational,
}

pub fn conic_model(params: &FamilyParams, p: &LaurentPoly) -> Result<ConicModel, FamilyError> {
    if !params.is_conic() {
        return Err(FamilyError::EdgeCase);
    }
    let n = params.n;
    let two_pow_n = pow_rat(&int(2), n);
    let n1 = int(n as i64 + 1);
    let closed_k = &params.lambda * &two_pow_n / (&params.c * &n1);

    let one = Rational::one();
    let p_jet = p.taylor_at(&one, (2 * n + 2) as usize)?;
    let s_jet = r_sq_minus_one().taylor_at(&one, 2)?;
    // Orders here are in u, doubled (Lead counts powers of s with u = s^2).
    let p_lead = Lead::of_series(&p_jet, &one)
        .ok_or_else(|| FamilyError::ModelMismatch("P vanishes identically".into()))?;
    if p_lead.order != 2 * (n as i64 + 1) {
        return Err(FamilyError::ModelMismatch(format!(
            "P(1+u) vanishes to order u^{} (expected u^{})",
            p_lead.order / 2,
            n + 1
        )));
    }
    if p_lead.coeff != closed_k {
        return Err(mismatch("P(1+u) leading constant", &closed_k, &p_lead.coeff));
    }
    let k = p_lead.coeff.clone();

    // With u = a s^2 and du = 2 a s ds, the ds^2 coefficient is
    // 2^(n+2) a / K; normalise it to one.
    let a = &k / pow_rat(&int(2), n + 2);
    let p_s = Lead::of_series(&p_jet, &a).expect("nonzero jet");
    let s_s = Lead::of_series(&s_jet, &a).expect("nonzero jet");
    let s_n = s_s.pow(n);
    let du_sq = Lead::new(int(4) * &a * &a, 2);
    let c = Lead::new(params.c.clone(), 0);

    let ds2 = s_n.div(&p_s).mul(&du_sq).expect_order(0, "ds^2 coefficient")?;
    if !ds2.is_one() {
        return Err(mismatch("conic ds^2 normalisation", &one, &ds2));
    }
    let theta_coeff = c.mul(&c).mul(&p_s).div(&s_n).expect_order(2, "theta^2 coefficient")?;
    let base_coeff_derived = c.mul(&s_s).expect_order(2, "base coefficient")?;

    let ratio = &params.lambda / int(2 * n as i64 + 2);
    if theta_coeff != &ratio * &ratio {
        return Err(mismatch("conic theta^2 coefficient", &(&ratio * &ratio), &theta_coeff));
    }
    if base_coeff_derived != ratio {
        return Err(mismatch("conic base coefficient", &ratio, &base_coeff_derived));
    }
    Ok(ConicModel {
        leading_constant: k,
        leading_constant_printed: pow_rat(&int(2), n + 1) / n1,
        u_scale: a,
        theta_coeff,
        base_coeff_derived,
        base_coeff_printed: &params.c * &ratio,
    })
}

/// The `c` making the cone angle factor exactly one:
/// `c = (2 r1 - lambda) / (|L| (r1^2 - 1))`.
pub fn smooth_c(
    n: u32,
    lambda: &Rational,
    einstein_constant: &Rational,
    r1: &Rational,
) -> Result<Rational, FamilyError> {
    if r1.is_one() {
        return Err(FamilyError::ConicCase);
    }
    let two_r1 = int(2) * r1;
    if two_r1 <= *lambda {
        return Err(FamilyError::NoSmoothMetric {
            r1: Box::new(r1.clone()),
            lambda: Box::new(lambda.clone()),
        });
    }
    let c = (&two_r1 - lambda) / (einstein_constant.abs() * (r1 * r1 - Rational::one()));
    let params = FamilyParams::new(n, lambda.clone(), c.clone(), einstein_constant.clone(), r1.clone())?;
    let alpha = cone_angle(&params)?;
    if !alpha.is_one() {
        return Err(mismatch("smooth c round trip", &Rational::one(), &alpha));
    }
    Ok(c)
}

/// Printed smoothness value `(1 + t - lambda/2) / ((2 + t)(2n + 1))` with
/// `t = r1 - 1`, kept for the audit.
pub fn smooth_c_printed(n: u32, lambda: &Rational, t: &Rational) -> Rational {
    (Rational::one() + t - lambda / int(2)) / ((int(2) + t) * int(2 * n as i64 + 1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalInfinity {
    /// `theta^2` coefficient of the boundary representative
    /// `c|L|/(2n+1) theta^2 + g_base`.
    #[serde(serialize_with = "crate::serde_rational")]
    pub berger_coeff: Rational,
}

pub fn conformal_infinity(params: &FamilyParams) -> ConformalInfinity {
    ConformalInfinity {
        berger_coeff: &params.c * params.abs_einstein() / int(2 * params.n as i64 + 1),
    }
}

/// `(c, Lambda) -> (a c, Lambda / a)`. The profile becomes `P / a` and the
/// metric `a g`; checked exactly.
pub fn scaling_action(params: &FamilyParams, a: &Rational) -> Result<FamilyParams, FamilyError> {
    if !a.is_positive() {
        return Err(FamilyError::InvalidParams(format!("scale a = {a} must be > 0")));
    }
    let scaled = FamilyParams::new(
        params.n,
        params.lambda.clone(),
        &params.c * a,
        &params.einstein_constant / a,
        params.r1.clone(),
    )?;
    let expected = solve_p(params).scale(&a.recip());
    let actual = solve_p(&scaled);
    if expected != actual {
        return Err(FamilyError::ModelMismatch(format!(
            "scaled profile {actual} differs from {expected}"
        )));
    }
    Ok(scaled)
}

/// Factor `c (r1^2 - 1)` multiplying `g_base` on the zero section.
pub fn z_scale(params: &FamilyParams) -> Rational {
    &params.c * params.r1_sq_minus_one()
}

/// Degree `-k` line bundle over `CP^n` with round conformal infinity:
/// `lambda = (2n+2)/k`, `c = 1/k`, `Lambda = -(2n+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogueEntry {
    pub n: u32,
    pub k: u32,
    pub lambda: Rational,
    pub c: Rational,
    pub einstein_constant: Rational,
}

impl CatalogueEntry {
    pub fn params(&self, r1: Rational) -> Result<FamilyParams, FamilyError> {
        FamilyParams::new(
            self.n,
            self.lambda.clone(),
            self.c.clone(),
            self.einstein_constant.clone(),
            r1,
        )
    }

    /// Cone angle factor in the limit `r1 -> 1`: `(n+1)/k`.
    pub fn limit_alpha(&self) -> Rational {
        rat(self.n as i64 + 1, self.k as i64)
    }
}

pub fn cpn_catalogue(n: u32, k: u32) -> Result<CatalogueEntry, FamilyError> {
    if n == 0 || k == 0 {
        return Err(FamilyError::InvalidParams("catalogue needs n >= 1 and k >= 1".into()));
    }
    Ok(CatalogueEntry {
        n,
        k,
        lambda: rat(2 * n as i64 + 2, k as i64),
        c: rat(1, k as i64),
        einstein_constant: int(-(2 * n as i64 + 1)),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticSample {
    pub r: Rational,
    /// Metric coefficient over its claimed leading term, for the `dr^2`,
    /// `theta^2` and base slots.
    pub ratios: [f64; 3],
    pub deviations: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticReport {
    /// `(2n+1)/|L|` in front of `dr^2 / r^2`.
    pub dr2_leading: Rational,
    /// `c^2 |L| / (2n+1)` in front of `r^2 theta^2`.
    pub theta2_leading: Rational,
    /// `c` in front of `r^2 g_base`.
    pub base_leading: Rational,
    pub samples: Vec<AsymptoticSample>,
}

/// Large-`r` leading terms, checked exactly at `r = 10, 100, 1000`. Each
/// deviation from the leading term has to drop by at least a factor 5 per
/// decade (it is `O(1/r^2)` in practice).
pub fn asymptotic_coefficients(
    params: &FamilyParams,
    p: &LaurentPoly,
) -> Result<AsymptoticReport, FamilyError> {
    let two_n1 = int(2 * params.n as i64 + 1);
    let abs_l = params.abs_einstein();
    let dr2_leading = &two_n1 / &abs_l;
    let theta2_leading = &params.c * &params.c * &abs_l / &two_n1;
    let base_leading = params.c.clone();

    let top = 2 * params.n as i64 + 2;
    if p.max_exponent() != Some(top) || p.leading_coeff() != &abs_l / &two_n1 {
        return Err(FamilyError::ModelMismatch(format!(
            "leading term of P is not |Lambda| r^{top} / (2n+1): {p}"
        )));
    }

    let coeffs = metric_coefficients(params, p);
    let mut samples = Vec::new();
    for r in [int(10), int(100), int(1000)] {
        let r_sq = &r * &r;
        let exact = [
            coeffs.eval_dr2(&r)? * &r_sq / &dr2_leading,
            coeffs.eval_theta2(&r)? / (&r_sq * &theta2_leading),
            coeffs.eval_base(&r)? / (&r_sq * &base_leading),
        ];
        let ratios = exact.each_ref().map(to_f64);
        let deviations = exact.each_ref().map(|q| to_f64(&(q - Rational::one()).abs()));
        samples.push(AsymptoticSample { r, ratios, deviations });
    }
    let shrinking = samples.windows(2).all(|w| {
        (0..3).all(|i| w[1].deviations[i] == 0.0 || w[1].deviations[i] * 5.0 <= w[0].deviations[i])
    });
    if !shrinking {
        return Err(FamilyError::AsymptoticsMismatch {
            ratios: samples.iter().map(|s| s.ratios).collect(),
        });
    }
    Ok(AsymptoticReport {
        dr2_leading,
        theta2_leading,
        base_leading,
        samples,
    })
}

/// Flat summary record for one parameter tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub n: u32,
    #[serde(serialize_with = "crate::serde_rational")]
    pub lambda: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub c: Rational,
    #[serde(rename = "Lambda", serialize_with = "crate::serde_rational")]
    pub einstein_constant: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub r1: Rational,
    #[serde(serialize_with = "crate::serde_opt_rational")]
    pub alpha: Option<Rational>,
    #[serde(serialize_with = "crate::serde_opt_rational")]
    pub beta_sq_derived: Option<Rational>,
    #[serde(rename = "beta_sq_paper", serialize_with = "crate::serde_opt_rational")]
    pub beta_sq_printed: Option<Rational>,
    #[serde(serialize_with = "crate::serde_rational")]
    pub berger_coeff: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub z_scale: Rational,
    #[serde(rename = "P_text")]
    pub p_text: String,
    pub edge: Option<EdgeModel>,
    pub conic: Option<ConicModel>,
    pub positive: bool,
}

/// Runs every family-level computation for one tuple, with all internal
/// cross-checks active.
pub fn family_report(params: &FamilyParams) -> Result<FamilyReport, FamilyError> {
    let p = solve_p(params);
    let residual = ode_residual(params, &p);
    if !residual.is_zero() {
        return Err(FamilyError::ModelMismatch(format!("profile equation residual {residual}")));
    }
    let (edge, conic) = if params.is_conic() {
        (None, Some(conic_model(params, &p)?))
    } else {
        let edge = edge_model(params, &p)?;
        let jets = expand_at_edge(params, &p)?;
        if jets.alpha_sq != &edge.alpha * &edge.alpha {
            return Err(mismatch("alpha^2 (jet vs closed form)", &jets.alpha_sq, &(&edge.alpha * &edge.alpha)));
        }
        if jets.scale != edge.scale {
            return Err(mismatch("edge scale (jet vs closed form)", &jets.scale, &edge.scale));
        }
        (Some(edge), None)
    };
    let positive = positivity_check(params, &p, 64)?.sign_argument;
    Ok(FamilyReport {
        n: params.n,
        lambda: params.lambda.clone(),
        c: params.c.clone(),
        einstein_constant: params.einstein_constant.clone(),
        r1: params.r1.clone(),
        alpha: edge.as_ref().map(|e| e.alpha.clone()),
        beta_sq_derived: edge.as_ref().map(|e| e.beta_sq_derived.clone()),
        beta_sq_printed: edge.as_ref().map(|e| e.beta_sq_printed.clone()),
        berger_coeff: conformal_infinity(params).berger_coeff,
        z_scale: z_scale(params),
        p_text: p.to_string(),
        edge,
        conic,
        positive,
    })
}
