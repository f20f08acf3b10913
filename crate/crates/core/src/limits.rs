//! Degenerations of the family: the rescaled Ricci-flat limit
//! `g_inf = U^-1 drho^2 + U rho^2 theta^2 + rho^2 g_base` with
//! `d/drho(rho^(2n+2) U) = lambda rho^(2n+1)`, and the flat cone `U = 1`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact_poly::{int, rat, to_f64, LaurentPoly, PolyError, Rational};
use crate::family::{
    cpn_catalogue, scaling_action, smooth_c, solve_p, CatalogueEntry, FamilyError, FamilyParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("grid point rho = {rho} is not above rho1 = {rho1} at t = {t}")]
    DomainError { t: f64, rho: f64, rho1: f64 },
    #[error("invalid comparison request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `U(rho) = lambda/(2n+2) (1 - (rho1/rho)^(2n+2))`. `rho1` is carried through
/// its exact square.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledProfile {
    pub n: u32,
    pub lambda: Rational,
    pub rho1_sq: Rational,
}

pub fn u_closed_form(n: u32, lambda: Rational, rho1_sq: Rational) -> Result<RescaledProfile, LimitError> {
    if n == 0 {
        return Err(LimitError::InvalidProfile("n must be >= 1".into()));
    }
    if !lambda.is_positive() {
        return Err(LimitError::InvalidProfile(format!("lambda = {lambda} must be > 0")));
    }
    if rho1_sq.is_negative() {
        return Err(LimitError::InvalidProfile(format!("rho1^2 = {rho1_sq} must be >= 0")));
    }
    Ok(RescaledProfile { n, lambda, rho1_sq })
}

impl RescaledProfile {
    /// `lambda / (2n+2)`, the value of `U` at infinity.
    pub fn asymptote(&self) -> Rational {
        &self.lambda / int(2 * self.n as i64 + 2)
    }

    pub fn rho1(&self) -> f64 {
        to_f64(&self.rho1_sq).sqrt()
    }

    /// `U` as a Laurent polynomial in `rho`.
    pub fn u_poly(&self) -> LaurentPoly {
        let k = 2 * self.n as i64 + 2;
        let rho1_pow = num_traits::pow(self.rho1_sq.clone(), self.n as usize + 1);
        LaurentPoly::from_terms([(0, Rational::one()), (-k, -rho1_pow)]).scale(&self.asymptote())
    }

    /// Exact `U` from `rho^2`.
    pub fn u_exact(&self, rho_sq: &Rational) -> Result<Rational, LimitError> {
        Ok(self.u_poly().eval_at_sq(rho_sq)?)
    }

    pub fn u_at(&self, rho: f64) -> f64 {
        let ratio = to_f64(&self.rho1_sq) / (rho * rho);
        to_f64(&self.asymptote()) * (1.0 - ratio.powi(self.n as i32 + 1))
    }
}

/// Largest `|d/drho(rho^(2n+2) U) - lambda rho^(2n+1)|` over the samples,
/// computed exactly from the closed form (it is zero).
pub fn u_ode_residual(profile: &RescaledProfile, rho_samples: &[Rational]) -> Result<Rational, LimitError> {
    let k = 2 * profile.n as i64 + 2;
    let weighted = &profile.u_poly() * &LaurentPoly::monomial(Rational::one(), k);
    let residual = &weighted.derivative() - &LaurentPoly::monomial(profile.lambda.clone(), k - 1);
    let mut worst = Rational::zero();
    for rho in rho_samples {
        if !rho.is_positive() || rho * rho <= profile.rho1_sq {
            return Err(LimitError::InvalidRequest(format!("sample rho = {rho} is not above rho1")));
        }
        let value = residual.eval(rho)?.abs();
        if value > worst {
            worst = value;
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RescalePoint {
    pub rho_sq: Rational,
    pub rho: f64,
    pub u: Rational,
}

/// `rho^2 = c (r^2 - 1)` and `U = c P(r) / (r^2 - 1)^(n+1)`, exact.
pub fn rescale_map(params: &FamilyParams, r: &Rational) -> Result<RescalePoint, LimitError> {
    if r <= params.r1() || *r <= Rational::one() {
        return Err(LimitError::InvalidRequest(format!("r = {r} must exceed r1 = {}", params.r1())));
    }
    let s = r * r - Rational::one();
    let rho_sq = params.c() * &s;
    let p = solve_p(params).eval(r)?;
    let u = params.c() * p / num_traits::pow(s, params.n() as usize + 1);
    Ok(RescalePoint {
        rho: to_f64(&rho_sq).sqrt(),
        rho_sq,
        u,
    })
}

/// Exact `theta^2` coefficient of the metric, `c^2 P / (r^2-1)^n`, next to
/// `U rho^2` from [`rescale_map`]. The two agree identically.
pub fn theta_identity(params: &FamilyParams, r: &Rational) -> Result<(Rational, Rational), LimitError> {
    let point = rescale_map(params, r)?;
    let s = r * r - Rational::one();
    let direct = params.c() * params.c() * solve_p(params).eval(r)? / num_traits::pow(s, params.n() as usize);
    Ok((direct, &point.u * &point.rho_sq))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rho1Limit {
    /// `(t, rho1(t)^2)` with `rho1(t)^2 = c_t (t + 2)` for the smooth `c_t`.
    pub samples: Vec<(f64, f64)>,
    #[serde(serialize_with = "crate::serde_rational")]
    pub derived_sq: Rational,
    pub derived: f64,
    #[serde(serialize_with = "crate::serde_rational")]
    pub printed_sq: Rational,
    pub printed: f64,
    pub richardson_consistent: bool,
}

/// Limit of `rho1(t)^2 = (c_t/t)((1+t)^2 - 1)` along the smooth `lambda = 2`
/// family, extrapolated from `t = 1e-4, 1e-6, 1e-8`, next to the printed
/// `rho1^2 = 4/(2n+1)`.
pub fn rho1_limit(n: u32) -> Result<Rho1Limit, LimitError> {
    let lambda = int(2);
    let einstein = int(-(2 * n as i64 + 1));
    let ts = [rat(1, 10_000), rat(1, 1_000_000), rat(1, 100_000_000)];
    let mut values = Vec::with_capacity(ts.len());
    for t in &ts {
        let r1 = Rational::one() + t;
        let c_t = smooth_c(n, &lambda, &einstein, &r1)?;
        values.push(c_t / t * (&r1 * &r1 - Rational::one()));
    }
    let q = int(100);
    let extrapolate = |coarse: &Rational, fine: &Rational| (&q * fine - coarse) / (&q - Rational::one());
    let first = extrapolate(&values[0], &values[1]);
    let second = extrapolate(&values[1], &values[2]);
    let gap = to_f64(&(&first - &second).abs());
    let richardson_consistent = gap <= 1e-6 * to_f64(&second.abs());
    let printed_sq = rat(4, 2 * n as i64 + 1);
    Ok(Rho1Limit {
        samples: ts.iter().zip(&values).map(|(t, v)| (to_f64(t), to_f64(v))).collect(),
        derived: to_f64(&second).sqrt(),
        derived_sq: second,
        printed: to_f64(&printed_sq).sqrt(),
        printed_sq,
        richardson_consistent,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitSmoothness {
    /// `U'(rho1) rho1 / 2`; exactly `lambda / 2`.
    pub alpha_inf: Rational,
    /// Model `ds2 ds^2 + theta2 s^2 theta^2 + base g_base` with `rho = rho1 + s^2`.
    pub ds2_coeff: f64,
    pub theta2_coeff: f64,
    pub base_coeff: Rational,
}

/// Cone angle factor of `g_inf` at `rho = rho1`.
pub fn limit_smoothness(profile: &RescaledProfile) -> Result<LimitSmoothness, LimitError> {
    if !profile.rho1_sq.is_positive() {
        return Err(LimitError::InvalidProfile("rho1 must be > 0".into()));
    }
    // rho U'(rho) only has even exponents, so it is exact from rho1^2.
    let rho_u_prime = profile.u_poly().derivative().shift(1);
    let rho1_u_prime = rho_u_prime.eval_at_sq(&profile.rho1_sq)?;
    let alpha_inf = &rho1_u_prime / int(2);
    let rho1 = profile.rho1();
    let u_prime = to_f64(&rho1_u_prime) / rho1;
    Ok(LimitSmoothness {
        alpha_inf,
        // U ~ U'(rho1) s^2 and drho^2 = 4 s^2 ds^2
        ds2_coeff: 4.0 / u_prime,
        theta2_coeff: u_prime * rho1 * rho1,
        base_coeff: profile.rho1_sq.clone(),
    })
}

/// Degree `-1` bundle over `CP^n` and the constant profile `U = 1`, whose
/// `g_inf` is the flat metric.
pub fn flat_recovery(n: u32) -> Result<(CatalogueEntry, RescaledProfile), LimitError> {
    let entry = cpn_catalogue(n, 1)?;
    let profile = u_closed_form(n, entry.lambda.clone(), Rational::zero())?;
    Ok((entry, profile))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitRow {
    pub t: f64,
    pub rho: f64,
    pub dev_drho2: f64,
    pub dev_theta2: f64,
    pub dev_base: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitStep {
    pub t: f64,
    /// Sup over the grid of the three coefficient deviations.
    pub sup_dev: [f64; 3],
    pub theta_identity_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FittedOrders {
    pub drho2: Option<f64>,
    pub theta2: Option<f64>,
    pub base: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitSummary {
    pub fitted_order_per_coefficient: FittedOrders,
    pub rho1_derived: f64,
    pub rho1_paper: f64,
    pub steps: Vec<LimitStep>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitComparison {
    pub rows: Vec<LimitRow>,
    pub summary: LimitSummary,
}

/// Least-squares slope of `log dev` against `log t`.
fn fitted_order(ts: &[f64], devs: &[f64]) -> Option<f64> {
    let points: Vec<(f64, f64)> = ts
        .iter()
        .zip(devs)
        .filter(|(_, &d)| d > 0.0)
        .map(|(&t, &d)| (t.ln(), d.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Compares `t^-1 g_t` (smooth `lambda = 2` family, `r1 = 1 + t`, rescaled by
/// `(c, Lambda) -> (c/t, t Lambda)`) with `g_inf` on a `rho` grid.
///
/// `g_t` in `(rho, U_t)` variables is `(U_t r^2)^-1 drho^2 + U_t rho^2 theta^2
/// + rho^2 g_base`; the limit uses the derived `rho1`.
pub fn limit_comparison(n: u32, t_values: &[Rational], rho_grid: &[f64]) -> Result<LimitComparison, LimitError> {
    if t_values.is_empty() || rho_grid.is_empty() {
        return Err(LimitError::InvalidRequest("need at least one t and one rho".into()));
    }
    if t_values.iter().any(|t| !t.is_positive()) {
        return Err(LimitError::InvalidRequest("t values must be > 0".into()));
    }
    if rho_grid.iter().any(|rho| !rho.is_finite()) {
        return Err(LimitError::InvalidRequest("rho grid must be finite".into()));
    }
    let lambda = int(2);
    let einstein = int(-(2 * n as i64 + 1));
    let rho1 = rho1_limit(n)?;
    let limit = u_closed_form(n, lambda.clone(), rho1.derived_sq.clone())?;

    let mut rows = Vec::new();
    let mut steps = Vec::new();
    for t in t_values {
        let t_f = to_f64(t);
        let r1 = Rational::one() + t;
        let c_t = smooth_c(n, &lambda, &einstein, &r1)?;
        let base = FamilyParams::new(n, lambda.clone(), c_t, einstein.clone(), r1.clone())?;
        let scaled = scaling_action(&base, &t.recip())?;
        let c_scaled = to_f64(scaled.c());
        let s1 = &r1 * &r1 - Rational::one();
        let rho1_t_sq = to_f64(&(scaled.c() * &s1));
        let s1_f = to_f64(&s1);
        let r1_f = to_f64(&r1);
        // Taylor coefficients about r1 keep P accurate where it is tiny.
        let jet: Vec<f64> = solve_p(&scaled)
            .shifted_to(&r1)
            .expect("P is a polynomial")
            .iter()
            .map(to_f64)
            .collect();

        let mut sup = [0.0f64; 3];
        for &rho in rho_grid {
            let rho_sq = rho * rho;
            if rho <= 0.0 || rho_sq <= rho1_t_sq {
                return Err(LimitError::DomainError {
                    t: t_f,
                    rho,
                    rho1: rho1_t_sq.sqrt(),
                });
            }
            let x = rho_sq / c_scaled;
            let r = (1.0 + x).sqrt();
            let u = (x - s1_f) / (r + r1_f);
            let p = jet.iter().rev().fold(0.0, |acc, a| acc * u + a);
            let u_t = c_scaled * p / x.powi(n as i32 + 1);
            let u_inf = limit.u_at(rho);
            let dev = [
                (1.0 / (u_t * r * r) - 1.0 / u_inf).abs(),
                ((u_t - u_inf) * rho_sq).abs(),
                0.0,
            ];
            for i in 0..3 {
                sup[i] = sup[i].max(dev[i]);
            }
            rows.push(LimitRow {
                t: t_f,
                rho,
                dev_drho2: dev[0],
                dev_theta2: dev[1],
                dev_base: dev[2],
            });
        }

        let mut theta_identity_exact = true;
        for &rho in rho_grid {
            let r = crate::exact_poly::from_f64_decimal((1.0 + rho * rho / c_scaled).sqrt());
            if r <= r1 {
                continue;
            }
            let (direct, via_u) = theta_identity(&scaled, &r)?;
            theta_identity_exact &= direct == via_u;
        }
        steps.push(LimitStep {
            t: t_f,
            sup_dev: sup,
            theta_identity_exact,
        });
    }

    let ts: Vec<f64> = steps.iter().map(|s| s.t).collect();
    let column = |i: usize| steps.iter().map(|s| s.sup_dev[i]).collect::<Vec<_>>();
    let summary = LimitSummary {
        fitted_order_per_coefficient: FittedOrders {
            drho2: fitted_order(&ts, &column(0)),
            theta2: fitted_order(&ts, &column(1)),
            base: fitted_order(&ts, &column(2)),
        },
        rho1_derived: rho1.derived,
        rho1_paper: rho1.printed,
        steps,
    };
    Ok(LimitComparison { rows, summary })
}
