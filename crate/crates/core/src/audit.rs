//! Printed constants checked against their derivations.
//!
//! Each row carries a printed value, a derived value, and an arbiter: a value
//! produced by an independent route (exact jets, the smoothness requirement,
//! the defining formula for `rho1`). A candidate "holds" when it satisfies
//! the row's identity exactly at the row's tuple.

use num_traits::One;
use serde::Serialize;

use crate::exact_poly::{int, rat, to_f64, Rational};
use crate::family::{
    cone_angle, conic_model, edge_model, expand_at_edge, scaling_action, smooth_c, smooth_c_printed, solve_p,
    z_scale, FamilyError, FamilyParams,
};
use crate::limits::rho1_limit;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRow {
    pub quantity: &'static str,
    pub tuple: String,
    pub identity: &'static str,
    #[serde(serialize_with = "crate::serde_rational")]
    pub printed: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub derived: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub arbiter: Rational,
    pub printed_holds: bool,
    pub derived_holds: bool,
}

impl AuditRow {
    pub fn verdict(&self) -> &'static str {
        match (self.derived_holds, self.printed_holds) {
            (true, false) => "derived",
            (true, true) => "both",
            (false, true) => "printed",
            (false, false) => "neither",
        }
    }
}

fn describe(p: &FamilyParams) -> String {
    format!(
        "n={} lambda={} c={} Lambda={} r1={}",
        p.n(),
        p.lambda(),
        p.c(),
        p.einstein_constant(),
        p.r1()
    )
}

fn params(n: u32, lambda: Rational, c: Rational, big_l: i64, r1: Rational) -> Result<FamilyParams, FamilyError> {
    FamilyParams::new(n, lambda, c, int(big_l), r1)
}

/// `beta^2` of the edge model against the Taylor-jet value.
pub fn beta_sq_row(p: &FamilyParams) -> Result<AuditRow, FamilyError> {
    let profile = solve_p(p);
    let model = edge_model(p, &profile)?;
    let jets = expand_at_edge(p, &profile)?;
    Ok(AuditRow {
        quantity: "beta^2 near the edge",
        tuple: describe(p),
        identity: "beta^2 = (base coeff)/(ds^2 coeff) from exact jets at r = r1 + s^2",
        printed_holds: model.beta_sq_printed == jets.beta_sq,
        derived_holds: model.beta_sq_derived == jets.beta_sq,
        printed: model.beta_sq_printed,
        derived: model.beta_sq_derived,
        arbiter: jets.beta_sq,
    })
}

/// `c` for a smooth metric: the candidate must give cone angle factor one,
/// both in closed form and in the jet expansion.
pub fn smooth_c_row(n: u32, lambda: &Rational, t: &Rational) -> Result<AuditRow, FamilyError> {
    let einstein = int(-(2 * n as i64 + 1));
    let r1 = Rational::one() + t;
    let derived = smooth_c(n, lambda, &einstein, &r1)?;
    let printed = smooth_c_printed(n, lambda, t);
    let holds = |c: &Rational| -> Result<bool, FamilyError> {
        let p = FamilyParams::new(n, lambda.clone(), c.clone(), einstein.clone(), r1.clone())?;
        let jets = expand_at_edge(&p, &solve_p(&p))?;
        Ok(cone_angle(&p)?.is_one() && jets.alpha_sq.is_one())
    };
    Ok(AuditRow {
        quantity: "smooth c_t",
        tuple: format!("n={n} lambda={lambda} Lambda={einstein} t={t}"),
        identity: "alpha(c) = 1 (closed form and jet alpha^2)",
        printed_holds: holds(&printed)?,
        derived_holds: holds(&derived)?,
        printed,
        derived,
        arbiter: Rational::one(),
    })
}

/// Base coefficient of the conic model. The normalised model cannot change
/// under `(c, Lambda) -> (a c, Lambda / a)`, which only rescales `g`.
pub fn conic_base_row(p: &FamilyParams) -> Result<AuditRow, FamilyError> {
    let model = conic_model(p, &solve_p(p))?;
    let rescaled = scaling_action(p, &int(3))?;
    let rescaled_model = conic_model(&rescaled, &solve_p(&rescaled))?;
    let jet = model.base_coeff_derived.clone();
    let invariant = |value: &Rational, value_rescaled: &Rational| *value == jet && value_rescaled == value;
    Ok(AuditRow {
        quantity: "conic base coefficient",
        tuple: describe(p),
        identity: "equals the jet value and is invariant under (c,Lambda) -> (3c,Lambda/3)",
        printed_holds: invariant(&model.base_coeff_printed, &rescaled_model.base_coeff_printed),
        derived_holds: invariant(&model.base_coeff_derived, &rescaled_model.base_coeff_derived),
        printed: model.base_coeff_printed,
        derived: model.base_coeff_derived,
        arbiter: jet,
    })
}

/// Leading constant `K` of `P(1 + u) ~ K u^(n+1)` at the apex.
pub fn apex_constant_row(p: &FamilyParams) -> Result<AuditRow, FamilyError> {
    let profile = solve_p(p);
    let model = conic_model(p, &profile)?;
    let jet = profile.taylor_at(&Rational::one(), p.n() as usize + 1)?[p.n() as usize + 1].clone();
    Ok(AuditRow {
        quantity: "apex constant K",
        tuple: describe(p),
        identity: "K = (n+1)-th Taylor coefficient of P at r = 1",
        printed_holds: model.leading_constant_printed == jet,
        derived_holds: model.leading_constant == jet,
        printed: model.leading_constant_printed,
        derived: model.leading_constant,
        arbiter: jet,
    })
}

/// `rho1^2` of the Ricci-flat limit. The identity is the definition
/// `rho1(t)^2 = (c_t/t)((1+t)^2 - 1)` with the smooth `c_t`, checked exactly
/// at `t = 1/10, 1/100, 1/1000`.
pub fn rho1_row(n: u32) -> Result<AuditRow, FamilyError> {
    let limit = rho1_limit(n).map_err(|e| FamilyError::ModelMismatch(e.to_string()))?;
    let lambda = int(2);
    let einstein = int(-(2 * n as i64 + 1));
    let mut at_t = Vec::new();
    for t in [rat(1, 10), rat(1, 100), rat(1, 1000)] {
        let r1 = Rational::one() + &t;
        let c_t = smooth_c(n, &lambda, &einstein, &r1)?;
        at_t.push(c_t / &t * (&r1 * &r1 - Rational::one()));
    }
    let holds = |value: &Rational| at_t.iter().all(|v| v == value);
    Ok(AuditRow {
        quantity: "rho1^2 of the Ricci-flat limit",
        tuple: format!("n={n} lambda=2 Lambda={einstein}"),
        identity: "rho1^2 = (c_t/t)((1+t)^2 - 1) at t = 1/10, 1/100, 1/1000",
        printed_holds: holds(&limit.printed_sq),
        derived_holds: holds(&limit.derived_sq),
        printed: limit.printed_sq,
        derived: limit.derived_sq,
        arbiter: at_t[2].clone(),
    })
}

/// Fitted exponent `e` in `diam(Z) ~ t^e` along the smooth `lambda = 2`
/// family with `r1 = 1 + t`, from the factor `sqrt(c (r1^2 - 1))`.
pub fn zero_section_diameter_exponent(n: u32) -> Result<f64, FamilyError> {
    let einstein = int(-(2 * n as i64 + 1));
    let ts = [rat(1, 100), rat(1, 10_000)];
    let mut logs = Vec::new();
    for t in &ts {
        let r1 = Rational::one() + t;
        let c = smooth_c(n, &int(2), &einstein, &r1)?;
        let p = FamilyParams::new(n, int(2), c, einstein.clone(), r1)?;
        logs.push((to_f64(t).ln(), to_f64(&z_scale(&p)).sqrt().ln()));
    }
    Ok((logs[1].1 - logs[0].1) / (logs[1].0 - logs[0].0))
}

/// The full battery, in a fixed order.
pub fn run_audit() -> Result<Vec<AuditRow>, FamilyError> {
    let mut rows = Vec::new();
    for p in [
        params(1, int(2), rat(1, 3), -3, int(2))?,
        params(2, rat(3, 2), rat(2, 5), -4, rat(5, 2))?,
        params(1, int(4), int(1), -3, int(3))?,
    ] {
        rows.push(beta_sq_row(&p)?);
    }
    for (n, lambda, t) in [(1, int(2), int(1)), (2, int(2), rat(1, 2)), (1, int(1), rat(1, 3))] {
        rows.push(smooth_c_row(n, &lambda, &t)?);
    }
    for p in [
        params(1, int(2), rat(1, 3), -3, int(1))?,
        params(2, int(3), rat(1, 2), -5, int(1))?,
    ] {
        rows.push(conic_base_row(&p)?);
    }
    for n in 1..=3 {
        rows.push(rho1_row(n)?);
    }
    for p in [
        params(1, int(2), rat(1, 3), -3, int(1))?,
        params(2, int(3), rat(1, 2), -5, int(1))?,
    ] {
        rows.push(apex_constant_row(&p)?);
    }
    Ok(rows)
}
