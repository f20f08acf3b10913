//! One-parameter sweeps through the family.

use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::exact_poly::{from_f64_decimal, int, to_f64, Rational};
use crate::family::{
    alpha_continuation, conformal_infinity, cpn_catalogue, edge_model, smooth_c, solve_p, z_scale, FamilyError,
    FamilyParams,
};
use crate::geom::{curvature, page_pope_chart, GeomError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    R1,
    C,
    /// `r1 = 1 + t` with the smooth `c`.
    T,
    /// Catalogue degree; `lambda`, `c` and `Lambda` follow from `k`.
    K,
}

impl FromStr for SweepParameter {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "r1" => Ok(Self::R1),
            "c" => Ok(Self::C),
            "t" => Ok(Self::T),
            "k" => Ok(Self::K),
            other => Err(SweepError::InvalidSpec(format!("unknown parameter {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Self::Linear),
            "log" => Ok(Self::Log),
            other => Err(SweepError::InvalidSpec(format!("unknown spacing {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: Rational,
    pub stop: Rational,
    pub count: usize,
    pub spacing: Spacing,
    /// Values of the parameters that are not swept.
    pub base: FamilyParams,
    /// Add the largest Einstein residual over a fixed point set (n = 1 only).
    pub verify: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.count < 2 {
            return Err(SweepError::InvalidSpec(format!("count = {} must be >= 2", self.count)));
        }
        if self.start >= self.stop {
            return Err(SweepError::InvalidSpec(format!(
                "start = {} must be below stop = {}",
                self.start, self.stop
            )));
        }
        if self.spacing == Spacing::Log && !self.start.is_positive() {
            return Err(SweepError::InvalidSpec("log spacing needs start > 0".into()));
        }
        if self.verify && self.base.n() != 1 {
            return Err(SweepError::Geom(GeomError::UnsupportedDimension(self.base.n())));
        }
        Ok(())
    }

    /// Grid values in order. Linear grids are exact; log grids are rounded
    /// to the decimal grid of [`from_f64_decimal`].
    pub fn grid(&self) -> Result<Vec<Rational>, SweepError> {
        self.validate()?;
        let last = int(self.count as i64 - 1);
        Ok(match self.spacing {
            Spacing::Linear => (0..self.count)
                .map(|i| &self.start + (&self.stop - &self.start) * int(i as i64) / &last)
                .collect(),
            Spacing::Log => {
                let (a, b) = (to_f64(&self.start).ln(), to_f64(&self.stop).ln());
                (0..self.count)
                    .map(|i| {
                        if i == 0 {
                            self.start.clone()
                        } else if i + 1 == self.count {
                            self.stop.clone()
                        } else {
                            from_f64_decimal((a + (b - a) * i as f64 / (self.count - 1) as f64).exp())
                        }
                    })
                    .collect()
            }
        })
    }

    fn params_at(&self, value: &Rational) -> Result<(FamilyParams, Option<u32>), SweepError> {
        let base = &self.base;
        Ok(match self.parameter {
            SweepParameter::R1 => (base.with_r1(value.clone())?, None),
            SweepParameter::C => (base.with_c(value.clone())?, None),
            SweepParameter::T => {
                if !value.is_positive() {
                    return Err(SweepError::InvalidSpec(format!("t = {value} must be > 0")));
                }
                let r1 = Rational::one() + value;
                let c = smooth_c(base.n(), base.lambda(), base.einstein_constant(), &r1)?;
                (
                    FamilyParams::new(base.n(), base.lambda().clone(), c, base.einstein_constant().clone(), r1)?,
                    None,
                )
            }
            SweepParameter::K => {
                let k = value
                    .is_integer()
                    .then(|| value.to_integer().to_u32())
                    .flatten()
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| SweepError::InvalidSpec(format!("k = {value} is not a positive integer")))?;
                (cpn_catalogue(base.n(), k)?.params(base.r1().clone())?, Some(k))
            }
        })
    }
}

/// One grid point. Rationals serialise as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    #[serde(serialize_with = "crate::serde_rational")]
    pub value: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub r1: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub c: Rational,
    pub k: Option<u32>,
    #[serde(serialize_with = "crate::serde_rational")]
    pub alpha: Rational,
    /// Absent on the conic member `r1 = 1`.
    #[serde(serialize_with = "crate::serde_opt_rational")]
    pub beta_sq_derived: Option<Rational>,
    #[serde(serialize_with = "crate::serde_rational")]
    pub berger_coeff: Rational,
    #[serde(serialize_with = "crate::serde_rational")]
    pub z_scale: Rational,
    pub einstein_residual: Option<f64>,
}

/// Points used by `verify`, as offsets above the edge and base positions.
const VERIFY_POINTS: [(f64, f64, f64, f64); 5] = [
    (0.25, 0.5, 0.1, -0.2),
    (0.5, 1.7, -0.4, 0.3),
    (1.0, 3.0, 0.0, 0.6),
    (2.0, 4.4, 0.5, 0.5),
    (4.0, 5.9, -0.7, -0.1),
];

fn max_residual(params: &FamilyParams) -> Result<f64, SweepError> {
    let chart = page_pope_chart(params)?;
    let lambda = to_f64(params.einstein_constant());
    let lower = to_f64(params.r1()).max(1.0);
    let mut worst = 0.0f64;
    for (dr, psi, u, v) in VERIFY_POINTS {
        let report = curvature(&chart, &[lower + dr, psi, u, v])?;
        worst = worst.max(report.einstein_residual(lambda));
    }
    Ok(worst)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    let grid = spec.grid()?;
    let mut rows = Vec::with_capacity(grid.len());
    for (index, value) in grid.into_iter().enumerate() {
        let (params, k) = spec.params_at(&value)?;
        let beta_sq_derived = if params.is_conic() {
            None
        } else {
            Some(edge_model(&params, &solve_p(&params))?.beta_sq_derived)
        };
        let einstein_residual = if spec.verify { Some(max_residual(&params)?) } else { None };
        rows.push(SweepRow {
            index,
            r1: params.r1().clone(),
            c: params.c().clone(),
            k,
            alpha: alpha_continuation(&params),
            beta_sq_derived,
            berger_coeff: conformal_infinity(&params).berger_coeff,
            z_scale: z_scale(&params),
            einstein_residual,
            value,
        });
    }
    Ok(rows)
}

/// True when the values strictly increase.
pub fn strictly_increasing(values: &[Rational]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_poly::rat;
    use num_traits::Zero;

    fn catalogue_spec(parameter: SweepParameter, start: Rational, stop: Rational, count: usize) -> SweepSpec {
        SweepSpec {
            parameter,
            start,
            stop,
            count,
            spacing: Spacing::Linear,
            base: cpn_catalogue(1, 1).unwrap().params(int(1)).unwrap(),
            verify: false,
        }
    }

    #[test]
    fn alpha_increases_along_r1() {
        let spec = catalogue_spec(SweepParameter::R1, rat(101, 100), int(10), 40);
        let rows = run_sweep(&spec).unwrap();
        let alphas: Vec<_> = rows.iter().map(|r| r.alpha.clone()).collect();
        assert!(strictly_increasing(&alphas));
        assert_eq!(rows.last().unwrap().r1, int(10));
    }

    #[test]
    fn k_sweep_hits_catalogue_limits() {
        let rows = run_sweep(&catalogue_spec(SweepParameter::K, int(1), int(5), 5)).unwrap();
        for (k, row) in (1..=5).zip(&rows) {
            assert_eq!(row.k, Some(k));
            assert_eq!(row.alpha, rat(2, k as i64));
            assert!(row.beta_sq_derived.is_none());
        }
    }

    #[test]
    fn minimal_and_malformed() {
        let rows = run_sweep(&catalogue_spec(SweepParameter::C, rat(1, 2), int(2), 2)).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(run_sweep(&catalogue_spec(SweepParameter::C, int(2), int(1), 3)).is_err());
        assert!(run_sweep(&catalogue_spec(SweepParameter::C, int(1), int(2), 1)).is_err());
        let mut log = catalogue_spec(SweepParameter::C, Rational::zero(), int(2), 3);
        log.spacing = Spacing::Log;
        assert!(log.validate().is_err());
        assert!(run_sweep(&catalogue_spec(SweepParameter::K, rat(1, 2), int(2), 3)).is_err());
    }

    #[test]
    fn smooth_family_has_unit_cone_angle() {
        let mut spec = catalogue_spec(SweepParameter::T, rat(1, 10), int(2), 4);
        spec.base = FamilyParams::new(1, int(2), int(1), int(-3), int(1)).unwrap();
        spec.spacing = Spacing::Log;
        spec.verify = true;
        for row in run_sweep(&spec).unwrap() {
            assert!(row.alpha.is_one());
            assert!(row.einstein_residual.unwrap() < 1e-6);
        }
    }
}
