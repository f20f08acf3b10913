//! Concrete charts. Bundle metrics `A dr^2 + B theta^2 + C g_base` use
//! coordinates `(r, psi, u, v)` with
//!
//! - `g_base = (4/lambda)(du^2 + dv^2)/(1 + w)^2`, `w = u^2 + v^2`, so that
//!   `Ric(g_base) = lambda g_base`;
//! - `theta = dpsi + f(w)(u dv - v du)` with `f = -4/(lambda (1 + w))`, the
//!   rotationally symmetric solution of `d(theta) = -2 omega` that is regular
//!   at the origin (`omega` is the area form of `g_base`).

use std::f64::consts::TAU;
use std::sync::Arc;

use num_traits::Signed;

use super::chart::{ChartMetric, MetricJets};
use super::jet::Jet2;
use super::GeomError;
use crate::exact_poly::{to_f64, Rational};
use crate::family::{solve_p, FamilyParams};
use crate::limits::RescaledProfile;

type Coefficients = dyn Fn(Jet2<4>) -> (Jet2<4>, Jet2<4>, Jet2<4>) + Send + Sync;

/// Flat metric `sum dx_i^2` on all of `R^D`.
pub fn euclidean<const D: usize>() -> ChartMetric<D> {
    ChartMetric::new(
        format!("euclidean-{D}"),
        |_| std::array::from_fn(|i| std::array::from_fn(|j| Jet2::constant(if i == j { 1.0 } else { 0.0 }))),
        |_| true,
    )
}

fn base_factor<const D: usize>(lambda: f64, u: Jet2<D>, v: Jet2<D>) -> (Jet2<D>, Jet2<D>) {
    let one_plus_w = u * u + v * v + 1.0;
    let h = (4.0 / lambda) / (one_plus_w * one_plus_w);
    let f = -(4.0 / lambda) / one_plus_w;
    (h, f)
}

/// The round 2-sphere `g_base` of Gauss curvature `lambda`, stereographic chart.
pub fn round_sphere(lambda: f64) -> ChartMetric<2> {
    ChartMetric::new(
        format!("sphere lambda={lambda}"),
        move |x| {
            let (h, _) = base_factor(lambda, x[0], x[1]);
            let zero = Jet2::constant(0.0);
            [[h, zero], [zero, h]]
        },
        |_| true,
    )
}

/// `|d(A) + 2 omega|` at `(u, v)`, with the exterior derivative of the
/// connection potential taken from jets.
pub fn base_connection_defect(lambda: f64, u: f64, v: f64) -> f64 {
    let [uj, vj] = Jet2::<2>::seed(&[u, v]);
    let (h, f) = base_factor(lambda, uj, vj);
    // A = A_u du + A_v dv
    let a_u = -(f * vj);
    let a_v = f * uj;
    let d_a = a_v.grad[0] - a_u.grad[1];
    (d_a + 2.0 * h.value).abs()
}

fn bundle_chart(
    name: String,
    lambda: f64,
    coefficients: Arc<Coefficients>,
    domain: impl Fn(&[f64; 4]) -> bool + Send + Sync + 'static,
) -> ChartMetric<4> {
    ChartMetric::new(
        name,
        move |x| -> MetricJets<4> {
            let (a, b, c) = coefficients(x[0]);
            let (u, v) = (x[2], x[3]);
            let (h, f) = base_factor(lambda, u, v);
            let theta_u = -(f * v);
            let theta_v = f * u;
            let ch = c * h;
            let zero = Jet2::constant(0.0);
            let g_uu = b * theta_u * theta_u + ch;
            let g_vv = b * theta_v * theta_v + ch;
            let g_uv = b * theta_u * theta_v;
            let g_pu = b * theta_u;
            let g_pv = b * theta_v;
            [
                [a, zero, zero, zero],
                [zero, b, g_pu, g_pv],
                [zero, g_pu, g_uu, g_uv],
                [zero, g_pv, g_uv, g_vv],
            ]
        },
        domain,
    )
}

fn in_fibre_and_disk(x: &[f64; 4]) -> bool {
    x[1] > 0.0 && x[1] < TAU && x[2] * x[2] + x[3] * x[3] < 1.0
}

/// The `n = 1` member of the family in `(r, psi, u, v)`:
/// `(r^2-1)/P dr^2 + c^2 P/(r^2-1) theta^2 + c (r^2-1) g_base`.
pub fn page_pope_chart(params: &FamilyParams) -> Result<ChartMetric<4>, GeomError> {
    if params.n() != 1 {
        return Err(GeomError::UnsupportedDimension(params.n()));
    }
    let profile = solve_p(params);
    // Expanding about r1 keeps P accurate close to the edge.
    let shifted = profile
        .shifted_to(params.r1())
        .ok_or_else(|| GeomError::InvalidChart("profile is not a polynomial".into()))?;
    let coeffs: Vec<f64> = shifted.iter().map(to_f64).collect();
    let r1 = to_f64(params.r1());
    let c = to_f64(params.c());
    let lambda = to_f64(params.lambda());
    let lower = r1.max(1.0);
    let coefficients: Arc<Coefficients> = Arc::new(move |r| {
        let p = (r - r1).polynomial(&coeffs);
        let q = r * r - 1.0;
        (q / p, c * c * p / q, c * q)
    });
    let name = format!(
        "page-pope lambda={} c={} Lambda={} r1={}",
        params.lambda(),
        params.c(),
        params.einstein_constant(),
        params.r1()
    );
    Ok(bundle_chart(name, lambda, coefficients, move |x| {
        x[0] > lower && in_fibre_and_disk(x)
    }))
}

/// The limit metric `U^-1 drho^2 + U rho^2 theta^2 + rho^2 g_base` in
/// `(rho, psi, u, v)`, with base and connection data for `profile.lambda`.
pub fn rescaled_chart(profile: &RescaledProfile) -> Result<ChartMetric<4>, GeomError> {
    if profile.n != 1 {
        return Err(GeomError::UnsupportedDimension(profile.n));
    }
    if !profile.lambda.is_positive() || profile.rho1_sq.is_negative() {
        return Err(GeomError::InvalidChart(format!(
            "lambda = {}, rho1^2 = {}",
            profile.lambda, profile.rho1_sq
        )));
    }
    let asymptote = to_f64(&profile.asymptote());
    let rho1_pow: Rational = num_traits::pow(profile.rho1_sq.clone(), profile.n as usize + 1);
    let rho1_pow = to_f64(&rho1_pow);
    let exponent = -(2 * profile.n as i32 + 2);
    let lambda = to_f64(&profile.lambda);
    let rho1 = profile.rho1();
    let coefficients: Arc<Coefficients> = Arc::new(move |rho| {
        let u = (1.0 - rho.powi(exponent) * rho1_pow) * asymptote;
        let rho_sq = rho * rho;
        (u.recip(), u * rho_sq, rho_sq)
    });
    let name = format!("rescaled lambda={} rho1^2={}", profile.lambda, profile.rho1_sq);
    Ok(bundle_chart(name, lambda, coefficients, move |x| {
        x[0] > rho1 && x[0] > 0.0 && in_fibre_and_disk(x)
    }))
}

/// The same metric after the inversion `(u, v) -> (u, v)/(u^2 + v^2)` of the
/// coordinates at `u_index`, `u_index + 1`. The map is an involution, so the
/// new coordinates of a point are again its image under the inversion.
pub fn invert_base<const D: usize>(chart: &ChartMetric<D>, u_index: usize) -> Result<ChartMetric<D>, GeomError> {
    if u_index + 1 >= D {
        return Err(GeomError::InvalidChart(format!("no coordinate pair at {u_index} in dimension {D}")));
    }
    let (iu, iv) = (u_index, u_index + 1);
    let original = chart.clone();
    Ok(chart.pullback(
        format!("{} (inverted)", chart.name()),
        move |y| {
            let (u, v) = (y[iu], y[iv]);
            let w = u * u + v * v;
            let w_sq = w * w;
            let mut x = *y;
            x[iu] = u / w;
            x[iv] = v / w;
            let mut jac: [[Jet2<D>; D]; D] = std::array::from_fn(|i| {
                std::array::from_fn(|j| Jet2::constant(if i == j { 1.0 } else { 0.0 }))
            });
            jac[iu][iu] = (v * v - u * u) / w_sq;
            jac[iu][iv] = -2.0 * u * v / w_sq;
            jac[iv][iu] = jac[iu][iv];
            jac[iv][iv] = (u * u - v * v) / w_sq;
            (x, jac)
        },
        move |y| {
            let w = y[iu] * y[iu] + y[iv] * y[iv];
            if w == 0.0 {
                return false;
            }
            let mut x = *y;
            x[iu] /= w;
            x[iv] /= w;
            original.contains(&x)
        },
    ))
}

/// Image of a point under the base inversion.
pub fn invert_point<const D: usize>(point: &[f64; D], u_index: usize) -> [f64; D] {
    let w = point[u_index] * point[u_index] + point[u_index + 1] * point[u_index + 1];
    let mut out = *point;
    out[u_index] /= w;
    out[u_index + 1] /= w;
    out
}

#[cfg(test)]
mod tests {
    use super::super::curvature::curvature;
    use super::*;
    use crate::exact_poly::{int, rat};
    use crate::limits::u_closed_form;

    fn hyperbolic_params() -> FamilyParams {
        FamilyParams::new(1, int(4), int(1), int(-3), int(1)).unwrap()
    }

    #[test]
    fn sphere_is_einstein_with_lambda() {
        for lambda in [1.0, 2.0, 4.0] {
            let report = curvature(&round_sphere(lambda), &[0.4, -1.3]).unwrap();
            assert!(report.einstein_residual(lambda) < 1e-8);
            assert!((report.scalar - 2.0 * lambda).abs() < 1e-8);
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(report.christoffel[k][i][j], report.christoffel[k][j][i]);
                    }
                }
            }
        }
    }

    #[test]
    fn connection_potential_solves_curvature_equation() {
        for (u, v) in [(0.0, 0.0), (0.3, -0.5), (-0.9, 0.1)] {
            assert!(base_connection_defect(2.0, u, v) < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_member_is_hyperbolic() {
        let chart = page_pope_chart(&hyperbolic_params()).unwrap();
        let report = curvature(&chart, &[2.0, 0.7, 0.3, -0.2]).unwrap();
        assert!(report.einstein_residual(-3.0) < 1e-10);
        assert!((report.scalar + 12.0).abs() < 1e-9);
        assert!((report.full_contraction() - report.scalar).abs() < 1e-9);
        let k = report.sectional(&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.5, 0.0]).unwrap();
        assert!((k + 1.0).abs() < 1e-9);
    }

    #[test]
    fn edge_member_is_einstein() {
        let p = FamilyParams::new(1, int(2), rat(1, 3), int(-3), int(1)).unwrap();
        let chart = page_pope_chart(&p).unwrap();
        let report = curvature(&chart, &[1.7, 0.4, 0.2, 0.1]).unwrap();
        assert!(report.einstein_residual(-3.0) < 1e-6, "{}", report.einstein_residual(-3.0));
    }

    #[test]
    fn rejects_higher_n() {
        let p = FamilyParams::new(2, int(3), int(1), int(-5), int(2)).unwrap();
        assert_eq!(page_pope_chart(&p).unwrap_err(), GeomError::UnsupportedDimension(2));
    }

    #[test]
    fn limits_are_flat_and_ricci_flat() {
        let flat = rescaled_chart(&u_closed_form(1, int(4), int(0)).unwrap()).unwrap();
        let report = curvature(&flat, &[1.3, 1.0, 0.2, -0.4]).unwrap();
        assert!(report.riemann_max() < 1e-12, "{}", report.riemann_max());

        let eh = rescaled_chart(&u_closed_form(1, int(2), rat(2, 3)).unwrap()).unwrap();
        let rho1 = (2.0f64 / 3.0).sqrt();
        let report = curvature(&eh, &[1.5 * rho1, 1.0, 0.2, -0.4]).unwrap();
        assert!(report.einstein_residual(0.0) < 1e-6, "{}", report.einstein_residual(0.0));
        eh.check_metric(&[2.0 * rho1, 1.0, 0.2, -0.4]).unwrap();
    }

    #[test]
    fn inversion_preserves_the_verdict() {
        let p = FamilyParams::new(1, int(2), rat(1, 3), int(-3), int(1)).unwrap();
        let chart = page_pope_chart(&p).unwrap();
        let inverted = invert_base(&chart, 2).unwrap();
        let point = [2.5, 1.0, 0.3, 0.4];
        let moved = invert_point(&point, 2);
        let a = curvature(&chart, &point).unwrap();
        let b = curvature(&inverted, &moved).unwrap();
        assert!((a.scalar - b.scalar).abs() < 1e-8);
        assert!(b.einstein_residual(-3.0) < 1e-6);
        assert!(inverted.metric_jets(&point).is_err());
    }
}
