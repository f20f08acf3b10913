use super::chart::ChartMetric;
use super::curvature::{CurvatureReport, MetricDerivatives};
use super::GeomError;

/// Step of the finite-difference oracle.
pub const FD_STEP: f64 = 1e-3;
/// Every point within this many steps of the evaluation point must lie in the domain.
pub const FD_MARGIN_STEPS: f64 = 10.0;

const OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
const FIRST: [f64; 4] = [1.0, -8.0, 8.0, -1.0];

/// Curvature from fourth-order central differences of the metric values.
/// Never reads jet derivatives.
pub fn fd_oracle<const D: usize>(chart: &ChartMetric<D>, point: &[f64; D]) -> Result<CurvatureReport<D>, GeomError> {
    let h = FD_STEP;
    for i in 0..D {
        for sign in [-1.0, 1.0] {
            let mut probe = *point;
            probe[i] += sign * FD_MARGIN_STEPS * h;
            if !chart.contains(&probe) {
                return Err(GeomError::StepTooLarge(point.to_vec()));
            }
        }
    }
    let at = |shifts: &[(usize, f64)]| -> Result<[[f64; D]; D], GeomError> {
        let mut probe = *point;
        for &(i, k) in shifts {
            probe[i] += k * h;
        }
        chart.metric_values(&probe)
    };

    let g = at(&[])?;
    let mut dg = [[[0.0; D]; D]; D];
    let mut ddg = [[[[0.0; D]; D]; D]; D];
    for k in 0..D {
        let samples: Vec<_> = OFFSETS.iter().map(|&o| at(&[(k, o)])).collect::<Result<_, _>>()?;
        for i in 0..D {
            for j in 0..D {
                let s: Vec<f64> = samples.iter().map(|m| m[i][j]).collect();
                dg[k][i][j] = (0..4).map(|a| FIRST[a] * s[a]).sum::<f64>() / (12.0 * h);
                ddg[k][k][i][j] = (-s[3] + 16.0 * s[2] - 30.0 * g[i][j] + 16.0 * s[1] - s[0]) / (12.0 * h * h);
            }
        }
        for l in 0..k {
            let mut acc = [[0.0; D]; D];
            for a in 0..4 {
                for b in 0..4 {
                    let m = at(&[(k, OFFSETS[a]), (l, OFFSETS[b])])?;
                    let w = FIRST[a] * FIRST[b];
                    for i in 0..D {
                        for j in 0..D {
                            acc[i][j] += w * m[i][j];
                        }
                    }
                }
            }
            for i in 0..D {
                for j in 0..D {
                    let v = acc[i][j] / (144.0 * h * h);
                    ddg[k][l][i][j] = v;
                    ddg[l][k][i][j] = v;
                }
            }
        }
    }
    CurvatureReport::from_derivatives(*point, &MetricDerivatives { g, dg, ddg })
}

#[cfg(test)]
mod tests {
    use super::super::charts::{euclidean, round_sphere};
    use super::super::curvature::curvature;
    use super::*;

    #[test]
    fn flat_chart_gives_zero() {
        let chart = euclidean::<3>();
        let report = fd_oracle(&chart, &[0.1, 0.2, 0.3]).unwrap();
        assert!(report.riemann_max() < 1e-6);
    }

    #[test]
    fn sphere_matches_jets() {
        let chart = round_sphere(2.0);
        let p = [0.3, -0.2];
        let fd = fd_oracle(&chart, &p).unwrap();
        let jet = curvature(&chart, &p).unwrap();
        assert!(fd.riemann_difference(&jet) < 1e-5);
        assert!(fd.christoffel_difference(&jet) < 1e-8);
    }

    #[test]
    fn margin_is_enforced() {
        let chart = super::super::charts::page_pope_chart(
            &crate::family::FamilyParams::new(1, crate::int(4), crate::int(1), crate::int(-3), crate::int(1)).unwrap(),
        )
        .unwrap();
        let err = fd_oracle(&chart, &[1.005, 0.5, 0.1, 0.1]).unwrap_err();
        assert!(matches!(err, GeomError::StepTooLarge(_)));
    }
}
