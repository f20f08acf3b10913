use std::f64::consts::PI;

use pagepope::geom::{
    base_connection_defect, christoffel, curvature, euclidean, fd_oracle, invert_base, invert_point,
    page_pope_chart, rescaled_chart, round_sphere, scalar, sectional, ChartMetric, GeomError, Jet2,
};
use pagepope::limits::{flat_recovery, u_closed_form};
use pagepope::{int, rat, FamilyParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hyperbolic() -> ChartMetric<4> {
    page_pope_chart(&FamilyParams::new(1, int(4), int(1), int(-3), int(1)).unwrap()).unwrap()
}

fn canonical() -> ChartMetric<4> {
    page_pope_chart(&FamilyParams::new(1, int(2), rat(1, 3), int(-3), int(1)).unwrap()).unwrap()
}

#[test]
fn euclidean_has_no_connection_or_curvature() {
    let chart = euclidean::<4>();
    let point = [0.3, -1.0, 2.0, 0.5];
    assert!(christoffel(&chart, &point).unwrap().iter().flatten().flatten().all(|g| *g == 0.0));
    let report = curvature(&chart, &point).unwrap();
    assert_eq!(report.riemann_max(), 0.0);
    assert!(report.einstein_residual(0.0) <= 1e-12);
    let k = sectional(&chart, &point, &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 1.0, 0.0]).unwrap();
    assert_eq!(k, 0.0);
}

#[test]
fn christoffel_matches_second_order_differences() {
    // Independent check with plain central differences at step 1e-4.
    let chart = hyperbolic();
    let point = [2.0, 0.5, 0.3, -0.2];
    let gamma = christoffel(&chart, &point).unwrap();
    let g = chart.metric_values(&point).unwrap();
    let h = 1e-4;
    let mut dg = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        let (mut plus, mut minus) = (point, point);
        plus[k] += h;
        minus[k] -= h;
        let (gp, gm) = (chart.metric_values(&plus).unwrap(), chart.metric_values(&minus).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                dg[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
            }
        }
    }
    let inv = nalgebra::Matrix4::from_fn(|i, j| g[i][j]).try_inverse().unwrap();
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let fd: f64 = (0..4)
                    .map(|l| 0.5 * inv[(k, l)] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                    .sum();
                assert!((fd - gamma[k][i][j]).abs() < 1e-5, "G^{k}_{i}{j}: {fd} vs {}", gamma[k][i][j]);
            }
        }
    }
}

#[test]
fn sphere_normalisation() {
    for lambda in [0.5, 2.0, 4.0] {
        let report = curvature(&round_sphere(lambda), &[1.2, -0.7]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = lambda * report.metric[i][j];
                assert!((report.ricci[i][j] - expected).abs() <= 1e-8 * expected.abs().max(report.metric[0][0]));
            }
        }
    }
}

#[test]
fn hyperbolic_scalar_and_contractions() {
    let report = curvature(&hyperbolic(), &[3.0, 1.0, -0.1, 0.4]).unwrap();
    assert!((report.scalar + 12.0).abs() < 1e-9);
    assert!((report.full_contraction() - report.scalar).abs() <= 1e-10 * report.scalar.abs());
    assert!((scalar(&hyperbolic(), &[3.0, 1.0, -0.1, 0.4]).unwrap() + 12.0).abs() < 1e-9);
}

#[test]
fn canonical_point_is_einstein() {
    let report = curvature(&canonical(), &[1.7, 0.4, 0.2, 0.1]).unwrap();
    assert!(report.einstein_residual(-3.0) <= 1e-6);
    let summary = serde_json::to_value(report.summary(-3.0)).unwrap();
    for key in ["point", "einstein_residual", "scalar", "bianchi_max", "symmetry_max"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
}

#[test]
fn connection_and_positivity_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let chart = canonical();
    for _ in 0..50 {
        let (u, v) = (rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7));
        assert!(base_connection_defect(2.0, u, v) < 1e-10);
    }
    for _ in 0..100 {
        let point = [
            rng.random_range(1.01..20.0),
            rng.random_range(0.01..2.0 * PI - 0.01),
            rng.random_range(-0.7..0.7),
            rng.random_range(-0.7..0.7),
        ];
        chart.check_metric(&point).unwrap();
    }
}

#[test]
fn inverted_chart_gives_the_same_verdict() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let chart = canonical();
    let inverted = invert_base(&chart, 2).unwrap();
    for _ in 0..10 {
        let point = [
            rng.random_range(1.2..6.0),
            rng.random_range(0.1..6.0),
            rng.random_range(0.1..0.6),
            rng.random_range(-0.6..-0.1),
        ];
        let a = curvature(&chart, &point).unwrap().einstein_residual(-3.0);
        let b = curvature(&inverted, &invert_point(&point, 2)).unwrap().einstein_residual(-3.0);
        assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
    }
}

#[test]
fn rescaled_charts() {
    let (_, flat) = flat_recovery(1).unwrap();
    let chart = rescaled_chart(&flat).unwrap();
    assert!(curvature(&chart, &[0.8, 1.0, 0.1, 0.2]).unwrap().riemann_max() <= 1e-12);

    let eh = rescaled_chart(&u_closed_form(1, int(2), rat(2, 3)).unwrap()).unwrap();
    let rho1 = (2.0f64 / 3.0).sqrt();
    let report = curvature(&eh, &[1.5 * rho1, 2.0, -0.3, 0.3]).unwrap();
    assert!(report.einstein_residual(0.0) <= 1e-6);
    eh.check_metric(&[2.0 * rho1, 2.0, -0.3, 0.3]).unwrap();
    assert!(matches!(
        eh.metric_jets(&[0.9 * rho1, 2.0, 0.0, 0.0]),
        Err(GeomError::OutOfDomain(_))
    ));
}

#[test]
fn finite_differences_agree_with_jets() {
    let edge = page_pope_chart(&FamilyParams::new(1, int(2), rat(2, 9), int(-3), int(2)).unwrap()).unwrap();
    for (chart, point) in [(hyperbolic(), [2.0, 1.0, 0.3, -0.2]), (edge, [3.0, 1.0, 0.3, -0.2])] {
        let jet = curvature(&chart, &point).unwrap();
        let fd = fd_oracle(&chart, &point).unwrap();
        assert!(jet.riemann_difference(&fd) < 1e-5);
        assert!(jet.christoffel_difference(&fd) < 1e-5);
    }
    let flat = euclidean::<4>();
    let fd = fd_oracle(&flat, &[0.0; 4]).unwrap();
    assert!(fd.riemann_max() < 1e-6);
}

#[test]
fn degenerate_planes_are_rejected() {
    let report = curvature(&hyperbolic(), &[2.0, 1.0, 0.0, 0.0]).unwrap();
    let x = [1.0, 0.0, 0.0, 0.0];
    assert_eq!(report.sectional(&x, &[2.0, 0.0, 0.0, 0.0]), Err(GeomError::DegeneratePlane));
}

#[test]
fn jets_match_closed_forms() {
    let [x, y] = Jet2::<2>::seed(&[0.5, 2.0]);
    let f = (x * y + 1.0).sqrt() / (y * y);
    // f = sqrt(xy + 1) / y^2 at (0.5, 2): sqrt(2)/4
    let s = 2f64.sqrt();
    assert!((f.value - s / 4.0).abs() < 1e-12);
    assert!((f.grad[0] - 2.0 / (2.0 * s) / 4.0).abs() < 1e-12);
    assert!((f.hess[0][0] + 4.0 / (4.0 * s * 2.0) / 4.0).abs() < 1e-12);
}
