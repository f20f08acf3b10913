//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use pagepope::audit::run_audit;
use pagepope::exact_poly::to_f64;
use pagepope::family::{
    alpha_continuation, alpha_derivative_r1, cone_angle, cpn_catalogue, ode_residual, smooth_c, solve_p,
};
use pagepope::geom::{curvature, fd_oracle, page_pope_chart, rescaled_chart, ChartMetric, CurvatureReport};
use pagepope::limits::{limit_comparison, rho1_limit, u_closed_form};
use pagepope::{int, rat, FamilyParams, LaurentPoly, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rational {
    rat(rng.random_range(1..=max_num), rng.random_range(1..=max_den))
}

/// `r1 = 1` with probability 1/4, otherwise a rational in `(1, 4]`.
fn random_r1(rng: &mut ChaCha8Rng) -> Rational {
    if rng.random_range(0..4) == 0 {
        Rational::one()
    } else {
        Rational::one() + random_rational(rng, 12, 4).min(int(3))
    }
}

fn random_params(rng: &mut ChaCha8Rng, n: u32) -> FamilyParams {
    FamilyParams::new(
        n,
        random_rational(rng, 8, 3),
        random_rational(rng, 6, 5),
        -random_rational(rng, 9, 2),
        random_r1(rng),
    )
    .expect("random tuple is valid")
}

fn random_point(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> [f64; 4] {
    let radius = 0.95 * rng.random::<f64>().sqrt();
    let angle = rng.random_range(0.0..TAU);
    [
        rng.random_range(r_lo..r_hi),
        rng.random_range(0.05..TAU - 0.05),
        radius * angle.cos(),
        radius * angle.sin(),
    ]
}

fn random_plane(rng: &mut ChaCha8Rng, report: &CurvatureReport<4>) -> ([f64; 4], [f64; 4]) {
    let frame = report.orthonormal_frame().expect("metric is positive definite");
    let mut pick = || -> [f64; 4] {
        let a: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        std::array::from_fn(|i| (0..4).map(|k| a[k] * frame[k][i]).sum())
    };
    (pick(), pick())
}

fn ode_identity(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut nonzero = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let params = random_params(rng, n);
        if !ode_residual(&params, &solve_p(&params)).is_zero() {
            nonzero += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        nonzero == 0 && elapsed < Duration::from_secs(5),
        format!("100 tuples, {nonzero} nonzero residuals, {elapsed:.2?}"),
    )
}

fn fixtures() -> Outcome {
    let hyperbolic = FamilyParams::new(1, int(4), int(1), int(-3), int(1)).unwrap();
    let canonical = FamilyParams::new(1, int(2), rat(1, 3), int(-3), int(1)).unwrap();
    let p_h = solve_p(&hyperbolic);
    let p_c = solve_p(&canonical);
    let ok = p_h == LaurentPoly::from_int_terms(&[(4, 1), (2, -2), (0, 1)])
        && p_c == LaurentPoly::from_int_terms(&[(4, 1), (1, -4), (0, 3)]);
    check(ok, format!("P = {p_h} and P = {p_c}"))
}

fn einstein(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for _ in 0..25 {
        let params = random_params(rng, 1);
        let chart = page_pope_chart(&params).map_err(|e| e.to_string())?;
        let lambda = to_f64(params.einstein_constant());
        let r_lo = to_f64(params.r1()) + 0.1;
        for _ in 0..20 {
            let point = random_point(rng, r_lo, 10.0);
            let residual = curvature(&chart, &point)
                .map_err(|e| e.to_string())?
                .einstein_residual(lambda);
            if residual > worst {
                worst = residual;
                worst_at = format!("{} at {point:?}", chart.name());
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-6 && elapsed < Duration::from_secs(60),
        format!("500 points, max residual {worst:.3e} ({worst_at}), {elapsed:.2?}"),
    )
}

fn hyperbolic_recovery(rng: &mut ChaCha8Rng) -> Outcome {
    let params = FamilyParams::new(1, int(4), int(1), int(-3), int(1)).unwrap();
    let chart = page_pope_chart(&params).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let report = curvature(&chart, &random_point(rng, 1.05, 10.0)).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let (x, y) = random_plane(rng, &report);
            let k = report.sectional(&x, &y).map_err(|e| e.to_string())?;
            worst = worst.max((k + 1.0).abs());
        }
    }
    check(worst <= 1e-6, format!("500 planes, max |K + 1| = {worst:.3e}"))
}

fn flat_recovery(rng: &mut ChaCha8Rng) -> Outcome {
    let profile = u_closed_form(1, int(4), Rational::zero()).map_err(|e| e.to_string())?;
    let chart = rescaled_chart(&profile).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let report = curvature(&chart, &random_point(rng, 0.5, 3.0)).map_err(|e| e.to_string())?;
        worst = worst.max(report.riemann_max());
    }
    check(worst <= 1e-12, format!("U = {}, 20 points, max |R| = {worst:.3e}", profile.asymptote()))
}

fn ricci_flat_limit(rng: &mut ChaCha8Rng) -> Outcome {
    let rho1 = rho1_limit(1).map_err(|e| e.to_string())?;
    let profile = u_closed_form(1, int(2), rho1.derived_sq.clone()).map_err(|e| e.to_string())?;
    let chart = rescaled_chart(&profile).map_err(|e| e.to_string())?;
    let r = profile.rho1();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let point = random_point(rng, 1.1 * r, 5.0 * r);
        let residual = curvature(&chart, &point)
            .map_err(|e| e.to_string())?
            .einstein_residual(0.0);
        worst = worst.max(residual);
    }
    check(
        worst <= 1e-6,
        format!("rho1^2 = {}, 20 points, max residual {worst:.3e}", rho1.derived_sq),
    )
}

fn cone_angle_endpoints() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let near = Rational::one() + rat(1, 1_000_000_000);
    for (lambda, c, big_l) in [(int(2), rat(1, 3), -3), (int(4), int(1), -3), (rat(7, 3), rat(2, 5), -5)] {
        let params = FamilyParams::new(1, lambda.clone(), c, int(big_l), near.clone()).unwrap();
        let alpha = cone_angle(&params).map_err(|e| e.to_string())?;
        let gap = to_f64(&(alpha - &lambda / int(2))).abs();
        ok &= gap < 1e-6;
        notes.push(format!("|alpha - lambda/2| = {gap:.1e}"));
    }
    for n in 1..=3u32 {
        let entry = cpn_catalogue(n, 1).unwrap();
        let at_one = alpha_continuation(&entry.params(int(1)).unwrap());
        ok &= at_one == int(n as i64 + 1);
        // 100-point sweep of r1 over [1, 10], exact values and derivative signs
        let mut previous: Option<Rational> = None;
        for i in 0..100 {
            let r1 = int(1) + rat(9 * i, 99);
            let params = entry.params(r1).unwrap();
            ok &= alpha_derivative_r1(&params).is_positive();
            let alpha = alpha_continuation(&params);
            if let Some(prev) = &previous {
                ok &= alpha > *prev;
            }
            previous = Some(alpha);
        }
        notes.push(format!("n={n}: alpha(1) = {at_one}"));
    }
    check(ok, notes.join(", ") + ", increasing on 100-point sweeps")
}

fn smoothness_round_trip(rng: &mut ChaCha8Rng) -> Outcome {
    let mut failures = 0;
    for _ in 0..50 {
        let n = rng.random_range(1..=4);
        let r1 = Rational::one() + random_rational(rng, 12, 5);
        // lambda in (0, 2 r1)
        let lambda = &r1 * int(2) * rat(rng.random_range(1..=19), 20);
        let einstein = -random_rational(rng, 9, 2);
        let c = smooth_c(n, &lambda, &einstein, &r1).map_err(|e| e.to_string())?;
        let params = FamilyParams::new(n, lambda, c, einstein, r1).unwrap();
        if !cone_angle(&params).map_err(|e| e.to_string())?.is_one() {
            failures += 1;
        }
    }
    check(failures == 0, format!("50 tuples, {failures} with alpha != 1"))
}

fn formula_audit() -> Outcome {
    let rows = run_audit().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut ok = true;
    for quantity in [
        "beta^2 near the edge",
        "smooth c_t",
        "conic base coefficient",
        "rho1^2 of the Ricci-flat limit",
    ] {
        let matching: Vec<_> = rows.iter().filter(|r| r.quantity == quantity).collect();
        let reproduced = !matching.is_empty() && matching.iter().all(|r| r.derived_holds && !r.printed_holds);
        ok &= reproduced;
        notes.push(format!("{quantity}: {}/{} rows", matching.len(), matching.len()));
    }
    check(ok, notes.join("; "))
}

fn limit_convergence() -> Outcome {
    let rho1 = rho1_limit(1).map_err(|e| e.to_string())?.derived;
    let grid: Vec<f64> = (0..=30).map(|i| rho1 * (1.2 + 1.8 * i as f64 / 30.0)).collect();
    let ts = [rat(1, 10), rat(1, 100), rat(1, 1000)];
    let cmp = limit_comparison(1, &ts, &grid).map_err(|e| e.to_string())?;
    let steps = &cmp.summary.steps;
    let mut ok = steps.iter().all(|s| s.theta_identity_exact);
    // A coefficient that is zero at every t counts as monotone; any nonzero
    // deviation must strictly shrink.
    for k in 0..3 {
        for w in steps.windows(2) {
            let (a, b) = (w[0].sup_dev[k], w[1].sup_dev[k]);
            ok &= b < a || (a == 0.0 && b == 0.0);
        }
    }
    let table: Vec<String> = steps
        .iter()
        .map(|s| format!("t={}: [{:.2e}, {:.2e}, {:.2e}]", s.t, s.sup_dev[0], s.sup_dev[1], s.sup_dev[2]))
        .collect();
    check(ok, table.join(", ") + ", theta^2 identity exact")
}

fn asymptotics(rng: &mut ChaCha8Rng) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for params in [
        FamilyParams::new(1, int(2), rat(1, 3), int(-3), int(1)).unwrap(),
        FamilyParams::new(1, int(2), rat(2, 9), int(-3), int(2)).unwrap(),
        FamilyParams::new(1, int(1), rat(1, 2), int(-5), rat(3, 2)).unwrap(),
    ] {
        let factor = to_f64(&(params.abs_einstein() / int(3)));
        let chart = page_pope_chart(&params).map_err(|e| e.to_string())?.scaled(factor);
        let mut devs = Vec::new();
        for r in [10.0, 50.0, 250.0] {
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let mut point = random_point(rng, r, r + 1.0);
                point[0] = r;
                let report = curvature(&chart, &point).map_err(|e| e.to_string())?;
                for _ in 0..10 {
                    let (x, y) = random_plane(rng, &report);
                    worst = worst.max((report.sectional(&x, &y).map_err(|e| e.to_string())? + 1.0).abs());
                }
            }
            devs.push(worst);
        }
        ok &= devs[1] < devs[0] && devs[2] < devs[1] && devs[2] < 1e-3;
        notes.push(format!("[{:.2e}, {:.2e}, {:.2e}]", devs[0], devs[1], devs[2]));
    }
    check(ok, format!("max |K + 1| at r = 10, 50, 250: {}", notes.join(" ")))
}

fn cross_scheme(rng: &mut ChaCha8Rng) -> Outcome {
    let charts: [(ChartMetric<4>, f64); 2] = [
        (
            page_pope_chart(&FamilyParams::new(1, int(4), int(1), int(-3), int(1)).unwrap()).unwrap(),
            1.0,
        ),
        (
            page_pope_chart(&FamilyParams::new(1, int(2), rat(2, 9), int(-3), int(2)).unwrap()).unwrap(),
            2.0,
        ),
    ];
    let mut worst = 0.0f64;
    for (chart, r1) in &charts {
        for _ in 0..10 {
            let point = random_point(rng, r1 + 0.2, 5.0);
            let jet = curvature(chart, &point).map_err(|e| e.to_string())?;
            let fd = fd_oracle(chart, &point).map_err(|e| e.to_string())?;
            worst = worst.max(jet.riemann_difference(&fd)).max(jet.christoffel_difference(&fd));
        }
    }
    check(worst <= 1e-5, format!("2 charts x 10 points, max relative difference {worst:.3e}"))
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let results: Vec<(&str, Outcome)> = vec![
        ("exact ODE identity", ode_identity(&mut rng)),
        ("closed-form fixtures", fixtures()),
        ("Einstein verification", einstein(&mut rng)),
        ("hyperbolic recovery", hyperbolic_recovery(&mut rng)),
        ("flat recovery", flat_recovery(&mut rng)),
        ("Ricci-flat limit", ricci_flat_limit(&mut rng)),
        ("cone-angle endpoints", cone_angle_endpoints()),
        ("smoothness round trip", smoothness_round_trip(&mut rng)),
        ("formula audit", formula_audit()),
        ("limit comparison", limit_convergence()),
        ("asymptotics", asymptotics(&mut rng)),
        ("cross-scheme", cross_scheme(&mut rng)),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
