"""Smoke test for the pagepope_py extension module.

Build and install first:  pip install maturin && maturin develop -m crates/python/Cargo.toml
"""

import json

import pagepope_py as pp


def main():
    hyperbolic = pp.FamilyParams.catalogue(1, 1, "1")
    assert pp.solve_p(hyperbolic) == "r^4 - 2*r^2 + 1"

    canonical = pp.FamilyParams(1, "2", "1/3", "-3", "1")
    assert pp.solve_p(canonical) == "r^4 - 4*r + 3"

    edge = pp.FamilyParams(1, "2", "1/3", "-3", "2")
    assert pp.cone_angle(edge) == "5/4"
    report = json.loads(pp.family_report(edge))
    assert report["beta_sq_derived"] == "15/8" and report["beta_sq_paper"] == "75/32"

    assert pp.smooth_c(1, "2", "-3", "2") == "2/9"

    residual = pp.einstein_residual(canonical, [1.7, 0.4, 0.2, 0.1])
    assert residual < 1e-6, residual
    summary = json.loads(pp.curvature_summary(hyperbolic, [2.0, 1.0, 0.3, -0.2]))
    assert abs(summary["scalar"] + 12.0) < 1e-9

    rho1 = (2.0 / 3.0) ** 0.5
    limit = json.loads(pp.limit_comparison(1, ["1/10", "1/100"], [1.5 * rho1, 2.5 * rho1]))
    steps = limit["summary"]["steps"]
    assert steps[1]["sup_dev"][0] < steps[0]["sup_dev"][0]

    rows = json.loads(pp.audit())
    assert all(row["derived_holds"] and not row["printed_holds"] for row in rows)

    try:
        pp.FamilyParams(1, "2", "1/3", "3", "1")
    except ValueError:
        pass
    else:
        raise AssertionError("positive Lambda accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
