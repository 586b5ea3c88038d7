import os

import pytest

bc = pytest.importorskip("_bcsynth")

BENCH = os.environ.get("BCSYNTH_BENCH_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "benchmarks"))


def bench(name):
    return os.path.join(BENCH, name)


def test_parse_and_arithmetic():
    p = bc.parse_poly("(x1+1)^2", ["x1", "x2"])
    q = bc.parse_poly("x1^2 + 2*x1 + 1", ["x1", "x2"])
    assert p == q
    assert p.eval([2.0, 0.0]) == 9.0
    with pytest.raises(Exception):
        bc.parse_poly("x1 + y", ["x1"])


def test_lie_derivative_matches_worked_example():
    lie = bc.lie_derivative("x2", ["x1 + x2", "x1*x2 - 0.5*x2^2 + 0.1"], ["x1", "x2"], 1)
    expected = bc.parse_poly("x1*x2 - 0.5*x2^2 + 0.1", ["x1", "x2"])
    assert lie == expected


def test_completeness_threshold():
    order, reached = bc.completeness_threshold(
        "x2", ["x1 + x2", "x1*x2 - 0.5*x2^2 + 0.1"], ["x1", "x2"], 4
    )
    assert reached
    assert order == 1


def test_groebner_membership():
    assert bc.ideal_member("x1*x2 - x2^3", ["x1 - x2^2", "x2 - x1^2"], ["x1", "x2"])
    assert not bc.ideal_member("x1 + 1", ["x1 - x2^2", "x2 - x1^2"], ["x1", "x2"])


def test_validate_overview_certificate():
    report = bc.validate(bench("overview.json"), "-0.00363421*x2", 1, 20000)
    assert report["pass"]
    bad = bc.validate(bench("overview.json"), "x2", 1, 20000)
    assert not bad["pass"]


def test_simulate_shapes():
    traj = bc.simulate(["x2", "-x1"], ["x1", "x2"], [1.0, 0.0], 1e-3, 100)
    assert len(traj) == 101
    assert abs(traj[-1][0] ** 2 + traj[-1][1] ** 2 - 1.0) < 1e-9


def test_export_smt_has_three_conditions():
    scripts = bc.export_smt(bench("overview.json"), "-0.00363421*x2", 1)
    assert set(scripts) == {"initial", "consecution", "separation"}
    assert "(check-sat)" in scripts["separation"]


def test_synthesize_overview_end_to_end():
    result = bc.synthesize(bench("overview.json"), timeout=60.0)
    assert result["found"]
    assert result["iterations"] <= 10
    assert result["report"]["pass"]
