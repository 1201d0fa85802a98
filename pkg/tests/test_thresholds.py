import random
from fractions import Fraction

import pytest

from app.errors import DomainError
from app.thresholds import (
    PADIC, REAL, THRESHOLDS, ThresholdFunctions, endpoint_zeros, evaluate, grid_check, solve_threshold,
    threshold_table,
)

TOL = Fraction(1, 10 ** 6)


@pytest.mark.parametrize("flavor, equation, expected", [
    (REAL, "f=phi", 0.60842266),
    (REAL, "f=psi", 0.61263521),
    (PADIC, "f=phi", 1.60842266),
    (PADIC, "f=psi", 1.61263521),
    (PADIC, "padic-window", 1.615358873),
])
def test_threshold_roots(flavor, equation, expected):
    root = solve_threshold(ThresholdFunctions(flavor), equation, TOL)
    assert root.radius <= TOL
    assert abs(float(root.center) - expected) < 1e-6


def test_ea_window_root_reported_against_both_references():
    t = THRESHOLDS["ea_window_root"]
    root = solve_threshold(ThresholdFunctions(REAL), t.equation, TOL, t.interval)
    lo, hi = t.interval
    assert lo < root.center < hi
    assert set(t.reference) == {"0.61455261", "0.611455261"}


def test_window_equations_need_matching_flavor():
    with pytest.raises(DomainError):
        solve_threshold(ThresholdFunctions(PADIC), "ea-window", TOL, (Fraction(3, 2), Fraction(8, 5)))
    with pytest.raises(DomainError):
        solve_threshold(ThresholdFunctions(REAL), "padic-window", TOL, (Fraction(1, 2), Fraction(3, 5)))
    with pytest.raises(DomainError):
        solve_threshold(ThresholdFunctions(REAL), "f=g")


def test_boundary_identities():
    real, padic = ThresholdFunctions(REAL), ThresholdFunctions(PADIC)
    assert real.psi(Fraction(1, 2)) == 0
    assert real.phi(Fraction(1, 2)) == 0
    assert padic.psi(Fraction(3, 2)) == 0
    assert padic.phi(Fraction(3, 2)) == 0


@pytest.mark.parametrize("flavor", [REAL, PADIC])
def test_endpoint_zeros(flavor):
    report = endpoint_zeros(flavor)
    assert report["exact_zero"]
    assert report["ball_contains_zero"]


def test_delta_is_lambda_theta():
    fns = ThresholdFunctions(REAL)
    rng = random.Random(11)
    for _ in range(200):
        lam = Fraction(rng.randint(1, 999), 1000)
        assert fns.delta(lam) == lam * fns.theta(lam)


@pytest.mark.parametrize("flavor", [REAL, PADIC])
def test_grid_check(flavor):
    report = grid_check(ThresholdFunctions(flavor), points=60)
    assert report["passed"], report["violations"]
    assert set(report["chains"]) == {f"{flavor}_f_phi_root", f"{flavor}_f_psi_root"}


def test_evaluate_checks_domain():
    fns = ThresholdFunctions(REAL)
    with pytest.raises(DomainError):
        evaluate(fns, "f", Fraction(1, 4))
    with pytest.raises(DomainError):
        evaluate(fns, "window_f", Fraction(3, 4))
    value = evaluate(fns, "theta", Fraction(1, 3))
    assert value.contains(Fraction(1, 2))


def test_unknown_flavor():
    with pytest.raises(DomainError):
        ThresholdFunctions("complex")


def test_padic_table():
    rows = threshold_table(PADIC, 1e-6)
    by_name = {r["name"]: r for r in rows}
    assert set(by_name) == {"padic_f_phi_root", "padic_f_psi_root", "padic_window_root"}
    window = by_name["padic_window_root"]
    assert window["value"].startswith("1.615358")
    assert window["delta"][0] < 1e-6
