import math
import random
from fractions import Fraction

import pytest

from app.approx_lab import (
    accumulation_points, algebraic_distance_scan, alt0_scan, alt1_lower_bound, beta_zero_check, cf_bounds_check,
    cf_expand, class_difference_bounds, frac_series, is_convergent, r_height_grid, verify_deg3_convergents,
    verify_deg4_accumulation, w2_candidate_check, xi_ball,
)
from app.errors import InsufficientPrecision, PreconditionViolated
from app.models import IntPoly, RealBall

GAMMA = (1 + math.sqrt(5)) / 2

T3 = IntPoly.parse("1,0,0,0")
T4 = IntPoly.parse("1,0,0,0,0")


@pytest.fixture(scope="module")
def cubic_series(ea2):
    return frac_series(ea2, T3, range(3, 21))


@pytest.fixture(scope="module")
def quartic_series(ea2_long):
    return frac_series(ea2_long, T4, range(3, 25))


def test_xi_balls_nest(ea2):
    for k in range(5, 19):
        assert xi_ball(ea2, k).contains(xi_ball(ea2, k + 2).center)


def test_xi_ball_value(ea2):
    assert abs(float(xi_ball(ea2, 12)) - 5421 / 8741) < 1e-6


def test_frac_series_rejects_bad_input(ea2):
    with pytest.raises(PreconditionViolated):
        frac_series(ea2, IntPoly.parse("1,0,0,0,0,0"), range(3, 10))
    with pytest.raises(PreconditionViolated):
        frac_series(ea2, T3, range(3, 40))
    with pytest.raises(PreconditionViolated):
        frac_series(ea2, T3, [])


def test_frac_series_values_in_half_interval(cubic_series):
    assert cubic_series.period == 3
    assert cubic_series.inconclusive == ()
    for _, v in cubic_series.values:
        assert v.lower() >= 0
        assert v.upper() <= Fraction(1, 2)


def test_cubic_accumulation_points(cubic_series):
    points = accumulation_points(cubic_series)
    assert [p.l for p in points] == [0, 1, 2]
    for p in points:
        assert p.converged
        assert p.positive
        assert p.limit.radius < Fraction(1, 10 ** 6)
        assert p.name == f"delta_{p.l}"


def test_quartic_accumulation_points(quartic_series):
    assert quartic_series.period == 6
    points = accumulation_points(quartic_series)
    assert 1 <= len(points) <= 6
    assert all(p.positive for p in points)
    assert all(p.name.startswith("eta_") for p in points)


def test_class_difference_constant_bounded(cubic_series, ea2):
    bounds = class_difference_bounds(cubic_series, ea2)
    assert bounds["period"] == 3
    assert bounds["height"] == 1
    assert bounds["rows"]
    assert 0 < bounds["max"] < 100


def test_beta_zero_exact():
    assert beta_zero_check(Fraction(1, 3), Fraction(1, 4))
    assert beta_zero_check(Fraction(7, 3), Fraction(-5, 4))


def test_beta_zero_fuzz():
    rng = random.Random(7)
    for _ in range(10 ** 4):
        b = Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 4))
        c = Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 4))
        assert beta_zero_check(b, c)


def test_cf_rational():
    cf = cf_expand(Fraction(415, 93), 10)
    assert cf.quotients == (4, 2, 6, 7)
    assert cf.finite
    assert cf.fractions()[-1] == Fraction(415, 93)


def test_cf_golden_all_ones():
    cf = cf_expand(RealBall.golden(256), 30)
    assert cf.quotients == (1,) * 30
    assert cf.denominators[:6] == [1, 1, 2, 3, 5, 8]


def test_cf_needs_precision():
    coarse = RealBall.from_center_radius(Fraction(14142, 10000), Fraction(1, 100), 64)
    with pytest.raises(InsufficientPrecision):
        cf_expand(coarse, 10)


def test_cf_bounds_sqrt2():
    sqrt2 = RealBall.exact(2, 256).sqrt()
    cf = cf_expand(sqrt2, 20)
    assert cf.quotients[:5] == (1, 2, 2, 2, 2)
    assert all(cf_bounds_check(sqrt2, cf))


def test_is_convergent():
    sqrt2 = RealBall.exact(2, 256).sqrt()
    assert is_convergent(sqrt2, Fraction(99, 70)) == (True, "expansion")
    assert is_convergent(sqrt2, Fraction(3, 2))[0]
    assert is_convergent(sqrt2, Fraction(10, 7)) == (False, "expansion")


def test_deg3_convergents(ea2, cubic_series):
    report = verify_deg3_convergents(ea2, T3, 0, range(3, 21), series=cubic_series)
    assert report["passed"]
    assert report["convergents"] >= 3
    cases = {r["case"] for r in report["rows"]}
    assert cases == {"i", "ii"}
    assert all(r["gcd_divides_2g"] for r in report["rows"])
    assert abs(report["fits"]["i"]["slope"] + GAMMA ** 2) <= 0.05
    assert abs(report["fits"]["ii"]["slope"] + GAMMA ** 2 + 1) <= 0.05
    assert report["fit_ok"] == {"i": True, "ii": True}


def test_deg3_fails_on_too_few_convergents(ea2, cubic_series):
    report = verify_deg3_convergents(ea2, T3, 0, range(3, 6), series=cubic_series)
    assert report["convergents"] <= 2
    assert report["fit_ok"] == {"i": False, "ii": False}
    assert not report["passed"]


def test_deg3_needs_cubic(ea2):
    with pytest.raises(PreconditionViolated):
        verify_deg3_convergents(ea2, T4, 0, range(3, 10))


def test_deg4_accumulation(ea2_long, quartic_series):
    report = verify_deg4_accumulation(ea2_long, T4, 3, range(3, 25), series=quartic_series)
    assert report["passed"]
    assert report["nonzero_numerators"]
    assert {r["case"] for r in report["rows"]} == {"i", "ii"}
    assert abs(report["fits"]["i"]["slope"] + GAMMA ** 2) <= 0.05
    assert abs(report["fits"]["ii"]["slope"] + GAMMA ** 2 + 1) <= 0.05


def test_alt1_witness_nonzero(ea2):
    report = alt1_lower_bound(ea2, T3, range(3, 19))
    assert report["identities_ok"]
    assert report["nonzero_from"] is not None and report["nonzero_from"] <= 6
    assert report["passed"]


def test_alt0_desk_scan(ea2):
    report = alt0_scan(ea2, T3, max_height=12, decades_to=3, samples=100, seed=1)
    assert report["positive"]
    assert [r["decade"] for r in report["decades"]] == [0, 1, 2]
    assert report["theta"]["positive"]


def test_alt0_scan_deterministic(ea2):
    one = alt0_scan(ea2, T3, max_height=5, decades_to=2, samples=20, seed=3)
    two = alt0_scan(ea2, T3, max_height=5, decades_to=2, samples=20, seed=3)
    assert one["decades"] == two["decades"]


def test_r_height_grid_positive(xi):
    grid = r_height_grid(xi, height=1)
    assert grid["count"] == 3 ** 3 + 3 ** 4
    assert grid["positive"]


def test_w2_candidates_decay_like_inverse_norm(ea2):
    report = w2_candidate_check(ea2, range(3, 21))
    assert report["advisory"]
    assert len(report["rows"]) == 18
    assert not any(r["undecided"] for r in report["rows"])
    assert -1.2 < report["decay_exponent"] < -0.8
    with pytest.raises(PreconditionViolated):
        w2_candidate_check(ea2, [])


def test_algebraic_distance_scan(ea2):
    # T^3 - T^2 = T^2 (T - 1): корни 0 и 1
    report = algebraic_distance_scan(ea2, T3, [[-1, 0, 0]])
    assert {r["degree"] for r in report["rows"]} == {1}
    assert report["positive"]
    assert abs(report["min"] - (1 - 5421 / 8741)) < 1e-3
