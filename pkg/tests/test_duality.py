import math
from fractions import Fraction

import mpmath
import pytest

from app import duality
from app.duality import (
    approximation_pipeline, approximation_series, build_polynomial, canonical, check_solution,
    check_zs_factoring, default_rho, dual_points, enumerate_solutions, extract_roots, fitted_constant,
    jc_interval, lemma_dual_integers, mahler_check, minkowski_construct, primitive,
)
from app.errors import HypothesisFails, PreconditionViolated, VolumeInequalityFails
from app.fitting import loglog_slope
from app.models import INF, ApproxSystem, Golden, IntPoly, PadicNumber, RealBall
from app.padic import hensel_lift

GAMMA = (1 + math.sqrt(5)) / 2
INV_GAMMA = Golden(Fraction(-1), Fraction(1))
T3 = IntPoly.parse("1,0,0,0")


@pytest.fixture(scope="module")
def sqrt2():
    return RealBall.exact(2, 256).sqrt()


@pytest.fixture(scope="module")
def sqrt_minus7():
    # корень T^2 + 7 в Z_2
    return hensel_lift(IntPoly.from_high([1, 0, 7]), PadicNumber.from_int(1, 2, 64), 60)


@pytest.fixture(scope="module")
def oracle_system(ea2, xi):
    c = fitted_constant([ea2.term(k) for k in range(7, 13)], xi, INV_GAMMA)
    return ApproxSystem(2, xi, INV_GAMMA, c)


def test_canonical_and_primitive():
    assert canonical((0, -2, 4)) == (0, 2, -4)
    assert canonical((3, -1, 0)) == (3, -1, 0)
    assert primitive((-6, 4, 2)) == (3, -2, -1)


def test_fitted_constant_value(oracle_system):
    assert 0.06 < float(oracle_system.c) < 0.07


def test_interval_bounds_become_plain_fractions(oracle_system, ea2):
    # при бэкенде gmpy2 мантиссы mpmath имеют тип mpz
    c = oracle_system.c
    assert type(c.numerator) is int and type(c.denominator) is int
    v = primitive(ea2.term(7).as_tuple())
    interval = jc_interval(v, oracle_system, method="bisect")
    for end in (interval.lo, interval.hi):
        assert type(end.numerator) is int and type(end.denominator) is int


def test_global_interval_precision_untouched(oracle_system, ea2):
    before = mpmath.iv.prec
    check_solution(oracle_system, ea2.term(7).as_tuple(), 208)
    jc_interval(primitive(ea2.term(7).as_tuple()), oracle_system, method="bisect")
    assert mpmath.iv.prec == before
    assert duality.iv.prec == duality.IV_BITS


def test_oracle_minimal_points(oracle_system, ea2):
    at_x7 = enumerate_solutions(oracle_system, 208)
    assert at_x7.minimal() == [ea2.term(7).as_tuple()]
    at_x8 = enumerate_solutions(oracle_system, 8741)
    assert at_x8.minimal() == [ea2.term(8).as_tuple()]
    assert not at_x8.truncated


def test_oracle_solutions_are_checked(oracle_system, ea2):
    report = check_solution(oracle_system, ea2.term(7).as_tuple(), 208)
    assert report == {"norm": True, "inf": True, "ok": True}
    assert not check_solution(oracle_system, ea2.term(6).as_tuple(), 208)["ok"]


def test_enumeration_threads_agree(oracle_system):
    one = enumerate_solutions(oracle_system, 208, threads=1)
    many = enumerate_solutions(oracle_system, 208, threads=4)
    assert one.solutions == many.solutions
    assert one.primitive == many.primitive


def test_enumeration_truncated_by_cap(oracle_system):
    result = enumerate_solutions(oracle_system, 208, norm_cap=100)
    assert result.truncated
    assert result.cap == 100
    assert result.is_empty()


def test_trivial_system(xi):
    system = ApproxSystem(2, xi, Fraction(0), Fraction(9, 10))
    result = enumerate_solutions(system, 1)
    assert (1, 0, 0) in result.solutions
    assert all(max(abs(c) for c in x) == 1 for x in result.minimal())


def test_infeasible_system(xi):
    system = ApproxSystem(2, xi, Fraction(1), Fraction(1, 100))
    assert enumerate_solutions(system, 1000).is_empty()


def test_enumeration_rejects_small_x(xi):
    with pytest.raises(PreconditionViolated):
        enumerate_solutions(ApproxSystem(2, xi, Fraction(0), Fraction(9, 10)), Fraction(1, 2))


def test_zs_factoring(oracle_system):
    assert check_zs_factoring(enumerate_solutions(oracle_system, 208), oracle_system)["passed"]


def test_jc_interval_closed_and_bisect_agree(oracle_system, ea2):
    v = ea2.term(7).as_tuple()
    closed = jc_interval(v, oracle_system, method="closed")
    bisect = jc_interval(v, oracle_system, method="bisect")
    assert closed.lo == 208
    assert closed.contains(208)
    assert not closed.contains(8741)
    assert abs(float(bisect.lo) - float(closed.lo)) < 1e-9 * float(closed.lo)
    assert abs(float(bisect.hi) - float(closed.hi)) < 1e-9 * float(closed.hi)


def test_jc_interval_needs_primitive(oracle_system):
    with pytest.raises(PreconditionViolated):
        jc_interval((416, 258, 160), oracle_system)
    with pytest.raises(PreconditionViolated):
        jc_interval((208, 129, 80), oracle_system, method="newton")


@pytest.fixture(scope="module")
def minkowski_system(sqrt2):
    xi_2 = PadicNumber.from_rational(Fraction(1, 3), 2, 64)
    return ApproxSystem(2, sqrt2, Fraction(1, 5), Fraction(3), {2: xi_2}, {2: Fraction(3, 10)})


@pytest.mark.parametrize("X", [round(10 ** (1 + k / 3)) for k in range(10)])
def test_minkowski_cone(minkowski_system, X):
    report = minkowski_construct(minkowski_system, X)
    assert report["case"] == "cone"
    assert report["det"] < report["volume"]
    assert report["checks"]["ok"]
    assert report["checks"]["2"]
    x0 = report["point"][0]
    assert x0 % report["d0"] == 0


def test_minkowski_takes_nearest_tail(minkowski_system):
    report = minkowski_construct(minkowski_system, 1000)
    x = report["point"]
    powers = minkowski_system.t_inf()
    for l in range(1, 3):
        assert (x[l] - report["d"][l] * (x[0] // report["d0"])) % report["b"] == 0
        if x[0]:
            assert abs(x[l] - x[0] * powers[l].center) <= Fraction(report["b"], 2)


def test_minkowski_volume_fails(minkowski_system):
    with pytest.raises(VolumeInequalityFails):
        minkowski_construct(minkowski_system.with_c(Fraction(1, 1000)), 1000)


def test_minkowski_box_case(sqrt2):
    xi_2 = PadicNumber.from_rational(Fraction(1, 3), 2, 64)
    system = ApproxSystem(2, sqrt2, Fraction(-1), Fraction(8), {2: xi_2}, {2: Fraction(1, 2)})
    report = minkowski_construct(system, 1000)
    assert report["case"] == "box"
    assert report["checks"]["ok"]
    assert report["case2_condition"] > 0


def test_minkowski_rejects_large_exponents(sqrt2):
    system = ApproxSystem(2, sqrt2, Fraction(1), Fraction(3))
    with pytest.raises(PreconditionViolated):
        minkowski_construct(system, 100)


def test_lemma_dual_integers(minkowski_system):
    report = lemma_dual_integers(minkowski_system, 1000)
    assert report["passed"]
    assert report["a"] == 1
    assert report["b"] == 2 ** (report["k"][2] + 1)


@pytest.fixture(scope="module")
def sqrt2_system(sqrt2):
    return ApproxSystem(1, sqrt2, Fraction(1), Fraction(1, 10))


@pytest.mark.parametrize("X", [100, 1000])
def test_dual_points_for_sqrt2(sqrt2_system, X):
    assert enumerate_solutions(sqrt2_system, X).is_empty()
    dual = dual_points(sqrt2_system, X)
    assert len(dual.points) == 2
    assert dual.det != 0
    for x0, x1 in dual.points:
        assert max(abs(x0), abs(x1)) <= dual.relax * X
        assert abs(x0 + x1 * math.sqrt(2)) <= dual.relax / X * (1 + 1e-9)


def test_dual_points_need_empty_primal(xi):
    system = ApproxSystem(2, xi, Fraction(0), Fraction(9, 10))
    with pytest.raises(HypothesisFails):
        dual_points(system, 1)


def test_dual_points_need_integral_target(sqrt2):
    xi_2 = PadicNumber.from_rational(Fraction(1, 2), 2, 64)
    system = ApproxSystem(1, sqrt2, Fraction(1), Fraction(1, 10), {2: xi_2}, {2: Fraction(1)})
    with pytest.raises(PreconditionViolated):
        dual_points(system, 100, check_primal=False)


def test_mahler_check(sqrt2_system):
    report = mahler_check(sqrt2_system, [50, 500])
    assert report["passed"]
    assert all(r["primal_empty"] and r["dual_found"] for r in report["rows"])


def test_build_polynomial_rejects_small_c1(sqrt2_system, sqrt2):
    dual = dual_points(sqrt2_system, 100)
    eta = {INF: RealBall.exact(0, 256)}
    with pytest.raises(PreconditionViolated):
        build_polynomial(dual, eta, {}, sqrt2_system, c1=Fraction(1, 10 ** 9))


@pytest.fixture(scope="module")
def real_pipeline_system(xi):
    return ApproxSystem(2, xi, INV_GAMMA, Fraction(1, 1000))


REAL_XS = (100, 1000, 10000)


@pytest.fixture(scope="module")
def real_series(real_pipeline_system):
    return approximation_series(real_pipeline_system, T3, REAL_XS)


@pytest.fixture(scope="module")
def real_pipeline(real_series):
    return real_series["runs"]


def test_real_pipeline_polynomials(real_pipeline):
    for run in real_pipeline:
        poly = run["polynomial"]
        assert poly["checks"]["integral"]
        assert poly["passed"]
        assert run["F"].degree == 3
        assert run["F"].coeff(3) == 1


def test_real_pipeline_roots(real_pipeline):
    for run in real_pipeline:
        root = run["roots"]["inf"]
        assert root["distance"].upper() < Fraction(1, run["X"])
        assert root["predicted_exponent"] == pytest.approx(-(GAMMA ** 2))


def test_real_pipeline_fit(real_pipeline_system, real_series):
    for X in REAL_XS:
        assert enumerate_solutions(real_pipeline_system, X).is_empty()
    runs = real_series["runs"]
    assert len({run["polynomial"]["c1"] for run in runs}) == 1
    xs = [math.log(r["roots"]["inf"]["height"]) for r in runs]
    ys = [math.log(float(r["roots"]["inf"]["distance"].center)) for r in runs]
    slope = loglog_slope(xs, ys)["slope"]
    assert slope <= -(GAMMA ** 2 - 0.15)
    assert real_series["fits"]["inf"]["slope"] == pytest.approx(slope)
    assert real_series["fits"]["inf"]["predicted"] == pytest.approx(-(GAMMA ** 2))


def test_series_rejects_small_c1(real_pipeline_system):
    with pytest.raises(PreconditionViolated):
        approximation_series(real_pipeline_system, T3, (100,), c1=Fraction(1, 10 ** 9))


def test_padic_pipeline(sqrt2, sqrt_minus7):
    system = ApproxSystem(2, sqrt2, Fraction(-1), Fraction(1, 32), {2: sqrt_minus7}, {2: Fraction(3, 2)})
    run = approximation_pipeline(system, T3, 100)
    assert "inf" not in run["roots"]
    root = run["roots"]["2"]
    assert root["integral"]
    assert root["certificate"]["distance_ok"]
    assert run["polynomial"]["checks"]["value_2"]
    assert run["polynomial"]["checks"]["derivative_2"]


def test_default_rho(sqrt2, sqrt_minus7):
    system = ApproxSystem(2, sqrt2, Fraction(-1), Fraction(1, 32), {2: sqrt_minus7}, {2: Fraction(3, 2)})
    assert default_rho(system)[2].representative() == 1
    # |3 xi^2|_2 = 1 совпадает с |rho|_2, поэтому rho умножается на 2
    assert default_rho(system, T3)[2].representative() == 2


def test_extract_roots_requires_positive_total(sqrt2):
    system = ApproxSystem(1, sqrt2, Fraction(-1), Fraction(1))
    with pytest.raises(PreconditionViolated):
        extract_roots(IntPoly.from_high([1, 0, -2]), system)
