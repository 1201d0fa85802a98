from fractions import Fraction

import pytest

from app.arith import det3
from app.errors import InsufficientTail, NoSeedFound, PreconditionViolated, SeedInvalid
from app.fibonacci import (
    delta_series, det_power_check, det_triples, ea_seed, extend_ea, extend_fib, find_ea_seed,
    growth_check, limit_point, mod_a_check, padic_example, padic_example_det3, padic_norm_check,
    real_example, sandwich_check, shifted_fibonacci, verify_identities, y_recurrence_check,
)
from app.models import EaSeq, PadicNumber, Place, Point3


def test_ea_pinned_terms(ea2):
    assert ea2.term(1).as_tuple() == (0, 1, 0)
    assert ea2.term(2).as_tuple() == (1, 1, 2)
    assert ea2.term(5).as_tuple() == (5, 3, 2)
    assert ea2.term(6).as_tuple() == (21, 13, 8)
    assert ea2.term(7).as_tuple() == (208, 129, 80)
    assert ea2.term(8).as_tuple() == (8741, 5421, 3362)


def test_ea_eps_pattern(ea2):
    assert [ea2.eps(k) for k in range(1, 9)] == [-1, 1, -1, -1, 1, -1, -1, 1]
    # период 3 начиная с первого члена
    for k in range(1, ea2.upto - 2):
        assert ea2.eps(k + 3) == ea2.eps(k)


def test_ea_det_triples(ea2):
    assert all(abs(d) == 2 for d in det_triples(ea2))


def test_ea_identities_pass(ea2):
    report = verify_identities(ea2, range(3, 21))
    assert report["passed"]
    assert report["failures"] == []
    assert report["k_range"] == [3, 20]
    assert report["summary"]["recurrence"]["pass"] > 0


def test_ea_identities_threads_agree(ea2):
    single = verify_identities(ea2, range(3, 12), threads=1)
    pooled = verify_identities(ea2, range(3, 12), threads=4)
    assert single == pooled


def test_ea_identities_catch_corruption(ea2):
    xs = list(ea2.x)
    xs[9] = xs[9] + Point3.of((1, 0, 0))
    broken = EaSeq(ea2.a, tuple(xs))
    report = verify_identities(broken, range(3, 21))
    assert not report["passed"]
    names = {f["identity"] for f in report["failures"]}
    assert "recurrence" in names
    assert all("lhs" in f and "rhs" in f for f in report["failures"])


def test_ea_seed_validation():
    with pytest.raises(SeedInvalid):
        extend_ea(EaSeq(2, (Point3.of((1, 1, 1)), Point3.of((1, 1, 2)))), 5)
    with pytest.raises(PreconditionViolated):
        find_ea_seed(0, 2)
    with pytest.raises(NoSeedFound):
        find_ea_seed(2, 0)


def test_ea_seed_search_finds_unimodular_pair():
    x1, x2 = find_ea_seed(2, 2)
    assert abs(x1.det()) == 1 and abs(x2.det()) == 1
    seq = extend_ea(EaSeq(2, (x1, x2)), 10)
    assert all(abs(d) == 2 for d in det_triples(seq))
    assert all(0 <= c <= 2 for c in x1.as_tuple() + x2.as_tuple())
    assert all(x.x0 == x.norm() for x in seq.x[2:8])


def test_ea_extend_truncates():
    seq = ea_seed(2)
    assert extend_ea(seq, 1).upto == 1
    assert extend_ea(seq, 12).upto == 12


def test_shifted_fibonacci():
    assert [shifted_fibonacci(i) for i in range(-1, 8)] == [1, 0, 1, 1, 2, 3, 5, 8, 13]
    assert shifted_fibonacci(10) == 55


def test_real_example_checks(real_fib):
    assert det_power_check(real_fib)["passed"]
    assert sandwich_check(real_fib)["passed"]
    assert mod_a_check(real_fib)["passed"]
    assert y_recurrence_check(real_fib)["passed"]
    assert growth_check(real_fib)["passed"]


def test_real_example_det3(real_fib):
    assert real_fib.y[0].as_tuple() == (5, -2, 0)
    assert det3(real_fib.y[0], real_fib.y[1], real_fib.y[2]) == 16


def test_real_example_preconditions():
    with pytest.raises(PreconditionViolated):
        real_example(1, 1, 2)
    with pytest.raises(PreconditionViolated):
        real_example(2, 2, 2)


def test_padic_example_checks(padic_fib):
    assert det_power_check(padic_fib)["passed"]
    assert padic_norm_check(padic_fib)["passed"]
    assert y_recurrence_check(padic_fib)["passed"]
    with pytest.raises(PreconditionViolated):
        mod_a_check(padic_fib)


def test_padic_norm_needs_prime(real_fib):
    with pytest.raises(PreconditionViolated):
        padic_norm_check(real_fib)


@pytest.mark.parametrize("p, m", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)])
def test_padic_example_det3_closed_form(p, m):
    seq = extend_fib(padic_example(p, m), 2)
    assert det3(seq.y[0], seq.y[1], seq.y[2]) == padic_example_det3(p, m)


def test_padic_example_det3_value():
    assert padic_example_det3(2, 2) == 294191104


def test_delta_series_real(real_fib):
    series = delta_series(real_fib)
    for w, value in zip(real_fib.w, series.values):
        assert value == Fraction(abs(w.det()), w.norm())
    assert len(series.exponent_ratios) == len(series.values) - 1


def test_limit_point_real(ea2):
    lp = limit_point(ea2, bits=128, strict=False)
    assert lp.index == 20
    assert abs(float(lp.xi) - 5421 / 8741) < 1e-6
    assert lp.xi.contains(Fraction(ea2.term(20).x1, ea2.term(20).x0))
    assert lp.constant > 0


def test_limit_point_strict_needs_tail(ea2):
    with pytest.raises(InsufficientTail):
        limit_point(ea2, bits=256, index=6, strict=True)
    with pytest.raises(InsufficientTail):
        limit_point(ea2, index=40)


def test_limit_point_padic(padic_fib):
    lp = limit_point(padic_fib, Place.prime(2))
    assert lp.place.p == 2
    assert isinstance(lp.xi, PadicNumber)
    assert lp.xi.absolute_precision > 0


def test_limit_point_padic_needs_fib(ea2):
    with pytest.raises(PreconditionViolated):
        limit_point(ea2, Place.prime(2), strict=False)
