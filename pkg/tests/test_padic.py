import math
import random
from fractions import Fraction

import pytest
from sympy import factorint

from app.errors import CriterionFails, DomainError, PreconditionViolated
from app.models import INF, IntPoly, PadicNumber, Place, padic_abs, valuation
from app.padic import (
    check_strong_approx, denominator_clear, hensel_certificate, hensel_lift, padic_dist, strong_approx,
    wedge_norm,
)


def test_valuation_and_abs():
    assert valuation(Fraction(12, 5), 2) == 2
    assert valuation(Fraction(5, 12), 2) == -2
    assert valuation(0, 3) == math.inf
    assert padic_abs(12, 2) == Fraction(1, 4)
    assert padic_abs(0, 5) == 0


def test_padic_number_arithmetic():
    third = PadicNumber.from_rational(Fraction(1, 3), 2, 20)
    assert third.valuation == 0
    assert (third * 3).agrees_with(PadicNumber.from_rational(1, 2, 20))
    x = PadicNumber.from_rational(Fraction(12, 5), 2, 20)
    assert x.valuation == 2
    assert x.norm() == Fraction(1, 4)
    n = PadicNumber.from_int(13, 2, 10)
    assert n.residue(3) == 5
    assert n.digits(4) == [1, 0, 1, 1]


def test_place_validation():
    assert Place.parse("inf").is_infinite
    assert Place.parse("7").p == 7
    assert str(INF) == "inf"
    with pytest.raises(DomainError):
        Place.prime(4)


@pytest.mark.parametrize("seed", [11, 12])
def test_product_formula(seed):
    rng = random.Random(seed)
    for _ in range(5000):
        m = Fraction(rng.choice([-1, 1]) * rng.randint(1, 10 ** 9), rng.randint(1, 10 ** 9))
        primes = set(factorint(m.numerator)) | set(factorint(m.denominator))
        primes.discard(-1)
        total = abs(m)
        for p in primes:
            total *= padic_abs(m, p)
        assert total == 1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_padic_dist_ultrametric(p):
    rng = random.Random(p)

    def point():
        while True:
            v = [rng.randint(-60, 60) for _ in range(3)]
            if any(v):
                return v

    for _ in range(10_000):
        u, v, w = point(), point(), point()
        assert padic_dist(u, v, p) <= max(padic_dist(u, w, p), padic_dist(w, v, p))
        assert padic_dist(u, u, p) == 0


def _sup(v, p):
    return max(padic_abs(c, p) for c in v)


@pytest.mark.parametrize("p", [2, 3, 7])
def test_wedge_inequalities(p):
    rng = random.Random(100 + p)

    def point():
        return [Fraction(rng.randint(-500, 500), p ** rng.randint(0, 3)) for _ in range(3)]

    for _ in range(10_000):
        u, v, w = point(), point(), point()
        uw = sum(a * b for a, b in zip(u, w))
        uv = sum(a * b for a, b in zip(u, v))
        combo = [uw * b - uv * c for b, c in zip(v, w)]
        assert _sup(combo, p) <= _sup(u, p) * wedge_norm(v, w, p)
        assert _sup(v, p) * wedge_norm(u, w, p) <= max(
            _sup(w, p) * wedge_norm(u, v, p), _sup(u, p) * wedge_norm(v, w, p)
        )


def test_hensel_sqrt2_in_z7():
    F = IntPoly.from_high([1, 0, -2])
    xi = PadicNumber.from_int(3, 7, 60)
    alpha = hensel_lift(F, xi, 50)
    cert = hensel_certificate(F, xi, alpha)
    assert cert["residual_valuation"] >= 50
    assert cert["distance_ok"]
    assert cert["distance"] == cert["bound"] == Fraction(1, 7)
    assert alpha.residue(1) == 3


@pytest.mark.parametrize("p, start", [(5, 1), (7, 1)])
def test_hensel_non_residue(p, start):
    F = IntPoly.from_high([1, 0, -3])
    with pytest.raises(CriterionFails):
        hensel_lift(F, PadicNumber.from_int(start, p, 30), 20)


def test_hensel_requires_integral_start():
    F = IntPoly.from_high([2, -1])
    with pytest.raises(PreconditionViolated):
        hensel_lift(F, PadicNumber.from_rational(Fraction(1, 2), 2, 20), 10)


def test_denominator_clear():
    F = IntPoly.from_high([2, -1])
    star, xi_star, d = denominator_clear(F, PadicNumber.from_rational(Fraction(1, 2), 2, 20))
    assert d == 2
    assert star.coeffs == (-2, 2)
    assert xi_star.is_integral()


def test_denominator_clear_third_at_three():
    F = IntPoly.from_high([1, -1, 0])
    xi = PadicNumber.from_rational(Fraction(1, 3), 3, 20)
    star, xi_star, d = denominator_clear(F, xi)
    assert d == 3
    assert star == IntPoly.from_high([1, -3, 0])
    assert xi_star.residue(10) == 1
    assert star(xi_star).agrees_with(F(xi) * 9)


def _random_targets(rng):
    primes = rng.sample([2, 3, 5, 7], rng.randint(0, 3))
    targets = {}
    need = Fraction(1, 2)
    for p in primes:
        eps = Fraction(1, p ** rng.randint(0, 6))
        need *= p / eps
        if rng.random() < 0.5:
            value = rng.randint(-10 ** 6, 10 ** 6)
        else:
            value = PadicNumber.from_rational(rng.randint(-10 ** 6, 10 ** 6), p, 30)
        targets[Place.prime(p)] = (value, eps)
    center = Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 1000))
    targets[INF] = (center, need * Fraction(rng.randint(100, 300), 100))
    return targets


def test_strong_approx_random_systems():
    rng = random.Random(2024)
    for _ in range(100):
        targets = _random_targets(rng)
        r = strong_approx(targets)
        checks = check_strong_approx(r, targets)
        assert all(checks.values()), checks


def test_strong_approx_rejects_small_eps_inf():
    targets = {INF: (Fraction(1, 3), Fraction(1, 100)), Place.prime(2): (1, Fraction(1, 8))}
    with pytest.raises(PreconditionViolated):
        strong_approx(targets)


def test_strong_approx_accepts_gmpy2_rationals():
    gmpy2 = pytest.importorskip("gmpy2")
    targets = {
        INF: (Fraction(gmpy2.mpz(-32355429), gmpy2.mpz(1000)), gmpy2.mpq(17, 2)),
        Place.prime(2): (PadicNumber.from_int(5, 2, 30), Fraction(1, 8)),
    }
    r = strong_approx(targets)
    assert type(r.numerator) is int and type(r.denominator) is int
    assert all(check_strong_approx(r, targets).values())
