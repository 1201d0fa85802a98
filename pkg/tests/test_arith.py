import random
from fractions import Fraction

import pytest

from app.arith import (
    bracket, content, det3, frac_dist, height_subspace, jwj_identity, l_form, nearest_int, wedge,
)
from app.errors import DependentVectors, InsufficientPrecision, NonSymmetricResult
from app.models import Golden, Mat2, PadicNumber, Point3, RealBall


def _random_point(rng, bound=10 ** 6):
    return Point3(*(rng.randint(-bound, bound) for _ in range(3)))


def test_det3_pinned_witness():
    assert det3((5, 3, 2), (21, 13, 8), (208, 129, 80)) == 2


@pytest.mark.parametrize("seed", [1, 2])
def test_det3_is_wedge_dot(seed):
    rng = random.Random(seed)
    for _ in range(5000):
        x, y, z = (_random_point(rng) for _ in range(3))
        assert det3(x, y, z) == wedge(x, y).dot(z)
        assert wedge(x, y).dot(x) == 0


@pytest.mark.parametrize("seed", [3, 4])
def test_jwj_identity(seed):
    rng = random.Random(seed)
    for _ in range(5000):
        w = Mat2(*(rng.randint(-10 ** 4, 10 ** 4) for _ in range(4)))
        assert jwj_identity(w)


def test_bracket_symmetric_case():
    identity = Point3(1, 0, 1)
    assert bracket(identity, identity, (2, 3, 5)) == Point3(5, -3, 2)


def test_bracket_rejects_non_symmetric():
    with pytest.raises(NonSymmetricResult):
        bracket((1, 1, 0), (1, 0, 0), (1, 0, 1))


def test_content_and_height():
    assert content([12, -18, 30]) == 6
    assert content([0, 0, 7]) == 7
    assert height_subspace((1, 0, 0), (0, 1, 0)) == 1
    with pytest.raises(DependentVectors):
        height_subspace((1, 2, 3), (2, 4, 6))


def test_l_form_rational_and_ball():
    assert l_form((5, 3, 2), Fraction(3, 5)) == Fraction(1, 5)
    ball = RealBall.exact(Fraction(3, 5), 128)
    value = l_form((5, 3, 2), ball)
    assert value.contains(Fraction(1, 5))


def test_l_form_padic():
    one = PadicNumber.from_rational(1, 2, 20)
    assert l_form((1, 3, 5), one) == Fraction(1, 2)


def test_frac_dist():
    assert frac_dist(Fraction(7, 3)) == Fraction(1, 3)
    assert frac_dist(Fraction(5, 2)) == Fraction(1, 2)
    assert frac_dist(-Fraction(1, 10)) == Fraction(1, 10)
    ball = RealBall.from_center_radius(Fraction(9, 4), Fraction(1, 1000), 64)
    assert frac_dist(ball).contains(Fraction(1, 4))


def test_frac_dist_undecided():
    ball = RealBall.from_center_radius(Fraction(1, 2), Fraction(1, 100), 64)
    with pytest.raises(InsufficientPrecision):
        frac_dist(ball)


@pytest.mark.parametrize("seed", [5])
def test_frac_dist_triangle(seed):
    rng = random.Random(seed)
    for _ in range(10 ** 4):
        a = Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 4))
        b = Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 4))
        n = rng.randint(-50, 50)
        assert 0 <= frac_dist(a) <= Fraction(1, 2)
        assert frac_dist(a + n) == frac_dist(a)
        assert frac_dist(n * a) <= abs(n) * frac_dist(a)
        assert frac_dist(a + b) <= frac_dist(a) + frac_dist(b)


def test_nearest_int():
    assert nearest_int(Fraction(5, 2)) == 2
    assert nearest_int(Fraction(-5, 2)) == -2
    assert nearest_int(Fraction(7, 3)) == 2
    assert nearest_int(Fraction(-8, 3)) == -3


def test_golden_arithmetic():
    gamma = Golden.gamma()
    assert gamma * gamma == gamma + 1
    assert gamma ** 3 + 1 == 2 * gamma ** 2
    assert gamma.inverse() == Golden(Fraction(-1), Fraction(1))
    assert (gamma / gamma) == Golden.of(1)
    assert abs(float(gamma) - 1.6180339887498949) < 1e-12


def test_ball_golden_and_sqrt():
    g = RealBall.golden(128)
    assert g.overlaps(Golden.gamma().to_ball(64))
    assert (g * g).overlaps(g + 1)
    root = RealBall.exact(2, 128).sqrt()
    assert (root * root).contains(2)
    assert root.radius < Fraction(1, 2 ** 100)


def test_ball_sign_is_certified():
    assert RealBall.exact(Fraction(-1, 3), 64).sign() == -1
    assert RealBall.exact(0, 64).sign() == 0
    with pytest.raises(InsufficientPrecision):
        RealBall.from_center_radius(Fraction(0), Fraction(1, 10), 64).sign()
    a = RealBall.exact(1, 64)
    assert a.certified_lt(2)
    with pytest.raises(InsufficientPrecision):
        RealBall.from_center_radius(Fraction(1), Fraction(1, 2), 64).certified_lt(Fraction(5, 4))
