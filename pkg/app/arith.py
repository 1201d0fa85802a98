import logging
import math
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence, Union

from app.errors import DependentVectors, InsufficientPrecision, NonSymmetricResult
from app.models.ball import RealBall
from app.models.lattice import J, Mat2, Point3
from app.models.padic import PadicNumber, padic_abs
from app.models.place import Place

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


def _point(x) -> Point3:
    return x if isinstance(x, Point3) else Point3.of(x)


# ОПРЕДЕЛИТЕЛИ И СКОБКИ
def det3(x, y, z) -> int:
    """
    Определитель 3x3 со строками x, y, z
    """
    x, y, z = _point(x), _point(y), _point(z)
    return (
        x.x0 * (y.x1 * z.x2 - y.x2 * z.x1)
        - x.x1 * (y.x0 * z.x2 - y.x2 * z.x0)
        + x.x2 * (y.x0 * z.x1 - y.x1 * z.x0)
    )


def bracket_matrix(x, y, z) -> Mat2:
    x, y, z = _point(x), _point(y), _point(z)
    return -(x.matrix() * J * z.matrix() * J * y.matrix())


def bracket(x, y, z) -> Point3:
    """
    [x, y, z] = -x J z J y; результат обязан быть симметричным
    """
    m = bracket_matrix(x, y, z)
    if not m.is_symmetric():
        raise NonSymmetricResult(
            "произведение -xJzJy не симметрично",
            x=_point(x).as_tuple(), y=_point(y).as_tuple(), z=_point(z).as_tuple(), result=m.rows(),
        )
    return m.to_point()


def wedge(x, y) -> Point3:
    x, y = _point(x), _point(y)
    return Point3(
        x.x1 * y.x2 - x.x2 * y.x1,
        -(x.x0 * y.x2 - x.x2 * y.x0),
        x.x0 * y.x1 - x.x1 * y.x0,
    )


def content(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g


def height_subspace(x, y) -> Fraction:
    """
    Высота плоскости <x, y> для целых x, y: ||x^y||_inf / content(x^y)
    """
    w = wedge(x, y)
    if w.is_zero():
        raise DependentVectors("векторы линейно зависимы", x=_point(x).as_tuple(), y=_point(y).as_tuple())
    return Fraction(w.norm(), w.content())


def jwj_identity(w: Mat2) -> bool:
    """
    J w J tw = -det(w) I
    """
    lhs = J * w * J * w.transpose()
    return lhs == Mat2.identity() * (-w.det())


# НОРМЫ
def sup_norm(x: Sequence[Rational], place: Place) -> Rational:
    if place.is_infinite:
        values = [abs(Fraction(c)) for c in x]
        best = max(values, default=Fraction(0))
        return int(best) if best.denominator == 1 else best
    return max((padic_abs(c, place.p) for c in x), default=Fraction(0))


def ball_max(balls: Sequence[RealBall]) -> RealBall:
    if len(balls) == 1:
        return balls[0]
    lo = max(b.lower() for b in balls)
    hi = max(b.upper() for b in balls)
    bits = min(b.bits for b in balls)
    return RealBall.from_interval(lo, hi, bits)


def l_form(
    x: Sequence[int],
    xi: Union[RealBall, PadicNumber, Fraction],
    n: Optional[int] = None,
    threshold: Optional[Rational] = None,
):
    """
    L(x) = max_{1<=l<=n} |x_l - x_0 xi^l| в месте, определяемом типом xi.
    При заданном threshold сравнение L(x) <= threshold должно быть решено
    """
    coords = list(x)
    n = len(coords) - 1 if n is None else n
    if isinstance(xi, PadicNumber):
        return _l_form_padic(coords, xi, n, threshold)
    if isinstance(xi, (int, Fraction)):
        xi = Fraction(xi)
        return max((abs(coords[l] - coords[0] * xi ** l) for l in range(1, n + 1)), default=Fraction(0))
    terms = []
    power = RealBall.exact(1, xi.bits)
    for l in range(1, n + 1):
        power = power * xi
        terms.append(abs(coords[l] - coords[0] * power))
    value = ball_max(terms)
    if threshold is not None and value.lower() <= threshold < value.upper():
        raise InsufficientPrecision("L(x) неотделимо от порога", threshold=threshold, value=value)
    return value


def _l_form_padic(coords, xi: PadicNumber, n: int, threshold) -> Fraction:
    p = xi.p
    exact = Fraction(0)
    bound = Fraction(0)
    power = PadicNumber.from_rational(1, p, max(xi.absolute_precision, 1) + 64)
    for l in range(1, n + 1):
        power = power * xi
        diff = coords[l] - coords[0] * power
        if diff.is_zero_marker():
            bound = max(bound, diff.norm())
        else:
            exact = max(exact, diff.norm())
    if bound > exact and threshold is not None and not bound <= threshold:
        raise InsufficientPrecision("p-адическая точность не решает сравнение", p=p, threshold=threshold)
    return max(exact, bound)


# ДРОБНЫЕ ЧАСТИ
def frac_dist(beta: Union[RealBall, Rational]):
    """
    {beta}: расстояние до ближайшего целого, в [0, 1/2]
    """
    if isinstance(beta, (int, Fraction)):
        q = Fraction(beta)
        n = math.floor(q + Fraction(1, 2))
        return abs(q - n)
    if beta.radius >= Fraction(1, 4):
        raise InsufficientPrecision("радиус шара не меньше 1/4")
    lo, hi = beta.lower(), beta.upper()
    n = math.floor(beta.center + Fraction(1, 2))
    if not beta.is_exact() and (lo <= n - Fraction(1, 2) or hi >= n + Fraction(1, 2)):
        raise InsufficientPrecision("ближайшее целое не определено")
    d = beta - n
    if d.lower() >= 0:
        return d
    if d.upper() <= 0:
        return -d
    return abs(d)


def nearest_int(q: Rational) -> int:
    """
    Округление к ближайшему целому, половины вниз
    """
    q = Fraction(q)
    if q < 0:
        return -nearest_int(-q)
    return math.ceil(q + Fraction(1, 2)) - 1
