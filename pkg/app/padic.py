import logging
import math
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from sympy import factorint
from sympy.ntheory.modular import crt

from app.errors import CriterionFails, InsufficientPrecision, PreconditionViolated, ZeroVector
from app.models.ball import RealBall
from app.models.padic import PadicNumber, PadicPoint, padic_abs, valuation
from app.models.place import Place
from app.models.poly import IntPoly

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


def _coords(u, p: Optional[int]) -> Tuple[int, Sequence[Fraction]]:
    if isinstance(u, PadicPoint):
        return u.p, u.representatives()
    if p is None:
        raise ValueError("для целочисленных точек нужно указать p")
    return p, [Fraction(c) for c in u]


def wedge_norm(u: Sequence[Fraction], v: Sequence[Fraction], p: int) -> Fraction:
    """
    ||u ^ v||_p: максимум по всем минорам 2x2
    """
    best = Fraction(0)
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            best = max(best, padic_abs(u[i] * v[j] - u[j] * v[i], p))
    return best


def padic_dist(u, v, p: Optional[int] = None) -> Fraction:
    """
    Проективное расстояние ||u ^ v||_p / (||u||_p ||v||_p) по представителям координат
    """
    p, cu = _coords(u, p)
    _, cv = _coords(v, p)
    nu = max((padic_abs(c, p) for c in cu), default=Fraction(0))
    nv = max((padic_abs(c, p) for c in cv), default=Fraction(0))
    if nu == 0 or nv == 0:
        raise ZeroVector("нулевой вектор в проективном расстоянии", p=p)
    return wedge_norm(cu, cv, p) / (nu * nv)


# ПОДЪЁМ ГЕНЗЕЛЯ
def hensel_lift(F: IntPoly, xi: PadicNumber, target_precision: int) -> PadicNumber:
    """
    Корень alpha многочлена F в Z_p рядом с xi при |F(xi)|_p < |F'(xi)|_p^2.
    F(alpha) = 0 mod p^target_precision, |xi - alpha|_p <= |F(xi)|_p / |F'(xi)|_p
    """
    p = xi.p
    if not xi.is_integral():
        raise PreconditionViolated("xi должен лежать в Z_p, сначала denominator_clear", p=p)
    dF = F.derivative()
    if dF.is_zero():
        raise CriterionFails("производная тождественно равна нулю", poly=str(F))

    f_xi, df_xi = F(xi), dF(xi)
    if df_xi.is_zero_marker():
        raise InsufficientPrecision("F'(xi) неотличимо от нуля на данной точности", p=p)
    v_df = df_xi.valuation
    if f_xi.is_zero_marker():
        if f_xi.valuation <= 2 * v_df:
            raise InsufficientPrecision("точность xi не подтверждает критерий Гензеля", p=p)
        v_f = f_xi.valuation
    else:
        v_f = f_xi.valuation
        if v_f <= 2 * v_df:
            raise CriterionFails(
                "|F(xi)|_p < |F'(xi)|_p^2 не выполнено", p=p, v_F=v_f, v_dF=v_df, poly=str(F)
            )

    k = max(target_precision, 1) + v_df + 1
    mod = p ** k
    a = xi.lift_int() % mod
    while True:
        fa = F(a)
        if fa == 0 or valuation(fa, p) >= k:
            break
        dfa = dF(a)
        shift = p ** v_df
        step = (fa // shift) * pow(dfa // shift, -1, mod) % mod
        a = (a - step) % mod
    logger.debug("hensel: p=%s v(F)=%s v(F')=%s -> %s", p, v_f, v_df, a)
    return PadicNumber.from_int(a, p, k - v_df)


def hensel_certificate(F: IntPoly, xi: PadicNumber, alpha: PadicNumber) -> Dict[str, object]:
    """
    Проверка результата подъёма: остаток F(alpha) и оценка расстояния
    """
    p = xi.p
    a = alpha.lift_int()
    f_xi = F(xi)
    df_xi = F.derivative()(xi)
    residual = F(a)
    residual_v = math.inf if residual == 0 else valuation(residual, p)
    dist = padic_abs(xi.representative() - a, p)
    bound = f_xi.norm() / df_xi.norm()
    return {
        "residual_valuation": residual_v,
        "distance": dist,
        "bound": bound,
        "distance_ok": dist <= bound,
    }


def denominator_clear(F: IntPoly, xi_p: PadicNumber, d: Optional[int] = None) -> Tuple[IntPoly, PadicNumber, int]:
    """
    F*(T) = d^m F(T/d), xi* = d xi_p лежит в Z_p
    """
    p = xi_p.p
    if d is None:
        d = p ** (-xi_p.valuation) if xi_p.valuation < 0 else 1
    m = F.degree
    star = IntPoly(tuple(c * d ** (m - i) for i, c in enumerate(F.coeffs)))
    xi_star = xi_p * d
    if not xi_star.is_integral():
        raise PreconditionViolated("d * xi_p не целое", p=p, d=d)
    return star, xi_star, d


# СИЛЬНАЯ АППРОКСИМАЦИЯ
def _precision_index(eps: Fraction, p: int) -> int:
    """
    n_p с p^(-n_p - 1) <= eps < p^(-n_p)
    """
    if eps <= 0:
        raise PreconditionViolated("eps_p должен быть положительным", p=p)
    n = 0
    while Fraction(p) ** (-n) <= eps:
        n -= 1
    while Fraction(p) ** (-n - 1) > eps:
        n += 1
    return n


def _exact(q) -> Fraction:
    """
    Fraction с числителем и знаменателем int: mpq и Fraction(mpz) из gmpy2 сюда не проходят
    """
    q = Fraction(q)
    return Fraction(int(q.numerator), int(q.denominator))


def _real_center(value) -> Tuple[Fraction, Fraction]:
    if isinstance(value, RealBall):
        return _exact(value.center), _exact(value.radius)
    return _exact(value), Fraction(0)


def strong_approx(targets: Mapping[Place, Tuple[object, Rational]]) -> Fraction:
    """
    Рациональное r с |r - xi_inf| <= eps_inf, |r - xi_p|_p <= eps_p для p из S
    и |r|_q <= 1 вне S
    """
    inf = [pl for pl in targets if pl.is_infinite]
    if len(inf) != 1:
        raise PreconditionViolated("нужна ровно одна архимедова цель")
    xi_inf, eps_inf = targets[inf[0]]
    center, radius = _real_center(xi_inf)
    eps_inf = _exact(eps_inf)

    primes = sorted(pl.p for pl in targets if not pl.is_infinite)
    need = Fraction(1, 2)
    for p in primes:
        need *= Fraction(p) / _exact(targets[Place.prime(p)][1])
    if eps_inf < need:
        raise PreconditionViolated("eps_inf меньше (1/2) prod p / eps_p", eps_inf=eps_inf, need=need)

    residues, moduli = [], []
    M = Fraction(1)
    for p in primes:
        xi_p, eps_p = targets[Place.prime(p)]
        e = _precision_index(_exact(eps_p), p) + 1
        M *= Fraction(p) ** e
        if e <= 0:
            continue
        if isinstance(xi_p, PadicNumber):
            r_p = xi_p.residue(e)
        else:
            q = _exact(xi_p)
            if valuation(q, p) < 0:
                raise PreconditionViolated("xi_p должен лежать в Z_p", p=p)
            r_p = (q.numerator * pow(q.denominator, -1, p ** e)) % p ** e
        residues.append(r_p)
        moduli.append(p ** e)

    r_hat = int(crt(moduli, residues)[0]) if moduli else 0
    k0 = int(math.floor((center - r_hat) / M))
    best = None
    for k in (k0, k0 + 1):
        r = r_hat + k * M
        key = (abs(r - center), abs(r))
        if best is None or key < best[0]:
            best = (key, r)
    r = best[1]
    if abs(r - center) + radius > eps_inf:
        raise InsufficientPrecision("радиус xi_inf не позволяет подтвердить |r - xi| <= eps", radius=radius)
    logger.debug("strong_approx: S=%s M=%s r=%s", primes, M, r)
    return r


def check_strong_approx(r: Fraction, targets: Mapping[Place, Tuple[object, Rational]]) -> Dict[str, bool]:
    """
    Проверяет все три семейства неравенств и носитель знаменателя
    """
    primes = sorted(pl.p for pl in targets if not pl.is_infinite)
    out = {}
    for place, (value, eps) in targets.items():
        if place.is_infinite:
            center, radius = _real_center(value)
            out["inf"] = abs(r - center) + radius <= _exact(eps)
        else:
            rep = value.representative() if isinstance(value, PadicNumber) else _exact(value)
            out[str(place.p)] = padic_abs(r - rep, place.p) <= _exact(eps)
    out["denominator_support"] = all(q in primes for q in factorint(r.denominator))
    return out
