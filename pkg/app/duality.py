import logging
import math
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import mpmath
import numpy as np
from mpmath.ctx_iv import MPIntervalContext
from sympy import Matrix
from sympy.ntheory.modular import crt

from app.arith import content, l_form, nearest_int
from app.config import settings
from app.errors import (
    HypothesisFails, Inconclusive, InsufficientPrecision, IntegralityFails, LinearAlgebraSingular,
    NoSignChange, NotFound, PreconditionViolated, SearchExhausted, VolumeInequalityFails,
)
from app.fitting import log_of_fraction, log_of_int, loglog_slope
from app.models.ball import RealBall
from app.models.golden import Golden
from app.models.padic import PadicNumber, padic_abs, valuation
from app.models.place import INF, Place
from app.models.poly import IntPoly
from app.models.system import (
    ApproxSystem, DualPoints, Exponent, IcInterval, IntVector, SolutionSet, exponent_float, is_minus_one,
)
from app.padic import denominator_clear, hensel_certificate, hensel_lift, strong_approx
from app.parallel import parallel_map

logger = logging.getLogger(__name__)

IV_BITS = 192
DESK_NORM_CAP = 10 ** 5
RELAX_BUDGET = 12
MAX_DUAL_GRID = 4_000_000
INTEGRALITY_RETRIES = 8

# собственный интервальный контекст: глобальный mpmath.iv не трогаем
iv = MPIntervalContext()
iv.prec = IV_BITS


# ИНТЕРВАЛЬНЫЕ ПОРОГИ
def _iv(value):
    """
    Интервал контекста iv, содержащий value
    """
    if isinstance(value, RealBall):
        return _iv(value.center) + _iv(value.radius) * iv.mpf([-1, 1])
    if isinstance(value, Golden):
        gamma = (1 + iv.sqrt(5)) / 2
        return _iv(value.a) + _iv(value.b) * gamma
    q = Fraction(value)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def power_bound(c, X, lam: Exponent):
    """
    c X^(-lam) как интервал
    """
    return _iv(c) * iv.exp(-_iv(lam) * iv.ln(_iv(X)))


def _upper(x) -> Fraction:
    return _fraction(x.b)


def _lower(x) -> Fraction:
    return _fraction(x.a)


def _mpf(value: Exponent):
    if isinstance(value, Golden):
        return mpmath.mpf(value.a.numerator) / value.a.denominator + mpmath.mpf(value.b.numerator) / value.b.denominator * mpmath.phi
    q = Fraction(value)
    return mpmath.mpf(q.numerator) / q.denominator


def _fraction(x) -> Fraction:
    """
    Точное значение двоичного числа mpmath; мантисса бывает mpz из gmpy2
    """
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def _rational_exponent(lam: Exponent) -> Optional[Fraction]:
    if isinstance(lam, Golden):
        return lam.a if lam.is_rational() else None
    return Fraction(lam)


def _le(value, c, X, lam: Exponent, what: str, **context) -> bool:
    """
    value <= c X^(-lam); недоказуемое сравнение даёт Inconclusive
    """
    exact = _rational_exponent(lam)
    if not isinstance(value, RealBall) and exact is not None:
        value, X = Fraction(value), Fraction(X)
        u, v = exact.numerator, exact.denominator
        return value ** v * X ** u <= Fraction(c) ** v
    decided = _iv(value) <= power_bound(c, X, lam)
    if decided is None:
        raise Inconclusive(f"сравнение {what} с порогом не решено", **context)
    return bool(decided)


def _precision_exponent(c, X, lam: Exponent, p: int) -> int:
    """
    Наименьшее целое k с p^(-k) <= c X^(-lam)
    """
    estimate = -iv.ln(power_bound(c, X, lam)) / iv.ln(iv.mpf(p))
    k = math.ceil(_lower(estimate))
    while not _le(Fraction(p) ** (-k), c, X, lam, f"p^-k, p={p}"):
        k += 1
    while _le(Fraction(p) ** (-(k - 1)), c, X, lam, f"p^-k, p={p}"):
        k -= 1
    return k


# ПРОВЕРКА ТОЧКИ
def check_solution(sys: ApproxSystem, x: Sequence[int], X) -> Dict[str, bool]:
    """
    Три семейства неравенств системы для целой точки x при данном X
    """
    X = Fraction(X)
    out = {"norm": max(abs(c) for c in x) <= X}
    L = l_form(x, sys.xi_inf, sys.n)
    out["inf"] = _le(L, sys.c, X, sys.lam_inf, "L_inf", point=tuple(x))
    for p in sys.primes:
        lower = _lower(power_bound(sys.c, X, sys.lam_p[p])) * Fraction(999, 1000)
        Lp = l_form(x, sys.xi_p[p], sys.n, threshold=lower)
        out[str(p)] = _le(Lp, sys.c, X, sys.lam_p[p], f"L_{p}", point=tuple(x))
    out["ok"] = all(out.values())
    return out


def _is_solution(sys: ApproxSystem, x: Sequence[int], X) -> bool:
    if not any(x):
        return False
    if max(abs(c) for c in x) > X:
        return False
    L = l_form(x, sys.xi_inf, sys.n)
    if not _le(L, sys.c, X, sys.lam_inf, "L_inf", point=tuple(x)):
        return False
    return check_solution(sys, x, X)["ok"]


def canonical(x: Sequence[int]) -> IntVector:
    """
    Представитель с положительной первой ненулевой координатой
    """
    for c in x:
        if c:
            return tuple(x) if c > 0 else tuple(-v for v in x)
    return tuple(x)


def primitive(x: Sequence[int]) -> IntVector:
    g = content(x)
    return canonical([c // g for c in x]) if g else tuple(x)


# ПЕРЕБОР РЕШЕНИЙ
def _congruences(sys: ApproxSystem, X) -> Tuple[int, List[int]]:
    """
    Общий модуль и вычеты xi_p^l для p-адических ограничений
    """
    moduli, residues = [], []
    for p in sys.primes:
        xi = sys.xi_p[p]
        k = _precision_exponent(sys.c, X, sys.lam_p[p], p)
        if k <= 0 or not xi.is_integral():
            continue
        power = PadicNumber.from_rational(1, p, xi.absolute_precision)
        row = []
        for _ in range(sys.n):
            power = power * xi
            row.append(power.residue(k))
        moduli.append(p ** k)
        residues.append(row)
    if not moduli:
        return 1, [0] * sys.n
    mod = math.prod(moduli)
    combined = [int(crt(moduli, [row[l] for row in residues])[0]) for l in range(sys.n)]
    return mod, combined


def enumerate_solutions(
    sys: ApproxSystem,
    X,
    norm_cap: Optional[int] = None,
    threads: Optional[int] = None,
) -> SolutionSet:
    """
    Все ненулевые целые x с ||x|| <= X, удовлетворяющие системе, с точностью до знака.
    Порядок: по слоям sup-нормы, внутри слоя лексикографически
    """
    X = Fraction(X)
    if X < 1:
        raise PreconditionViolated("нужно X >= 1", X=X)
    cap = DESK_NORM_CAP if norm_cap is None else int(norm_cap)
    box = min(math.floor(X), cap)
    truncated = cap < X
    if truncated:
        logger.warning("поиск ограничен нормой %d < X=%s", cap, X)

    t_hi = _upper(power_bound(sys.c, X, sys.lam_inf))
    centers = [b.center for b in sys.t_inf()]
    slack = max(b.radius for b in sys.t_inf()) * box
    mod, res = _congruences(sys, X)

    def coordinate(x0: int, l: int) -> range:
        centre = x0 * centers[l]
        lo = max(-box, math.ceil(centre - t_hi - slack))
        hi = min(box, math.floor(centre + t_hi + slack))
        if lo > hi:
            return range(0)
        if mod == 1:
            return range(lo, hi + 1)
        first = lo + (x0 * res[l - 1] - lo) % mod
        return range(first, hi + 1, mod)

    def scan(block: range) -> List[IntVector]:
        found = []
        for x0 in block:
            ranges = [coordinate(x0, l) for l in range(1, sys.n + 1)]
            if any(len(r) == 0 for r in ranges):
                continue
            for tail in product(*ranges):
                x = (x0,) + tail
                if x0 == 0 and canonical(x) != x:
                    continue
                if _is_solution(sys, x, X):
                    found.append(x)
        return found

    threads = settings.threads if threads is None else threads
    step = max(1, (box + 1) // max(4 * threads, 1))
    blocks = [range(s, min(s + step, box + 1)) for s in range(0, box + 1, step)]
    merged = [x for part in parallel_map(scan, blocks, threads) for x in part]
    merged.sort(key=lambda v: (max(abs(c) for c in v), v))

    prim: List[IntVector] = []
    for x in merged:
        v = primitive(x)
        if v not in prim:
            prim.append(v)
    logger.info("X=%s: найдено %d решений, %d примитивных", X, len(merged), len(prim))
    return SolutionSet(X, tuple(merged), tuple(prim), cap, truncated)


def check_zs_factoring(solutions: SolutionSet, sys: ApproxSystem) -> Dict[str, object]:
    """
    Если l v решение, то и m v с m = prod_p |l|_p^(-1) тоже решение
    """
    rows = []
    for x in solutions.solutions:
        v = primitive(x)
        l = content(x)
        m = 1
        for p in sys.primes:
            m *= p ** int(valuation(l, p))
        ok = _is_solution(sys, [m * c for c in v], solutions.X)
        rows.append({"x": x, "v": v, "l": l, "m": m, "ok": ok})
    return {"rows": rows, "passed": all(r["ok"] for r in rows)}


def fitted_constant(points: Iterable[Sequence[int]], xi: RealBall, lam: Exponent, margin=Fraction(101, 100)) -> Fraction:
    """
    margin * max L_inf(x) ||x||^lam: константа c, при которой точки решают систему на своей норме
    """
    best = Fraction(0)
    for x in points:
        value = _iv(l_form(x, xi)) * iv.exp(_iv(lam) * iv.ln(_iv(max(abs(c) for c in x))))
        best = max(best, Fraction(_upper(value)))
    return best * margin


# ИНТЕРВАЛЫ J_c
def _criterion(sys: ApproxSystem, v: Sequence[int]):
    """
    log X -> логарифм левой части критерия (вогнутая кусочно-линейная функция)
    """
    norm = mpmath.mpf(max(abs(c) for c in v))
    L = l_form(v, sys.xi_inf, sys.n)
    if L.contains_zero():
        raise InsufficientPrecision("L_inf(v) неотделимо от нуля", point=tuple(v))
    log_c = mpmath.log(_mpf(sys.c))
    log_norm = mpmath.log(norm)
    log_L = mpmath.log(_mpf(L.center))
    lam_inf = _mpf(sys.lam_inf)
    padic = []
    for p in sys.primes:
        Lp = l_form(v, sys.xi_p[p], sys.n)
        if Lp:
            padic.append((_mpf(sys.lam_p[p]), mpmath.log(_mpf(Lp))))

    def f(t):
        value = min(t - log_norm, log_c - lam_inf * t - log_L)
        for lam, log_Lp in padic:
            value += min(mpmath.mpf(0), log_c - lam * t - log_Lp)
        return value

    breaks = [mpmath.mpf(0), log_norm]
    if lam_inf > -1:
        breaks.append((log_c + log_norm - log_L) / (1 + lam_inf))
    for lam, log_Lp in padic:
        if lam > 0:
            breaks.append((log_c - log_Lp) / lam)
    return f, [t for t in breaks if t >= 0], {"norm": norm, "L": log_L, "padic": padic}


def _bisect_root(f, lo, hi, increasing: bool, steps: int = 160):
    for _ in range(steps):
        mid = (lo + hi) / 2
        if (f(mid) >= 0) == increasing:
            hi = mid
        else:
            lo = mid
    return hi if increasing else lo


def _closed_form(sys: ApproxSystem, v: Sequence[int]) -> Optional[Tuple[Fraction, Optional[Fraction]]]:
    norm = max(abs(c) for c in v)
    L = l_form(v, sys.xi_inf, sys.n)
    c = _mpf(sys.c)
    if not sys.primes and exponent_float(sys.lam_inf) > 0:
        hi = (c / _mpf(L.center)) ** (1 / _mpf(sys.lam_inf))
        return Fraction(norm), _fraction(hi)
    if is_minus_one(sys.lam_inf) and len(sys.primes) == 1:
        p = sys.primes[0]
        lam = _mpf(sys.lam_p[p])
        if lam > 1 and L.upper() <= sys.c * norm:
            Lp = l_form(v, sys.xi_p[p], sys.n)
            if not Lp:
                return Fraction(norm), None
            hi = (c / (norm * _mpf(Lp))) ** (1 / (lam - 1))
            return Fraction(norm), _fraction(hi)
    return None


def jc_interval(v: Sequence[int], sys: ApproxSystem, method: str = "auto", search_limit: float = 1e30) -> IcInterval:
    """
    Множество X >= 1, для которых v удовлетворяет критерию
    min{X/||v||, c X^-lam_inf / L_inf(v)} * prod_p min{1, c X^-lam_p / L_p(v)} >= 1
    """
    v = tuple(v)
    if content(v) != 1:
        raise PreconditionViolated("точка v должна быть примитивной", v=v)
    if method not in ("auto", "closed", "bisect"):
        raise PreconditionViolated(f"неизвестный метод {method}")
    with mpmath.workdps(40):
        if method in ("auto", "closed"):
            closed = _closed_form(sys, v)
            if closed is not None:
                lo, hi = closed
                return IcInterval(v, lo, hi, "closed", unbounded=hi is None)
            if method == "closed":
                raise PreconditionViolated("замкнутая формула неприменима к этой системе")

        f, breaks, _ = _criterion(sys, v)
        t_star = max(breaks, key=f)
        if f(t_star) < 0:
            return IcInterval(v, None, None, "bisect")
        t_max = mpmath.log(search_limit)
        lo = mpmath.mpf(0) if f(0) >= 0 else _bisect_root(f, mpmath.mpf(0), t_star, increasing=True)
        if f(t_max) >= 0:
            return IcInterval(v, _fraction(mpmath.exp(lo)), None, "bisect", unbounded=True)
        hi = _bisect_root(f, t_star, t_max, increasing=False)
        return IcInterval(v, _fraction(mpmath.exp(lo)), _fraction(mpmath.exp(hi)), "bisect")


# ПОСТРОЕНИЕ МИНКОВСКОГО
def _exp_le(lam: Exponent, bound: Fraction) -> bool:
    exact = _rational_exponent(lam)
    if exact is not None:
        return exact <= bound
    decided = _iv(lam) <= _iv(bound)
    if decided is None:
        raise Inconclusive("сравнение показателя не решено", lam=lam)
    return bool(decided)


def _d0(sys: ApproxSystem) -> int:
    """
    Наименьшее d_0 > 0 с d_0 t_p в Z_p^(n+1) для всех p
    """
    d0 = 1
    for p in sys.primes:
        v = sys.xi_p[p].valuation
        if v < 0:
            d0 *= p ** (-v * sys.n)
    return d0


def minkowski_construct(sys: ApproxSystem, X) -> Dict[str, object]:
    """
    Решётка u_0 = (d_0, ..., d_n), u_l = b e_l, проверка неравенства объёмов
    и поиск ненулевой точки решётки в выпуклом теле

    Перебор неполный: для каждого k0 = 0..k0_max берётся только ближайший хвост
    x_l = k0 d_l + m_l b (к x0 xi^l в конусе, к нулю в ящике), при k0 = 0 - векторы b e_l.
    Остальные точки решётки тела не просматриваются, поэтому SearchExhausted
    не доказывает, что тело пусто.
    """
    X = Fraction(X)
    n = sys.n
    if not _exp_le(sys.total_lambda(), Fraction(1, n)):
        raise PreconditionViolated("сумма показателей больше 1/n", total=sys.total_lambda())

    exps = {p: max(0, _precision_exponent(sys.c, X, sys.lam_p[p], p)) for p in sys.primes}
    b = math.prod(p ** k for p, k in exps.items())
    d0 = _d0(sys)
    d = [d0]
    for l in range(1, n + 1):
        moduli, residues = [], []
        for p, k in exps.items():
            if k:
                moduli.append(p ** k)
                residues.append((sys.xi_p[p] ** l * d0).residue(k))
        d.append(int(crt(moduli, residues)[0]) if moduli else 0)
    basis = [tuple(d)] + [tuple(b if j == l else 0 for j in range(n + 1)) for l in range(1, n + 1)]
    det = d0 * b ** n

    report: Dict[str, object] = {"X": X, "b": b, "n_p": exps, "d0": d0, "d": d, "basis": basis, "det": det}
    if is_minus_one(sys.lam_inf):
        report["case"] = "box"
        lhs = _iv(X) ** (n + 1)
        report["case2_condition"] = d0 * Fraction(sys.c) ** (-n) * math.prod(Fraction(p) ** n for p in sys.primes)
        k0_max = math.floor(X / d0)
    else:
        report["case"] = "cone"
        M = 2 * max(Fraction(1), (abs(sys.xi_inf) ** n).upper())
        report["M"] = M
        lhs = _iv(sys.c) ** n / _iv(M) * iv.exp((1 - n * _iv(sys.lam_inf)) * iv.ln(_iv(X)))
        k0_max = math.floor(X / (M * d0))
    ok = _iv(det) < lhs
    report["volume"] = _lower(lhs)
    report["rhs"] = det
    if ok is None:
        raise Inconclusive("неравенство объёмов не решено", det=det)
    if not ok:
        raise VolumeInequalityFails("объём тела не превосходит 2^(n+1) det: увеличьте c", det=det, volume=_upper(lhs))

    centers = [b_.center for b_ in sys.t_inf()]
    for k0 in range(0, k0_max + 1):
        if k0 == 0:
            candidates = [basis[l] for l in range(1, n + 1)]
        else:
            x0 = k0 * d[0]
            if report["case"] == "box":
                tail = [k0 * d[l] + nearest_int(Fraction(-k0 * d[l], b)) * b for l in range(1, n + 1)]
            else:
                tail = [
                    k0 * d[l] + nearest_int((x0 * centers[l] - k0 * d[l]) / b) * b
                    for l in range(1, n + 1)
                ]
            candidates = [(x0,) + tuple(tail)]
        for x in candidates:
            if _is_solution(sys, x, X):
                report["point"] = tuple(x)
                report["checks"] = check_solution(sys, x, X)
                logger.info("minkowski X=%s: точка %s при k0=%d", X, x, k0)
                return report
    raise SearchExhausted("в теле не найдено точки решётки, удовлетворяющей системе", X=X, det=det)


# ДВОЙСТВЕННОСТЬ
def lemma_dual_integers(sys: ApproxSystem, X) -> Dict[str, object]:
    """
    Целые a, b с a t_p в Z_p и b = prod p^(k_p + 1), p^k_p <= delta_p^-1 < p^(k_p + 1),
    delta_p = c X^-lambda_p
    """
    X = Fraction(X)
    a = _d0(sys)
    ks, deltas = {}, {}
    for p in sys.primes:
        lam = sys.lam_p[p]
        delta = power_bound(sys.c, X, lam)
        if (delta > 1) is True:
            raise PreconditionViolated(f"delta_{p} > 1", p=p)
        ks[p] = _largest_power(sys.c, X, lam, p)
        deltas[p] = delta
    b = math.prod(p ** (k + 1) for p, k in ks.items())
    product_bound = _iv(1)
    for p, delta in deltas.items():
        product_bound = product_bound * p / delta
    checks = {"b_inf": bool(_iv(b) <= product_bound)}
    for p, delta in deltas.items():
        checks[f"b_{p}"] = bool(_iv(padic_abs(b, p)) < delta)
    checks["a_integral"] = all(
        (sys.xi_p[p] ** l * a).is_integral() for p in sys.primes for l in range(1, sys.n + 1)
    )
    return {"a": a, "b": b, "k": ks, "checks": checks, "passed": all(checks.values())}


def _dual_candidates(sys: ApproxSystem, box: int, B1: Fraction, B2: Fraction, mod: int, res: List[int]) -> np.ndarray:
    """
    Предотбор в float64; допуск покрывает ошибку округления суммы, точная проверка в dual_points
    """
    n = sys.n
    axis = np.arange(-box, box + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    powers = np.array([float(b.center) for b in sys.t_inf()[1:]])
    s = grid.astype(np.float64) @ powers
    if mod > 1:
        r = np.zeros(len(grid), dtype=np.int64)
        for l in range(n):
            r = (r + (grid[:, l] % mod) * res[l] % mod) % mod
        r = (-r) % mod
        x0 = r + mod * np.rint((-s - r) / mod)
    else:
        x0 = np.rint(-s)
    resid = np.abs(x0 + s)
    spread = float(max(b.radius for b in sys.t_inf())) * box * n
    tol = 4 * (n + 1) * np.finfo(np.float64).eps * (float(B1) + box * float(np.abs(powers).sum()) + 1) + spread
    keep = (np.abs(x0) <= float(B1) + tol) & (resid <= float(B2) + tol)
    keep &= (grid != 0).any(axis=1) | (x0 != 0)
    return np.column_stack([x0[keep].astype(np.int64), grid[keep]])


def _dual_value(sys: ApproxSystem, x: Sequence[int]) -> RealBall:
    total = RealBall.exact(0, sys.xi_inf.bits)
    for coeff, power in zip(x, sys.t_inf()):
        total = total + power * coeff
    return total


def dual_points(
    sys: ApproxSystem,
    X,
    budget: Optional[int] = None,
    check_primal: bool = True,
) -> DualPoints:
    """
    n+1 независимых целых точек с ||x|| <= K X^lambda, |<x, t_inf>| <= K X^(lambda - lambda_inf - 1)
    и |<x, t_p>|_p <= c X^-lambda_p; K удваивается, пока точки не найдены
    """
    X = Fraction(X)
    n = sys.n
    budget = RELAX_BUDGET if budget is None else budget
    if check_primal:
        primal = enumerate_solutions(sys, X)
        if not primal.is_empty():
            raise HypothesisFails("исходная система имеет решение при этом X", X=X, point=primal.solutions[0])
    for p in sys.primes:
        if not sys.xi_p[p].is_integral():
            raise PreconditionViolated("xi_p вне Z_p: сначала denominator_clear", p=p)

    lam = sys.total_lambda()
    lam_dual = Golden.of(lam) - sys.lam_inf - 1
    base1 = power_bound(1, X, -Golden.of(lam))
    base2 = power_bound(1, X, -lam_dual)
    mod, res = _congruences(sys, X)
    if mod >= 2 ** 31:
        raise PreconditionViolated("модуль сравнений слишком велик для сетки int64", mod=mod)

    K = 1
    for _ in range(budget + 1):
        B1, B2 = K * _upper(base1), K * _upper(base2)
        box = math.floor(B1)
        if (2 * box + 1) ** n > MAX_DUAL_GRID:
            raise NotFound("сетка перебора двойственных точек превышает лимит", X=X, K=K)
        rows, seen = [], set()
        for x in _dual_candidates(sys, box, B1, B2, mod, res):
            x = canonical([int(c) for c in x])
            if x in seen:
                continue
            seen.add(x)
            try:
                ok = (
                    _le(max(abs(c) for c in x), K, X, -Golden.of(lam), "||x||")
                    and _le(abs(_dual_value(sys, x)), K, X, -lam_dual, "<x, t_inf>")
                    and all(
                        _le(_padic_value(sys, x, p).norm(), sys.c, X, sys.lam_p[p], f"<x, t_{p}>")
                        for p in sys.primes
                    )
                )
            except InsufficientPrecision:
                logger.debug("кандидат %s отброшен: сравнение не решено", x)
                continue
            if ok:
                gauge = max(max(abs(c) for c in x) / B1, abs(_dual_value(sys, x)).upper() / B2)
                rows.append((gauge, x))
        rows.sort(key=lambda r: (r[0], max(abs(c) for c in r[1]), r[1]))
        chosen, gauges = [], []
        for gauge, x in rows:
            if Matrix(chosen + [list(x)]).rank() == len(chosen) + 1:
                chosen.append(list(x))
                gauges.append(gauge)
            if len(chosen) == n + 1:
                break
        if len(chosen) == n + 1:
            det = int(Matrix(chosen).det())
            lemma = None
            if sys.primes:
                try:
                    lemma = lemma_dual_integers(sys, X)
                except PreconditionViolated:
                    lemma = None
            logger.info("dual X=%s: K=%d, det=%d", X, K, det)
            return DualPoints(X, tuple(tuple(x) for x in chosen), K, det, tuple(gauges), lemma)
        K *= 2
    raise NotFound("двойственные точки не найдены в пределах бюджета", X=X, K=K)


def _padic_value(sys: ApproxSystem, x: Sequence[int], p: int) -> PadicNumber:
    total = PadicNumber.zero(p, sys.xi_p[p].absolute_precision)
    for coeff, power in zip(x, sys.t_p(p)):
        total = total + power * coeff
    return total


def mahler_check(sys: ApproxSystem, X_values: Iterable, budget: Optional[int] = None) -> Dict[str, object]:
    """
    Слабая форма двойственности: если исходная система пуста при X,
    двойственные точки находятся в пределах бюджета
    """
    rows = []
    for X in X_values:
        primal = enumerate_solutions(sys, X)
        row = {"X": Fraction(X), "primal_empty": primal.is_empty(), "solutions": len(primal.solutions)}
        if primal.is_empty():
            try:
                dual = dual_points(sys, X, budget=budget, check_primal=False)
                row.update({"dual_found": True, "relax": dual.relax, "det": dual.det})
            except NotFound:
                row["dual_found"] = False
        rows.append(row)
    passed = all(r.get("dual_found", True) for r in rows)
    return {"rows": rows, "passed": passed}


# ПОСТРОЕНИЕ МНОГОЧЛЕНА
def default_rho(sys: ApproxSystem, R: Optional[IntPoly] = None) -> Dict[int, PadicNumber]:
    """
    rho_p = p^e с |rho_p|_p = ||t_p||_p^-1; лишний множитель p, если |rho_p|_p = |R'(xi_p)|_p
    """
    out = {}
    dR = R.derivative() if R is not None and R.degree > 0 else None
    for p in sys.primes:
        xi = sys.xi_p[p]
        e = int(valuation(sys.t_p(p).norm(), p))
        rho = Fraction(p) ** e
        if dR is not None:
            slope = dR(xi)
            if slope.is_zero_marker() and slope.norm() >= padic_abs(rho, p):
                raise InsufficientPrecision("|R'(xi_p)|_p не определён на данной точности", p=p)
            if not slope.is_zero_marker() and slope.norm() == padic_abs(rho, p):
                rho *= p
        out[p] = PadicNumber.from_rational(rho, p, xi.absolute_precision + e + 2)
    return out


def realized_constant(dual: DualPoints, sys: ApproxSystem) -> Fraction:
    """
    Наименьшее c_1, при котором все P_i укладываются в оценки c_1 X^...
    """
    X = dual.X
    lam = Golden.of(sys.total_lambda())
    best = Fraction(0)
    for x in dual.points:
        best = max(best, _upper(_iv(max(abs(c) for c in x)) / power_bound(1, X, -lam)))
        best = max(best, _upper(_iv(abs(_dual_value(sys, x))) / power_bound(1, X, -(lam - sys.lam_inf - 1))))
        for p in sys.primes:
            best = max(best, _upper(_iv(_padic_value(sys, x, p).norm()) / power_bound(1, X, sys.lam_p[p])))
    return best


def _rationalize(theta_inf: RealBall, theta_p: Mapping[int, PadicNumber], eps: Fraction, N: Fraction) -> Fraction:
    """
    r в Q с |r - theta_inf| <= N, |r - theta_p|_p <= eps, |r|_q <= 1 вне S
    """
    s = 1
    for p, t in theta_p.items():
        if not t.is_zero_marker() and t.valuation < 0:
            s *= p ** (-t.valuation)
    targets = {INF: (theta_inf * s, N * s)}
    for p, t in theta_p.items():
        targets[Place.prime(p)] = (t * s, eps * padic_abs(s, p))
    return strong_approx(targets) / s


def _largest_power(c, X, lam: Exponent, p: int) -> int:
    # p^k <= c^-1 X^lam < p^(k+1)
    k = _precision_exponent(c, X, lam, p)
    if _iv(Fraction(p) ** (-k)) < power_bound(c, X, lam):
        k -= 1
    return k


def build_polynomial(
    dual: DualPoints,
    eta: Mapping[Place, object],
    rho: Mapping[int, PadicNumber],
    sys: ApproxSystem,
    c1: Optional[Fraction] = None,
    eps: Optional[Fraction] = None,
) -> Dict[str, object]:
    """
    P = sum r_i P_i с |P(xi) + eta| ~ X^(lambda - lambda_inf - 1), |P'(xi)| ~ X^lambda,
    |P(xi_p) + eta_p|_p = |eps_p|_p, |P'(xi_p)|_p = |rho_p|_p
    """
    n, X = sys.n, dual.X
    S = sys.primes
    lam = Golden.of(sys.total_lambda())
    if (_iv(lam) <= 0) is not False:
        raise PreconditionViolated("нужна положительная сумма показателей", total=lam)
    lam_dual = lam - sys.lam_inf - 1

    A = Matrix([list(x) for x in dual.points]).T
    if A.det() == 0:
        raise LinearAlgebraSingular("многочлены P_i линейно зависимы", X=X)
    inv = A.inv()
    inv = [[Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(n + 1)] for i in range(n + 1)]

    realized = realized_constant(dual, sys)
    if c1 is None:
        c1 = realized
    elif Fraction(c1) < realized:
        raise PreconditionViolated("c1 меньше реализованной константы", c1=c1, realized=realized)
    c1 = Fraction(c1)
    t_norm = max(Fraction(1), (abs(sys.xi_inf) ** n).upper())
    c2 = c1 * n * t_norm

    for p in S:
        if not padic_abs(rho[p].representative(), p) <= 1 / sys.t_p(p).norm():
            raise PreconditionViolated("нужно |rho_p|_p <= ||t_p||_p^-1", p=p)
    if S and eps is None:
        eps = min(padic_abs(rho[p].representative(), p) / sys.t_p(p).norm() / p for p in S)

    xi = sys.xi_inf
    eta_inf = eta[INF]
    ks = {p: _largest_power(c1, X, sys.lam_p[p], p) for p in S}
    eps_p = {p: Fraction(p) ** ks[p] for p in S}

    for attempt in range(INTEGRALITY_RETRIES + 1):
        N = Fraction(math.prod(S)) / (eps ** len(S) if S else 1)
        scale = 2 * (n + 1) * N
        eps_inf = scale * c1 * _lower(power_bound(1, X, -lam_dual))
        rho_inf = scale * c2 * _lower(power_bound(1, X, -lam))
        r_inf = [-eta_inf + eps_inf - xi * rho_inf, RealBall.exact(rho_inf, xi.bits)]
        r_p = {}
        for p in S:
            xi_p = sys.xi_p[p]
            r_p[p] = [-eta[Place.prime(p)] + eps_p[p] - rho[p] * xi_p, rho[p]]

        coeffs_r = []
        for i in range(n + 1):
            theta_inf = r_inf[0] * inv[i][0] + r_inf[1] * inv[i][1]
            theta_p = {p: r_p[p][0] * inv[i][0] + r_p[p][1] * inv[i][1] for p in S}
            coeffs_r.append(_rationalize(theta_inf, theta_p, eps if S else Fraction(1), N))
        x = [sum(r * pt[m] for r, pt in zip(coeffs_r, dual.points)) for m in range(n + 1)]
        bad = [m for m, v in enumerate(x) if Fraction(v).denominator != 1]
        if not bad:
            break
        if not S or attempt == INTEGRALITY_RETRIES:
            raise IntegralityFails("коэффициенты P не целые", X=X, indices=bad, eps=eps)
        logger.info("build_polynomial: коэффициенты %s не целые, eps -> eps/2", bad)
        eps /= 2

    P = IntPoly(tuple(int(v) for v in x))
    value = abs(P(xi) + eta_inf)
    slope = abs(P.derivative()(xi))
    unit = (n + 1) * N
    checks = {
        "integral": True,
        "value_band": _band(value, unit * c1, X, -lam_dual),
        "derivative_band": _band(slope, unit * c2, X, -lam),
    }
    for p in S:
        vp = P(sys.xi_p[p]) + eta[Place.prime(p)]
        dp = P.derivative()(sys.xi_p[p])
        checks[f"value_{p}"] = (not vp.is_zero_marker()) and vp.norm() == padic_abs(eps_p[p], p)
        checks[f"derivative_{p}"] = (not dp.is_zero_marker()) and dp.norm() == padic_abs(rho[p].representative(), p)
    predicted = {"inf": float(lam_dual) / float(lam)}
    predicted.update({str(p): -exponent_float(sys.lam_p[p]) / float(lam) for p in S})
    return {
        "poly": P,
        "height": P.height(),
        "X": X,
        "c1": c1,
        "c2": c2,
        "N": N,
        "eps": eps,
        "eps_inf": eps_inf,
        "rho_inf": rho_inf,
        "eps_p": eps_p,
        "rho_p": {p: rho[p].representative() for p in S},
        "checks": checks,
        "predicted_exponents": predicted,
        "passed": all(v is not False for v in checks.values()),
    }


def _band(value: RealBall, unit: Fraction, X, lam: Exponent) -> Optional[bool]:
    """
    unit X^-lam <= value <= 3 unit X^-lam; None если не решено
    """
    bound = power_bound(unit, X, lam)
    lower = bound <= _iv(value)
    upper = _iv(value) <= 3 * bound
    if lower is None or upper is None:
        return None
    return bool(lower and upper)


# КОРНИ
def _sign(F: IntPoly, x: Fraction) -> int:
    v = F(x)
    return (v > 0) - (v < 0)


def extract_roots(F: IntPoly, sys: ApproxSystem, bits: Optional[int] = None) -> Dict[str, Dict[str, object]]:
    """
    Вещественный корень между xi и xi - 2F(xi)/F'(xi) бисекцией,
    p-адические корни подъёмом Гензеля
    """
    lam = float(Golden.of(sys.total_lambda()))
    if lam <= 0:
        raise PreconditionViolated("нужна положительная сумма показателей", total=lam)
    height = F.height()
    log_h = math.log(height) if height > 1 else None
    out: Dict[str, Dict[str, object]] = {}

    if not is_minus_one(sys.lam_inf):
        xi = sys.xi_inf
        bits = xi.bits if bits is None else bits
        f, df = F(xi), F.derivative()(xi)
        if df.contains_zero():
            raise InsufficientPrecision("F'(xi) неотделимо от нуля")
        beta = xi - f * 2 / df
        lo, hi = sorted((xi.center, beta.center))
        s_lo, s_hi = _sign(F, lo), _sign(F, hi)
        if s_lo == 0:
            hi = lo
        elif s_hi == 0:
            lo = hi
        elif s_lo == s_hi:
            raise NoSignChange("F не меняет знак между xi и xi - 2F/F': нужна большая высота", height=height)
        else:
            for _ in range(bits):
                mid = (lo + hi) / 2
                s_mid = _sign(F, mid)
                if s_mid == 0:
                    lo = hi = mid
                    break
                if s_mid == s_lo:
                    lo = mid
                else:
                    hi = mid
        alpha = RealBall.from_interval(lo, hi, bits)
        dist = abs(xi - alpha)
        observed = None
        if log_h and dist.lower() > 0:
            observed = math.log(float(dist.center)) / log_h
        out["inf"] = {
            "root": alpha,
            "distance": dist,
            "height": height,
            "predicted_exponent": -(exponent_float(sys.lam_inf) + 1) / lam,
            "observed_exponent": observed,
        }

    for p in sys.primes:
        star, xi_star, d = denominator_clear(F, sys.xi_p[p])
        alpha_star = hensel_lift(star, xi_star, xi_star.absolute_precision)
        cert = hensel_certificate(star, xi_star, alpha_star)
        alpha = alpha_star / d
        dist = cert["distance"] / padic_abs(d, p)
        observed = None
        if log_h and dist:
            observed = math.log(float(dist)) / log_h
        out[str(p)] = {
            "root": alpha,
            "distance": dist,
            "height": height,
            "integral": alpha.valuation >= 0,
            "certificate": cert,
            "predicted_exponent": -exponent_float(sys.lam_p[p]) / lam,
            "observed_exponent": observed,
        }
    return out


def approximation_pipeline(
    sys: ApproxSystem,
    R: IntPoly,
    X,
    c1: Optional[Fraction] = None,
    budget: Optional[int] = None,
    dual: Optional[DualPoints] = None,
) -> Dict[str, object]:
    """
    dual_points -> build_polynomial -> extract_roots для F = P + R
    """
    if dual is None:
        dual = dual_points(sys, X, budget=budget)
    eta = {INF: R(sys.xi_inf)}
    for p in sys.primes:
        value = R(sys.xi_p[p])
        if not value.is_integral():
            raise PreconditionViolated("R(xi_p) должно лежать в Z_p", p=p)
        eta[Place.prime(p)] = value
    poly = build_polynomial(dual, eta, default_rho(sys, R), sys, c1=c1)
    F = poly["poly"] + R
    roots = extract_roots(F, sys)
    return {"X": Fraction(X), "dual": dual, "polynomial": poly, "F": F, "roots": roots}


def approximation_series(
    sys: ApproxSystem,
    R: IntPoly,
    X_values: Iterable,
    c1: Optional[Fraction] = None,
    budget: Optional[int] = None,
) -> Dict[str, object]:
    """
    Конвейер на сетке X с общей константой c_1 (по умолчанию наибольшая реализованная)
    и подгонка показателя log|xi - alpha| против log H(alpha) по каждому месту
    """
    X_values = [Fraction(X) for X in X_values]
    if not X_values:
        raise PreconditionViolated("нужно хотя бы одно значение X")
    duals = [dual_points(sys, X, budget=budget) for X in X_values]
    realized = max(realized_constant(dual, sys) for dual in duals)
    if c1 is None:
        c1 = realized
    elif Fraction(c1) < realized:
        raise PreconditionViolated("c1 меньше реализованной константы", c1=c1, realized=realized)
    runs = [approximation_pipeline(sys, R, X, c1=c1, dual=dual) for X, dual in zip(X_values, duals)]

    fits: Dict[str, object] = {}
    places = runs[0]["roots"].keys()
    for place in places:
        xs, ys = [], []
        for run in runs:
            root = run["roots"][place]
            dist = root["distance"].center if place == "inf" else root["distance"]
            if root["height"] > 1 and dist > 0:
                xs.append(log_of_int(root["height"]))
                ys.append(log_of_fraction(Fraction(dist)))
        fit = loglog_slope(xs, ys)
        fit["predicted"] = runs[0]["roots"][place]["predicted_exponent"]
        fits[place] = fit
    logger.info("approximation_series: c1=%s, fits=%s", c1, fits)
    return {"c1": Fraction(c1), "runs": runs, "fits": fits}
