import logging
import math
import random
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Tuple, Union

import mpmath
import numpy as np
import sympy
from mpmath.libmp.libhyper import NoConvergence

from app.arith import frac_dist, nearest_int
from app.config import settings
from app.errors import InsufficientPrecision, NotConverged, PreconditionViolated
from app.fibonacci import extend_ea, limit_point
from app.fitting import linear_slope, log_of_fraction, log_of_int, loglog_slope
from app.models.approx import AccumulationPoint, ContinuedFraction, FracSeries
from app.models.ball import RealBall
from app.models.place import INF
from app.models.poly import IntPoly
from app.models.sequence import AbcTriple, EaSeq
from app.parallel import parallel_map

logger = logging.getLogger(__name__)

GOLDEN = (1 + math.sqrt(5)) / 2

# допуск сходимости и порог "убедительного" значения
CONVERGENCE_TOLERANCE = Fraction(1, 10 ** 6)
CONCLUSIVE_RATIO = Fraction(1, 1000)

# показатели ошибок в deg3 и deg4
FIT_TOLERANCE = 0.05
MIN_CONVERGENTS = 3
EXPECTED_EXPONENTS = {"i": -(GOLDEN ** 2), "ii": -(GOLDEN ** 2) - 1}


def _sgn(k: int) -> int:
    return 1 if k % 2 == 0 else -1


def _round_div(n: int, d: int) -> int:
    # ближайшее целое к n/d при d > 0
    return (2 * n + d) // (2 * d)


# ТОЧКА XI
def xi_ball(seq: EaSeq, index: Optional[int] = None) -> RealBall:
    """
    Шар для xi по члену x_index; точность берётся с запасом под X_index^2
    """
    K = seq.upto if index is None else index
    bits = 2 * seq.norm(K).bit_length() + 64
    return limit_point(seq, INF, bits=bits, index=K, strict=False).xi


# ДРОБНЫЕ ЧАСТИ {x_{k,0} R(xi)}
def _conclusive(value: RealBall) -> bool:
    return value.is_exact() or value.radius < CONCLUSIVE_RATIO * value.lower()


def frac_series(
    seq: EaSeq,
    R: IntPoly,
    k_range: Iterable[int],
    threads: Optional[int] = None,
    xi_index: Optional[int] = None,
) -> FracSeries:
    """
    {x_{k,0} R(xi)} для k из k_range. Если значения неубедительны,
    xi пересчитывается по следующему члену последовательности
    """
    if R.degree > 4:
        raise PreconditionViolated("степень R должна быть не больше 4", degree=R.degree)
    ks = list(k_range)
    if not ks:
        raise PreconditionViolated("пустой диапазон k")
    if min(ks) < 1 or max(ks) > seq.upto:
        raise PreconditionViolated(f"k вне 1..{seq.upto}", k_range=[min(ks), max(ks)])

    K = xi_index if xi_index is not None else min(seq.upto, max(ks) + 2)
    while True:
        rx = R(xi_ball(seq, K))

        def row(k: int) -> Tuple[int, RealBall]:
            try:
                return k, frac_dist(seq.term(k).x0 * rx)
            except InsufficientPrecision as exc:
                raise InsufficientPrecision(f"{exc.detail} при k={k}", index=k, xi_index=K) from exc

        rows = parallel_map(row, ks, threads)
        bad = tuple(k for k, v in rows if not _conclusive(v))
        if not bad or K >= seq.upto:
            break
        logger.info("frac_series: %d неубедительных значений, xi берётся по x_%d", len(bad), K + 1)
        K += 1
    if bad:
        logger.warning("frac_series: неубедительные k=%s", list(bad))
    return FracSeries(R, tuple(rows), bad, K)


def class_difference_bounds(series: FracSeries, seq: EaSeq) -> Dict:
    """
    C_k = |{x_{k+P,0}R} - {x_{k,0}R}| X_k / H(R), P = 3 или 6
    """
    P = series.period
    H = series.poly.height()
    values = series.conclusive()
    rows = []
    if H:
        for k in sorted(values):
            if k + P not in values:
                continue
            diff = abs(values[k + P] - values[k])
            rows.append({"k": k, "constant": float(diff.upper() * seq.norm(k) / H)})
    constants = [r["constant"] for r in rows]
    positive = [(log_of_int(seq.norm(r["k"])), math.log(r["constant"])) for r in rows if r["constant"] > 0]
    fit = loglog_slope([x for x, _ in positive], [y for _, y in positive])
    return {
        "period": P,
        "height": H,
        "rows": rows,
        "max": max(constants) if constants else None,
        "min": min(constants) if constants else None,
        "slope": fit["slope"],
    }


# ТОЧКИ НАКОПЛЕНИЯ
def _decay_rate(balls: List[RealBall]) -> Optional[float]:
    diffs = [abs(balls[j + 1].center - balls[j].center) for j in range(len(balls) - 1)]
    ratios = []
    for d0, d1 in zip(diffs, diffs[1:]):
        if 0 < d0 < 1 and 0 < d1 < 1:
            ratios.append(log_of_fraction(d1) / log_of_fraction(d0))
    return float(np.median(ratios)) if ratios else None


def accumulation_points(series: FracSeries, safety: Optional[int] = None) -> List[AccumulationPoint]:
    """
    Предел по каждому классу вычетов k mod P. Оболочка члена: значение
    плюс safety * |разность с предыдущим членом класса|
    """
    safety = settings.safety_factor if safety is None else safety
    P = series.period
    values = series.conclusive()
    classes: Dict[int, List[int]] = {}
    for k in sorted(values):
        classes.setdefault(k % P, []).append(k)

    points, failed = [], []
    for l in sorted(classes):
        ks = classes[l]
        balls = [values[k] for k in ks]
        if len(balls) < 2:
            failed.append(l)
            continue
        enclosures = [
            balls[j].widen(safety * abs(balls[j] - balls[j - 1]).upper()) for j in range(1, len(balls))
        ]
        last = enclosures[-1]
        previous = enclosures[-2] if len(enclosures) > 1 else balls[-2]
        tolerance = CONVERGENCE_TOLERANCE * max(Fraction(1), abs(last.center))
        converged = last.overlaps(previous) and last.radius < tolerance
        if not converged:
            failed.append(l)
        points.append(AccumulationPoint(l, P, last, tuple(ks), _decay_rate(balls), converged))

    if failed:
        raise NotConverged(f"классы {failed} не сошлись", classes=failed, period=P)
    return points


def beta_zero_check(beta: Union[RealBall, Fraction, int], other: Union[RealBall, Fraction, int]) -> Optional[bool]:
    """
    |{b} - {b'}| <= min({b + b'}, {b - b'}); None если шары не решают сравнение
    """
    if not isinstance(beta, RealBall) and not isinstance(other, RealBall):
        b, c = Fraction(beta), Fraction(other)
        return abs(frac_dist(b) - frac_dist(c)) <= min(frac_dist(b + c), frac_dist(b - c))
    try:
        lhs = abs(frac_dist(beta) - frac_dist(other))
        s, d = frac_dist(beta + other), frac_dist(beta - other)
    except InsufficientPrecision:
        return None
    rhs_lower = min(s.lower(), d.lower())
    rhs_upper = min(s.upper(), d.upper())
    if lhs.upper() <= rhs_lower:
        return True
    if lhs.lower() > rhs_upper:
        return False
    return None


# ЦЕПНЫЕ ДРОБИ
def cf_expand(
    alpha: Union[RealBall, Fraction, int],
    count: int,
    max_denominator: Optional[int] = None,
) -> ContinuedFraction:
    """
    Неполные частные, подтверждённые совпадением целых частей на обоих
    концах шара. Для точного числа обычный алгоритм Евклида
    """
    if isinstance(alpha, RealBall) and alpha.is_exact():
        alpha = alpha.center
    if not isinstance(alpha, RealBall):
        q = Fraction(alpha)
        ends = [(q.numerator, q.denominator)]
    else:
        lo, hi = alpha.lower(), alpha.upper()
        ends = [(lo.numerator, lo.denominator), (hi.numerator, hi.denominator)]

    quotients: List[int] = []
    q_prev, q_cur = 0, 1
    finite = False
    for m in range(count):
        floors = {n // d for n, d in ends}
        if len(floors) != 1:
            raise InsufficientPrecision(f"неполное частное {m} не подтверждено", index=m)
        a = floors.pop()
        quotients.append(a)
        if m > 0:
            q_prev, q_cur = q_cur, a * q_cur + q_prev
        if max_denominator is not None and q_cur > max_denominator:
            break
        rests = [(d, n - a * d) for n, d in ends]
        if any(r == 0 for _, r in rests):
            if len(ends) == 1:
                finite = True
                break
            if m + 1 < count and max_denominator is None:
                raise InsufficientPrecision(f"неполное частное {m + 1} не подтверждено", index=m + 1)
            break
        ends = rests
    return ContinuedFraction.from_quotients(quotients, finite)


def cf_bounds_check(alpha: Union[RealBall, Fraction], cf: ContinuedFraction) -> List[Optional[bool]]:
    """
    1/(q_m (q_{m+1} + q_m)) < |alpha - p_m/q_m| < 1/(q_m q_{m+1}) для m, у которых
    известны два следующих частных
    """
    out = []
    conv = cf.convergents
    for m in range(len(conv) - 2):
        p, q = conv[m]
        q_next = conv[m + 1][1]
        lo_bound = Fraction(1, q * (q_next + q))
        hi_bound = Fraction(1, q * q_next)
        if isinstance(alpha, RealBall):
            err = abs(alpha - Fraction(p, q))
            if err.lower() > lo_bound and err.upper() < hi_bound:
                out.append(True)
            elif err.upper() <= lo_bound or err.lower() >= hi_bound:
                out.append(False)
            else:
                out.append(None)
        else:
            err = abs(Fraction(alpha) - Fraction(p, q))
            out.append(lo_bound < err < hi_bound)
    return out


def is_convergent(alpha: RealBall, value: Fraction) -> Tuple[Optional[bool], str]:
    """
    Является ли value подходящей дробью alpha: сначала по разложению,
    при нехватке точности по признаку Лежандра |alpha - p/q| < 1/(2q^2)
    """
    value = Fraction(value)
    q = value.denominator
    try:
        cf = cf_expand(alpha, 2 * q.bit_length() + 8, max_denominator=q)
        if (value.numerator, q) in cf.convergents:
            return True, "expansion"
        if cf.denominators and cf.denominators[-1] > q:
            return False, "expansion"
    except InsufficientPrecision:
        pass
    err = abs(alpha - value)
    if err.upper() < Fraction(1, 2 * q * q):
        return True, "legendre"
    return None, "undecided"


# КОНСТРУКЦИИ ДЛЯ СТЕПЕНЕЙ 3 И 4
def _a(seq: EaSeq, k: int) -> int:
    x, y, z = seq.term(k), seq.term(k + 1), seq.term(k + 2)
    return x.x1 * z.x2 - seq.eps(k) * _sgn(k) * y.x2


def _e(seq: EaSeq, k: int) -> int:
    x = [seq.term(k + i) for i in range(5)]
    inner = seq.a * x[1].x0 * x[3].x2 + seq.eps(k + 1) * x[2].x2
    return x[0].x1 * x[4].x2 - seq.eps(k) * _sgn(k) * inner


def _t(seq: EaSeq, k: int) -> int:
    return seq.term(k).x1 * seq.term(k + 1).x2 + _sgn(k) * seq.term(k + 2).x2


def _c4(seq: EaSeq, k: int) -> int:
    x_prev, x, y, z = seq.term(k - 1), seq.term(k), seq.term(k + 1), seq.term(k + 2)
    eps = seq.eps(k)
    return x_prev.x0 * (x.x2 * z.x2 - eps * seq.a * y.x2) - 2 * eps * _sgn(k) * _a(seq, k - 1)


def _g4(seq: EaSeq, k: int) -> int:
    x = [seq.term(k + i) for i in range(5)]
    a = seq.a
    inner = a * x[1].x0 * x[3].x2 + 2 * _sgn(k) * x[1].x1 * x[3].x2 + seq.eps(k + 1) * x[2].x2
    return x[0].x2 * x[4].x2 - seq.eps(k) * a * inner


def _n4(seq: EaSeq, k: int) -> int:
    return seq.term(k).x0 * _g4(seq, k) - 2 * _sgn(k) * seq.eps(k + 2) * _a(seq, k)


def _deg3_identities(seq: EaSeq, k: int, case: str) -> Dict[str, bool]:
    x0 = seq.term(k).x0
    if case == "i":
        nxt = AbcTriple.of(seq, k + 1)
        z = seq.term(k + 2)
        s = seq.eps(k + 1) * _sgn(k + 1)
        return {
            "A_minors": _a(seq, k) == s * (nxt.b * z.x2 + nxt.c * z.x1),
            "a_next": nxt.a == seq.eps(k + 1) * _sgn(k) * x0,
            "gcd_x0_A": 2 % math.gcd(x0, _a(seq, k)) == 0,
        }
    return {"E_congruence": (_e(seq, k) + seq.eps(k + 2) * _t(seq, k)) % x0 == 0}


def _reference(series: FracSeries, seq: EaSeq, l: int, safety: int) -> Tuple[Optional[int], Optional[RealBall]]:
    """
    Старший подтверждённый член класса l, расширенный на хвост C H(R) / X_K
    """
    P = series.period
    values = series.conclusive()
    members = sorted(k for k in values if k % P == l % P)
    if not members:
        return None, None
    K = members[-1]
    bounds = class_difference_bounds(series, seq)
    C = Fraction(bounds["max"]) if bounds["max"] else Fraction(1)
    H = max(series.poly.height(), 1)
    tail = safety * C * H / seq.norm(K)
    return K, values[K].widen(tail)


def _approximation_rows(seq, series, l, k_range, cases, safety):
    K_ref, ref = _reference(series, seq, l, safety)
    if ref is None:
        raise NotConverged(f"нет подтверждённых членов класса {l}", l=l)
    rows = []
    for k in k_range:
        case = cases(k)
        if case is None:
            continue
        name, needs_lo, needs_hi, build = case
        if k + needs_lo < 1 or k + needs_hi > seq.upto:
            continue
        numerator, denominator, checks = build(k)
        residue = numerator - _round_div(numerator, denominator) * denominator
        approx = Fraction(abs(residue), denominator)
        row = {
            "k": k,
            "case": name,
            "numerator": residue,
            "denominator": denominator,
            "identities": checks,
            "nonzero": residue != 0,
            "usable": K_ref is not None and K_ref >= k + 3,
        }
        if row["usable"]:
            err = abs(ref - approx)
            log_x = log_of_int(seq.norm(k))
            row["error"] = float(err.center)
            if err.center > 0:
                row["log_error"] = log_of_fraction(err.center)
                row["exponent"] = row["log_error"] / log_x
            member, method = is_convergent(ref, approx) if residue else (False, "zero")
            row["convergent"] = member
            row["convergent_method"] = method
        rows.append(row)
    return K_ref, ref, rows


def _fit_cases(seq, rows) -> Dict[str, Dict]:
    fits = {}
    for name in sorted({r["case"] for r in rows}):
        pts = [r for r in rows if r["case"] == name and r.get("log_error") is not None]
        xs = [log_of_int(seq.norm(r["k"])) for r in pts]
        ys = [r["log_error"] for r in pts]
        fits[name] = loglog_slope(xs, ys)
    return fits


def _fits_match(fits: Dict[str, Dict], expected: Dict[str, float]) -> Dict[str, bool]:
    """
    |наклон - ожидаемый показатель| <= FIT_TOLERANCE по каждому классу
    """
    out = {}
    for name, target in expected.items():
        slope = fits.get(name, {}).get("slope")
        out[name] = slope is not None and abs(slope - target) <= FIT_TOLERANCE
    return out


def verify_deg3_convergents(
    seq: EaSeq,
    R: IntPoly,
    l: int,
    k_range: Iterable[int],
    series: Optional[FracSeries] = None,
    safety: Optional[int] = None,
) -> Dict:
    """
    Для k = l+1 mod 3 строится y = g A_k - B_k x_{k,0}, для k = l+2 mod 3
    строится z = g E_k - F_k x_{k,0}; сравнение с delta_l(R) и цепной дробью
    """
    if R.degree != 3:
        raise PreconditionViolated("нужен многочлен степени 3", degree=R.degree)
    safety = settings.safety_factor if safety is None else safety
    g = R.coeff(3)
    series = series or frac_series(seq, R, range(3, seq.upto + 1))

    def case_i(k):
        return g * _a(seq, k), seq.term(k).x0, _deg3_identities(seq, k, "i")

    def case_ii(k):
        return g * _e(seq, k), seq.term(k).x0, _deg3_identities(seq, k, "ii")

    def cases(k):
        if (k - l) % 3 == 1:
            return "i", 0, 2, case_i
        if (k - l) % 3 == 2:
            return "ii", 0, 4, case_ii
        return None

    K_ref, ref, rows = _approximation_rows(seq, series, l, k_range, cases, safety)
    for r in rows:
        r["gcd_divides_2g"] = (2 * g) % math.gcd(r["numerator"], r["denominator"]) == 0
    identities_ok = all(all(r["identities"].values()) for r in rows)
    gcd_ok = all(r["gcd_divides_2g"] for r in rows)
    fits = _fit_cases(seq, rows)
    fit_ok = _fits_match(fits, EXPECTED_EXPONENTS)
    convergents = sum(1 for r in rows if r.get("convergent"))
    return {
        "check": "deg3",
        "poly": str(R),
        "l": l,
        "reference_index": K_ref,
        "reference": ref.decimal(30),
        "rows": rows,
        "fits": fits,
        "expected_exponents": dict(EXPECTED_EXPONENTS),
        "fit_ok": fit_ok,
        "convergents": convergents,
        "passed": identities_ok and gcd_ok and all(fit_ok.values()) and convergents >= MIN_CONVERGENTS,
    }


def verify_deg4_accumulation(
    seq: EaSeq,
    R: IntPoly,
    l: int,
    k_range: Iterable[int],
    series: Optional[FracSeries] = None,
    safety: Optional[int] = None,
) -> Dict:
    """
    k = l+4 mod 6: y / (x_{k-1,0} x_{k,0}) из C_k и A_k;
    k = l+2 mod 6: z / x_{k,0}^2 из N_k и E_k
    """
    if R.degree != 4:
        raise PreconditionViolated("нужен многочлен степени 4 (f != 0)", degree=R.degree)
    safety = settings.safety_factor if safety is None else safety
    f, g = R.coeff(4), R.coeff(3)
    series = series or frac_series(seq, R, range(3, seq.upto + 1))

    def case_i(k):
        x_prev, x = seq.term(k - 1).x0, seq.term(k).x0
        return f * _c4(seq, k) + g * x_prev * _a(seq, k), x_prev * x, {}

    def case_ii(k):
        x0 = seq.term(k).x0
        return f * _n4(seq, k) + g * x0 * _e(seq, k), x0 * x0, {}

    def cases(k):
        if (k - l) % 6 == 4:
            return "i", -1, 2, case_i
        if (k - l) % 6 == 2:
            return "ii", 0, 4, case_ii
        return None

    K_ref, ref, rows = _approximation_rows(seq, series, l, k_range, cases, safety)
    nonzero = all(r["nonzero"] for r in rows)
    fits = _fit_cases(seq, rows)
    fit_ok = _fits_match(fits, EXPECTED_EXPONENTS)
    return {
        "check": "deg4",
        "poly": str(R),
        "l": l,
        "reference_index": K_ref,
        "reference": ref.decimal(30),
        "rows": rows,
        "fits": fits,
        "expected_exponents": dict(EXPECTED_EXPONENTS),
        "fit_ok": fit_ok,
        "nonzero_numerators": nonzero,
        "passed": nonzero and all(fit_ok.values()),
    }


# НИЖНИЕ ОЦЕНКИ
def _poly_parts(R: IntPoly) -> Tuple[int, int, int, int, int]:
    return R.coeff(4), R.coeff(3), R.coeff(2), R.coeff(1), R.coeff(0)


def alt1_lower_bound(seq: EaSeq, R: IntPoly, k_range: Iterable[int], series: Optional[FracSeries] = None) -> Dict:
    """
    Целый свидетель N_k = a_k^2 round(x_{k+1,0} R(xi)) + B_k x_{k+1,2} + C_k x_{k+1,1} + D_k x_{k+1,0}
    и полоса {x_{k,0} R(xi)} X_k^(2/gamma^2)
    """
    if R.degree not in (3, 4):
        raise PreconditionViolated("нужен многочлен степени 3 или 4", degree=R.degree)
    ks = [k for k in k_range if k + 1 <= seq.upto]
    series = series or frac_series(seq, R, ks)
    values = series.conclusive()
    rx = R(xi_ball(seq, series.xi_index))
    p, q, r, s, t = _poly_parts(R)

    rows = []
    for k in ks:
        abc = AbcTriple.of(seq, k)
        a, b, c = abc.a, abc.b, abc.c
        B = p * a * c + (q * a - p * b) * b - r * a * a
        C = (q * a - p * b) * c - s * a * a
        D = -t * a * a
        lhs = IntPoly((0, q * a - p * b, p * a)) * IntPoly((c, b, a))
        rhs = R * (a * a) + IntPoly((D, C, B))
        nxt = seq.term(k + 1)
        try:
            rounded = (nxt.x0 * rx).nearest_int()
        except InsufficientPrecision as exc:
            raise InsufficientPrecision(f"{exc.detail} при k={k + 1}", index=k + 1) from exc
        witness = a * a * rounded + B * nxt.x2 + C * nxt.x1 + D * nxt.x0
        row = {"k": k, "a": a, "b": b, "c": c, "B": B, "C": C, "D": D, "N": witness,
               "identity": lhs == rhs, "nonzero": witness != 0}
        if k in values and values[k].lower() > 0:
            row["log_band"] = log_of_fraction(values[k].lower()) + 2 / GOLDEN ** 2 * log_of_int(seq.norm(k))
        rows.append(row)

    bands = [row["log_band"] for row in rows if "log_band" in row]
    # с какого k все свидетели ненулевые
    nonzero_from = None
    for row in reversed(rows):
        if not row["nonzero"]:
            break
        nonzero_from = row["k"]
    return {
        "check": "alt1",
        "poly": str(R),
        "rows": rows,
        "identities_ok": all(row["identity"] for row in rows),
        "nonzero_from": nonzero_from,
        "log_band_min": min(bands) if bands else None,
        "band_min": math.exp(min(bands)) if bands and min(bands) < 700 else None,
        "passed": all(row["identity"] for row in rows) and bool(bands),
    }


def _decade(h: int) -> int:
    return len(str(h)) - 1


def _best_constants(xi: RealBall, xi2: RealBall, rx: RealBall, p2: int, p1: int, lo: int, cap: int):
    """
    Лучший p0 для пары (p2, p1): |R(xi) + P(xi)| H(P)^gamma при lo <= H(P) <= cap
    """
    v = rx + p2 * xi2 + p1 * xi
    h12 = max(abs(p2), abs(p1))
    n = nearest_int(-v.center)
    candidates = {max(-h12, min(h12, n))}
    if abs(n) <= cap:
        candidates.add(n)
    if h12 == 0:
        candidates |= {n - 1, n + 1}
    best = None
    for p0 in candidates:
        H = max(h12, abs(p0))
        if H == 0 or H < lo or H > cap:
            continue
        val = abs(v + p0)
        score = float(val.center) * H ** GOLDEN
        if best is None or score < best[0]:
            best = (score, [p2, p1, p0], H, val.contains_zero())
    return best


def alt0_scan(
    seq: EaSeq,
    R: IntPoly,
    max_height: int = 50,
    decades_to: int = 4,
    samples: int = 1000,
    seed: Optional[int] = None,
    bits: int = 128,
    grid_height: int = 2,
    threads: Optional[int] = None,
) -> Dict:
    """
    Минимумы |R(xi) + P(xi)| H(P)^gamma по декадам высоты: полный перебор
    при H(P) <= max_height, затем samples случайных P на декаду до 10^decades_to
    """
    if R.degree not in (3, 4):
        raise PreconditionViolated("нужен многочлен степени 3 или 4", degree=R.degree)
    rng = random.Random(settings.seed if seed is None else seed)
    xi = xi_ball(seq).with_bits(bits)
    xi2 = xi * xi
    rx = R(xi)

    minima: Dict[int, Tuple] = {}

    def keep(found):
        if found is None:
            return
        d = _decade(found[2])
        if d not in minima or found[0] < minima[d][0]:
            minima[d] = found

    def scan_row(p2: int):
        return [_best_constants(xi, xi2, rx, p2, p1, 1, max_height) for p1 in range(-max_height, max_height + 1)]

    for chunk in parallel_map(scan_row, range(-max_height, max_height + 1), threads):
        for found in chunk:
            keep(found)

    for d in range(_decade(max_height) + 1, decades_to):
        lo, cap = 10 ** d, 10 ** (d + 1) - 1
        drawn = 0
        while drawn < samples:
            p2, p1 = rng.randint(-cap, cap), rng.randint(-cap, cap)
            if max(abs(p2), abs(p1)) < lo:
                continue
            drawn += 1
            keep(_best_constants(xi, xi2, rx, p2, p1, lo, cap))

    decades = sorted(minima)
    rows = [
        {"decade": d, "min": minima[d][0], "poly": minima[d][1], "height": minima[d][2],
         "contains_zero": minima[d][3]}
        for d in decades
    ]
    slope = linear_slope(decades, [math.log10(minima[d][0]) for d in decades]) if all(
        minima[d][0] > 0 for d in decades) else None

    grid = r_height_grid(xi, grid_height)
    theta = theta_band(seq, R)
    return {
        "check": "alt0",
        "poly": str(R),
        "decades": rows,
        "slope": slope,
        "stable": slope is not None and slope >= -0.05,
        "positive": all(r["min"] > 0 and not r["contains_zero"] for r in rows),
        "r_grid": grid,
        "theta": theta,
    }


def r_height_grid(xi: RealBall, height: int = 2, degrees: Tuple[int, ...] = (3, 4)) -> Dict:
    """
    |R(xi)| H(R)^(1 + gamma^5) по всем R степени 3 и 4 с H(R) <= height
    """
    exponent = 1 + GOLDEN ** 5
    best, undecided, count = None, 0, 0
    span = range(-height, height + 1)
    for deg in degrees:
        for lead in range(1, height + 1):
            for rest in product(span, repeat=deg):
                R = IntPoly(tuple(reversed((lead,) + rest)))
                value = abs(R(xi))
                count += 1
                if value.contains_zero():
                    undecided += 1
                    continue
                score = float(value.lower()) * R.height() ** exponent
                if best is None or score < best[0]:
                    best = (score, R.high_first())
    return {
        "count": count,
        "undecided": undecided,
        "min": best[0] if best else None,
        "argmin": best[1] if best else None,
        "positive": best is not None and best[0] > 0 and undecided == 0,
    }


def theta_band(seq: EaSeq, R: IntPoly) -> Dict:
    """
    Нижняя граница liminf {x_{k,0} R(xi)} по последним двум периодам
    """
    P = 6 if R.degree == 4 else 3
    start = max(3, seq.upto - 2 * P + 1)
    series = frac_series(seq, R, range(start, seq.upto + 1))
    late = [v.lower() for k, v in series.values if k > seq.upto - P and k not in series.inconclusive]
    lower = min(late) if late else None
    return {"from_k": seq.upto - P + 1, "lower": float(lower) if lower is not None else None,
            "positive": lower is not None and lower > 0}


def algebraic_distance_scan(seq: EaSeq, R: IntPoly, polys: Iterable[Iterable[int]], digits: int = 60) -> Dict:
    """
    |xi - alpha| H(alpha)^(5 gamma^2) для вещественных корней alpha
    неприводимых множителей R + P
    """
    exponent = 5 * GOLDEN ** 2
    xi = xi_ball(seq)
    T = sympy.Symbol("T")
    rows = []
    with mpmath.workdps(digits):
        xi_mp = xi.to_mpf()
        for coeffs in polys:
            F = R + IntPoly.from_high(list(coeffs))
            if F.degree < 1:
                continue
            _, factors = sympy.Poly(F.high_first(), T).factor_list()
            for factor, _ in factors:
                G = [int(c) for c in factor.all_coeffs()]
                try:
                    roots = mpmath.polyroots(G, maxsteps=200, extraprec=4 * digits)
                except NoConvergence:
                    logger.warning("корни %s не найдены", G)
                    continue
                real = [mpmath.re(z) for z in roots if abs(mpmath.im(z)) < mpmath.mpf(10) ** (-digits // 2)]
                if not real:
                    continue
                alpha = min(real, key=lambda z: abs(z - xi_mp))
                height = max(abs(c) for c in G)
                dist = abs(xi_mp - alpha)
                rows.append({
                    "poly": G,
                    "degree": len(G) - 1,
                    "alpha": mpmath.nstr(alpha, 20),
                    "distance": mpmath.nstr(dist, 10),
                    "constant": float(dist * mpmath.mpf(height) ** exponent),
                })
    constants = [r["constant"] for r in rows]
    return {
        "check": "algebraic_distance",
        "rows": rows,
        "min": min(constants) if constants else None,
        "positive": bool(constants) and min(constants) > 0,
    }


# КАНДИДАТЫ В W2
def w2_candidate_check(seq: EaSeq, k_range: Iterable[int], band_width: float = 2.0) -> Dict:
    """
    Q_k(T) = x_{k,0} T^2 - 2 x_{k,1} T + x_{k,2}: полоса |Q_k(xi)| H(Q_k)^(gamma^3)
    и рост высот. Проверка рекомендательная; xi берётся по члену x_{K+2}, K = max(k_range)
    """
    k_range = list(k_range)
    if not k_range:
        raise PreconditionViolated("пустой диапазон индексов")
    xi = xi_ball(extend_ea(seq, max(k_range) + 2))
    rows = []
    for k in k_range:
        x = seq.term(k)
        Q = IntPoly((x.x2, -2 * x.x1, x.x0))
        H = max(abs(x.x0), 2 * abs(x.x1), abs(x.x2))
        value = abs(Q(xi))
        if value.lower() <= 0:
            rows.append({"k": k, "log10_height": log_of_int(H) / math.log(10), "undecided": True})
            continue
        log_q = log_of_fraction(value.lower())
        rows.append({
            "k": k,
            "log10_height": log_of_int(H) / math.log(10),
            "log10_value": log_q / math.log(10),
            "log10_band": (log_q + GOLDEN ** 3 * log_of_int(H)) / math.log(10),
            "log_X": log_of_int(seq.norm(k)),
            "undecided": False,
        })
    decided = [r for r in rows if not r["undecided"]]
    growth = [
        b["log10_height"] / a["log10_height"]
        for a, b in zip(rows, rows[1:])
        if a["log10_height"] > 0
    ]
    fit = loglog_slope([r["log_X"] for r in decided], [r["log10_value"] * math.log(10) for r in decided])
    bands = [r["log10_band"] for r in decided]
    bounded = bool(bands) and max(bands) - min(bands) <= band_width
    growth_ok = bool(growth) and max(growth) <= GOLDEN + 0.05
    return {
        "check": "w2_candidate",
        "advisory": True,
        "rows": rows,
        "height_growth": growth,
        "decay_exponent": fit["slope"],
        "band_bounded": bounded,
        "growth_ok": growth_ok,
        "passed": bounded and growth_ok,
    }
