import logging
import math
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from app.arith import det3, sup_norm
from app.config import settings
from app.errors import (
    AdmissibilityViolation, FirstCoordinateZero, InsufficientTail, NoSeedFound,
    PreconditionViolated, SeedInvalid, VerificationFailed,
)
from app.fitting import log_of_fraction, log_of_int
from app.models.ball import RealBall
from app.models.lattice import J, Mat2, Point3
from app.models.padic import PadicNumber, padic_abs, valuation
from app.models.place import INF, Place
from app.models.sequence import AbcTriple, DeltaSeries, EaSeq, FibSeq, LimitPoint, ea_step_matrix
from app.parallel import parallel_map
from app.presets import pinned_ea_seed

logger = logging.getLogger(__name__)

GOLDEN = (1 + math.sqrt(5)) / 2


# ПРЕСЕТЫ ФИБОНАЧЧИ
def real_example(a: int = 2, b: int = 1, c: int = 2) -> FibSeq:
    """
    Вещественная конструкция: a >= 2, c > b >= 1
    """
    if a < 2 or not c > b >= 1:
        raise PreconditionViolated("нужно a >= 2 и c > b >= 1", a=a, b=b, c=c)
    w0 = Mat2(1, b, a, a * (b + 1))
    w1 = Mat2(1, c, a, a * (c + 1))
    N = Mat2(-1 + a * (b + 1) * (c + 1), -a * (b + 1), -a * (c + 1), a)
    return FibSeq((w0, w1), N, name="real_example", params={"a": a, "b": b, "c": c})


def padic_example(p: int = 2, m: int = 2) -> FibSeq:
    """
    p-адическая конструкция с w_0 = [[1, p], [p, 0]], w_1 = [[1, p^m], [-p^m, 0]]
    """
    Place.prime(p)
    if m < 1:
        raise PreconditionViolated("нужно m >= 1", m=m)
    pm = p ** m
    w0 = Mat2(1, p, p, 0)
    w1 = Mat2(1, pm, -pm, 0)
    N = Mat2(
        p * (p * pm + pm * pm),
        -p * (p + pm - 2 * p * pm * pm),
        -p * pm - 2 * p * p * pm * pm - pm * pm,
        p + p * p * pm + pm - p * pm * pm,
    )
    return FibSeq((w0, w1), N, name="padic_example", params={"p": p, "m": m}, prime=p)


def padic_example_det3(p: int, m: int) -> int:
    """
    Замкнутая формула для det(y_0, y_1, y_2) p-адического пресета
    """
    return (
        p ** (8 * m + 4) * (16 * p ** 4 + 8 * p ** 2 + 1)
        - 2 * p ** (6 * m + 6) * (4 * p ** 2 + 1)
        + p ** (4 * m + 8)
    )


def extend_fib(seq: FibSeq, upto: int) -> FibSeq:
    """
    Продолжает w и y до индекса upto с точной проверкой симметрии y_i
    """
    if len(seq.w) < 2:
        raise PreconditionViolated("нужны две начальные матрицы")
    w = list(seq.w)
    while len(w) <= upto:
        w.append(w[-1] * w[-2])
    ys = []
    for i, wi in enumerate(w):
        yi = wi * seq.n_i(i)
        if not yi.is_symmetric():
            raise AdmissibilityViolation(f"y_{i} не симметрична", i=i, y=yi.rows())
        ys.append(yi.to_point())
    for i in range(1, len(w) - 1):
        if w[i + 1].det() != w[i].det() * w[i - 1].det():
            raise VerificationFailed(f"det(w_{i + 1}) != det(w_{i}) det(w_{i - 1})", i=i)
    logger.info("%s: построено до i=%d", seq.name, upto)
    return FibSeq(tuple(w), seq.N, tuple(ys), seq.name, dict(seq.params), seq.prime)


# ПОСЛЕДОВАТЕЛЬНОСТЬ E_a
def _seed_ok(a: int, x1: Point3, x2: Point3, depth: int = 8) -> bool:
    if abs(x1.det()) != 1 or abs(x2.det()) != 1:
        return False
    try:
        xs = list(extend_ea(EaSeq(a, (x1, x2)), depth).x)
    except SeedInvalid:
        return False
    for k in range(len(xs) - 2):
        if abs(det3(xs[k], xs[k + 1], xs[k + 2])) != 2:
            return False
    # первая координата несёт норму, начиная с x_3
    return all(x.x0 == x.norm() for x in xs[2:])


def find_ea_seed(a: int, bound: int) -> Tuple[Point3, Point3]:
    """
    Перебор x_1, x_2 с координатами из [0, bound] в лексикографическом порядке, первое попадание.

    Отрицательные координаты не перебираются. Кроме условий на det и det3 до x_8
    требуется x_{k,0} = ||x_k|| при k >= 3, чтобы X_k = x_{k,0} совпадало с нормой
    """
    if a < 1:
        raise PreconditionViolated("нужно a >= 1", a=a)
    box = [Point3.of(c) for c in product(range(bound + 1), repeat=3)]
    unimodular = [x for x in box if abs(x.det()) == 1]
    for x1 in unimodular:
        for x2 in unimodular:
            if _seed_ok(a, x1, x2):
                logger.info("E_%d: найдено начало x1=%s x2=%s", a, x1.as_tuple(), x2.as_tuple())
                return x1, x2
    raise NoSeedFound(f"для a={a} нет начальных точек в пределах {bound}", a=a, bound=bound)


def ea_seed(a: int, bound: int = 3) -> EaSeq:
    pinned = pinned_ea_seed(a)
    if pinned is not None:
        x1, x2 = Point3.of(pinned[0]), Point3.of(pinned[1])
    else:
        x1, x2 = find_ea_seed(a, bound)
    return EaSeq(a, (x1, x2))


def extend_ea(seq: EaSeq, upto: int) -> EaSeq:
    if len(seq.x) < 2:
        raise SeedInvalid("нужны x_1 и x_2")
    for k, x in enumerate(seq.x[:2], start=1):
        if abs(x.det()) != 1:
            raise SeedInvalid(f"|det x_{k}| != 1", k=k)
    if upto <= len(seq.x):
        return EaSeq(seq.a, seq.x[:upto])
    xs = list(seq.x)
    while len(xs) < upto:
        k = len(xs)
        m = xs[k - 1].matrix() * ea_step_matrix(seq.a, k) * xs[k - 2].matrix()
        if not m.is_symmetric():
            raise SeedInvalid(f"x_{k + 1} не симметрична", k=k + 1, x=m.rows())
        pt = m.to_point()
        if abs(pt.det()) != 1:
            raise SeedInvalid(f"|det x_{k + 1}| != 1", k=k + 1, det=pt.det())
        xs.append(pt)
    return EaSeq(seq.a, tuple(xs))


def ea_sequence(a: int, upto: int) -> EaSeq:
    return extend_ea(ea_seed(a), upto)


# ТОЖДЕСТВА E_a
Identity = Callable[[EaSeq, int], Tuple[object, object, bool]]


def _eq(lhs, rhs):
    return lhs, rhs, lhs == rhs


def _rows(m: Mat2):
    return m.rows()


def _id_recurrence(s: EaSeq, k):
    x = s.term
    return _eq(_rows(x(k + 1).matrix()), _rows(x(k).matrix() * s.step(k) * x(k - 1).matrix()))


def _id_recurrence_transposed(s: EaSeq, k):
    x = s.term
    return _eq(_rows(x(k + 1).matrix()), _rows(x(k - 1).matrix() * s.step(k - 1) * x(k).matrix()))


def _id_unimodular(s: EaSeq, k):
    return _eq(abs(s.eps(k)), 1)


def _id_eps_product(s: EaSeq, k):
    return _eq(s.eps(k + 2), s.eps(k + 1) * s.eps(k))


def _id_eps_period(s: EaSeq, k):
    return _eq(s.eps(k + 3), s.eps(k))


def _id_det_triple(s: EaSeq, k):
    x = s.term
    return _eq(det3(x(k - 1), x(k), x(k + 1)), 2 * s.eps(k + 1) * (-1) ** (k + 1))


def _id_trace_recurrence(s: EaSeq, k):
    x = s.term
    xs = x(k).matrix() * s.step(k)
    rhs = x(k + 1).scale(xs.trace()) - x(k - 1).scale(xs.det())
    return _eq(x(k + 2).as_tuple(), rhs.as_tuple())


def _id_j_commutation(s: EaSeq, k):
    x = s.term
    lhs = x(k).matrix() * J * x(k + 1).matrix()
    rhs = J * s.step(k) * x(k - 1).matrix() * s.eps(k)
    return _eq(_rows(lhs), _rows(rhs))


def _id_three_term(s: EaSeq, k):
    x = s.term
    rhs = x(k + 1).scale(s.a * x(k).x0) - x(k - 1).scale(s.eps(k))
    return _eq(x(k + 2).as_tuple(), rhs.as_tuple())


def _minor_family(near: int, far: int):
    """
    Четыре поэлементных тождества для x_k J x_{k+far} через x_{k+near}
    """
    def build(s: EaSeq, k):
        a, e, sg = s.a, s.eps(k), (-1) ** k
        x, y, z = s.term(k), s.term(k + far), s.term(k + near)
        return [
            (x.x0 * y.x1, x.x1 * y.x0 - e * sg * z.x0),
            (x.x1 * y.x2, x.x2 * y.x1 - e * (a * z.x1 + sg * z.x2)),
            (x.x0 * y.x2, x.x1 * y.x1 - e * sg * z.x1),
            (x.x1 * y.x1, x.x2 * y.x0 - e * (a * z.x0 + sg * z.x1)),
            (x.x0 * y.x2, x.x2 * y.x0 - e * (a * z.x0 + 2 * sg * z.x1)),
        ]
    return build


_adjacent = _minor_family(-1, 1)
_skip_one = _minor_family(1, 2)


def _pick(family, idx):
    def fn(s: EaSeq, k):
        return _eq(*family(s, k)[idx])
    return fn


def _id_skip_one_matrix(s: EaSeq, k):
    x = s.term
    lhs = x(k).matrix() * J * x(k + 2).matrix()
    rhs = J * s.step(k) * x(k + 1).matrix() * s.eps(k)
    return _eq(_rows(lhs), _rows(rhs))


def _id_skip_three_12(s: EaSeq, k):
    x, a, e, sg = s.term, s.a, s.eps(k), (-1) ** k
    lhs = x(k).x0 * x(k + 4).x2
    rhs = x(k).x1 * x(k + 4).x1 - e * sg * (a * x(k + 1).x0 * x(k + 3).x1 + s.eps(k + 1) * x(k + 2).x1)
    return _eq(lhs, rhs)


def _id_skip_three_22(s: EaSeq, k):
    x, a, e, sg = s.term, s.a, s.eps(k), (-1) ** k
    lhs = x(k).x1 * x(k + 4).x2
    inner = a * (a * x(k + 1).x0 + sg * x(k + 1).x1) * x(k + 3).x1 + sg * s.eps(k + 1) * x(k + 2).x2
    return _eq(lhs, x(k).x2 * x(k + 4).x1 - e * inner)


def _id_minor_closed_forms(s: EaSeq, k):
    t = AbcTriple.of(s, k)
    a, e, sg, prev = s.a, s.eps(k), (-1) ** k, s.term(k - 1)
    rhs = [
        e * (-1) ** (k + 1) * prev.x0,
        e * (a * prev.x0 + 2 * sg * prev.x1),
        e * (-a * prev.x1 - sg * prev.x2),
    ]
    return _eq(t.as_list(), rhs)


def _id_gcd_ab(s: EaSeq, k):
    t = AbcTriple.of(s, k)
    g = math.gcd(t.a, t.b)
    return g, "divides 2", g != 0 and 2 % g == 0


def _id_gcd_mixed(s: EaSeq, k):
    t = AbcTriple.of(s, k)
    nxt = s.term(k + 1)
    g = math.gcd(t.a, t.b * nxt.x2 + t.c * nxt.x1)
    return g, "divides 2", g != 0 and 2 % g == 0


# имя -> (функция, наименьшее и наибольшее смещение индекса)
IDENTITIES: Dict[str, Tuple[Identity, int, int]] = {
    "recurrence": (_id_recurrence, -1, 1),
    "recurrence_transposed": (_id_recurrence_transposed, -1, 1),
    "unimodular": (_id_unimodular, 0, 0),
    "eps_product": (_id_eps_product, 0, 2),
    "eps_period": (_id_eps_period, 0, 3),
    "det_triple": (_id_det_triple, -1, 1),
    "trace_recurrence": (_id_trace_recurrence, -1, 2),
    "j_commutation": (_id_j_commutation, -1, 1),
    "three_term": (_id_three_term, -1, 2),
    "adjacent_minor_1": (_pick(_adjacent, 0), -1, 1),
    "adjacent_minor_2": (_pick(_adjacent, 1), -1, 1),
    "adjacent_minor_3": (_pick(_adjacent, 2), -1, 1),
    "adjacent_minor_4": (_pick(_adjacent, 3), -1, 1),
    "adjacent_minor_sum": (_pick(_adjacent, 4), -1, 1),
    "skip_one_matrix": (_id_skip_one_matrix, 0, 2),
    "skip_one_minor_1": (_pick(_skip_one, 0), 0, 2),
    "skip_one_minor_2": (_pick(_skip_one, 1), 0, 2),
    "skip_one_minor_3": (_pick(_skip_one, 2), 0, 2),
    "skip_one_minor_4": (_pick(_skip_one, 3), 0, 2),
    "skip_one_minor_sum": (_pick(_skip_one, 4), 0, 2),
    "skip_three_12": (_id_skip_three_12, 0, 4),
    "skip_three_22": (_id_skip_three_22, 0, 4),
    "minor_closed_forms": (_id_minor_closed_forms, -1, 1),
    "gcd_ab_divides_2": (_id_gcd_ab, 0, 1),
    "gcd_mixed_divides_2": (_id_gcd_mixed, 0, 1),
}


def verify_identities(seq: EaSeq, k_range: Iterable[int], threads: Optional[int] = None) -> Dict:
    """
    Точная проверка всех тождеств E_a для каждого k; провалы возвращаются как данные
    """
    ks = list(k_range)

    def check_k(k: int) -> List[Dict]:
        rows = []
        for name, (fn, lo, hi) in IDENTITIES.items():
            if k + lo < 1 or k + hi > seq.upto:
                rows.append({"identity": name, "k": k, "status": "skipped"})
                continue
            lhs, rhs, ok = fn(seq, k)
            row = {"identity": name, "k": k, "status": "pass" if ok else "fail"}
            if not ok:
                row["lhs"], row["rhs"] = lhs, rhs
            rows.append(row)
        return rows

    rows = [row for chunk in parallel_map(check_k, ks, threads) for row in chunk]
    failures = [r for r in rows if r["status"] == "fail"]
    summary = {}
    for r in rows:
        entry = summary.setdefault(r["identity"], {"pass": 0, "fail": 0, "skipped": 0})
        entry[r["status"]] += 1
    if failures:
        logger.warning("тождества нарушены: %s", sorted({f["identity"] for f in failures}))
    return {
        "check": "identities",
        "a": seq.a,
        "k_range": [ks[0], ks[-1]] if ks else [],
        "passed": not failures,
        "summary": summary,
        "failures": failures,
    }


# ПРОВЕРКИ ДЛЯ ПРЕСЕТОВ ФИБОНАЧЧИ
def shifted_fibonacci(i: int) -> int:
    """
    f_{-1} = 1, f_0 = 0, f_{i+1} = f_i + f_{i-1}
    """
    prev, cur = 1, 0
    for _ in range(i):
        prev, cur = cur, prev + cur
    return cur if i >= 0 else 1


def det_power_check(seq: FibSeq) -> Dict:
    d0, d1 = seq.w[0].det(), seq.w[1].det()
    rows = []
    for i, w in enumerate(seq.w):
        expected = d0 ** shifted_fibonacci(i - 1) * d1 ** shifted_fibonacci(i)
        rows.append({"i": i, "pass": w.det() == expected})
    return {"check": "det_power", "passed": all(r["pass"] for r in rows), "rows": rows}


def sandwich_check(seq: FibSeq, upto: Optional[int] = None) -> Dict:
    """
    ||w_i|| ||w_{i+1}|| < ||w_{i+2}|| <= 2 ||w_i|| ||w_{i+1}||
    """
    last = len(seq.w) - 3 if upto is None else min(upto, len(seq.w) - 3)
    rows = []
    for i in range(last + 1):
        prod_ = seq.w[i].norm() * seq.w[i + 1].norm()
        n2 = seq.w[i + 2].norm()
        rows.append({"i": i, "pass": prod_ < n2 <= 2 * prod_})
    return {"check": "sandwich", "passed": all(r["pass"] for r in rows), "rows": rows}


def growth_check(seq: FibSeq, start: int = 15, tolerance: float = 0.02) -> Dict:
    """
    log||w_{i+1}|| / log||w_i|| в пределах gamma +- tolerance для i >= start
    """
    rows = []
    for i in range(1, len(seq.w) - 1):
        lo, hi = log_of_int(seq.w[i].norm()), log_of_int(seq.w[i + 1].norm())
        ratio = hi / lo if lo > 0 else None
        row = {"i": i, "ratio": ratio}
        if i >= start:
            row["pass"] = ratio is not None and abs(ratio - GOLDEN) <= tolerance
        rows.append(row)
    judged = [r for r in rows if "pass" in r]
    return {
        "check": "growth",
        "passed": bool(judged) and all(r["pass"] for r in judged),
        "tolerance": tolerance,
        "rows": rows,
    }


def mod_a_check(seq: FibSeq) -> Dict:
    """
    w_i = [[1, *], [0, 0]] и y_i = [[-1, 0], [0, 0]] по модулю a
    """
    a = seq.params.get("a")
    if a is None:
        raise PreconditionViolated("проверка по модулю a только для вещественного пресета")
    rows = []
    for i, (w, y) in enumerate(zip(seq.w, seq.y)):
        w_ok = w.a % a == 1 % a and w.c % a == 0 and w.d % a == 0
        y_ok = y.x0 % a == (-1) % a and y.x1 % a == 0 and y.x2 % a == 0
        rows.append({"i": i, "w": w_ok, "y": y_ok, "pass": w_ok and y_ok})
    return {"check": "mod_a", "a": a, "passed": all(r["pass"] for r in rows), "rows": rows}


def padic_norm_check(seq: FibSeq) -> Dict:
    """
    ||w_i||_p = 1 и |det w_i|_inf |det w_i|_p = 1
    """
    p = seq.prime
    if p is None:
        raise PreconditionViolated("проверка нужна только для p-адического пресета")
    rows = []
    for i, w in enumerate(seq.w):
        d = w.det()
        norm_ok = sup_norm(w.entries(), Place.prime(p)) == 1
        product_ok = abs(d) * padic_abs(d, p) == 1
        rows.append({"i": i, "norm": norm_ok, "product": product_ok, "pass": norm_ok and product_ok})
    return {"check": "padic_norm", "p": p, "passed": all(r["pass"] for r in rows), "rows": rows}


def y_recurrence_check(seq: FibSeq) -> Dict:
    """
    det(N) y_i = y_{i-1} adj(N_{i-1}) y_{i-2} (равносильно y_i = y_{i-1} N_{i-1}^{-1} y_{i-2})
    """
    dn = seq.N.det()
    if dn == 0:
        return {"check": "y_recurrence", "passed": True, "rows": [], "note": "N вырождена"}
    rows = []
    for i in range(2, len(seq.y)):
        lhs = seq.y[i].matrix() * dn
        rhs = seq.y[i - 1].matrix() * seq.n_i(i - 1).adjugate() * seq.y[i - 2].matrix()
        rows.append({"i": i, "pass": lhs == rhs})
    return {"check": "y_recurrence", "passed": all(r["pass"] for r in rows), "rows": rows}


# ВЕЛИЧИНЫ delta И ПРЕДЕЛЬНЫЕ ТОЧКИ
def _matrices(seq) -> List[Mat2]:
    if isinstance(seq, EaSeq):
        return [x.matrix() for x in seq.x]
    return list(seq.w)


def delta_series(seq, place: Place = INF) -> DeltaSeries:
    """
    delta_i = |det w_i|_place / ||w_i||_place точно
    """
    values = []
    for w in _matrices(seq):
        d = w.det()
        if place.is_infinite:
            values.append(Fraction(abs(d), w.norm()))
        else:
            values.append(padic_abs(d, place.p) / sup_norm(w.entries(), place))
    ratios = []
    for i in range(len(values) - 1):
        lo, hi = values[i], values[i + 1]
        if lo == 0 or hi == 0 or lo == 1:
            ratios.append(None)
        else:
            ratios.append(log_of_fraction(hi) / log_of_fraction(lo))
    return DeltaSeries(place, tuple(values), tuple(ratios))


def _ratios(point: Point3) -> Tuple[Fraction, Fraction]:
    return Fraction(point.x1, point.x0), Fraction(point.x2, point.x0)


def _points(seq) -> List[Point3]:
    return list(seq.x) if isinstance(seq, EaSeq) else list(seq.y)


def limit_point(
    seq,
    place: Place = INF,
    bits: Optional[int] = None,
    index: Optional[int] = None,
    strict: bool = True,
) -> LimitPoint:
    """
    Проективный предел y_nu, нормированный к виду (1, xi, xi^2).
    Погрешность: подобранная константа с запасом settings.safety_factor
    """
    bits = settings.default_bits if bits is None else bits
    points = _points(seq)
    top = len(points) if index is None else index
    if top > len(points) or top < 1:
        raise InsufficientTail(f"индекс {top} вне построенной части", index=top)
    # x_1 хранится в позиции 0 у E_a, y_0 в позиции 0 у Фибоначчи
    offset = 1 if isinstance(seq, EaSeq) else 0
    K = top - 1
    last = points[K]
    if last.x0 == 0:
        raise FirstCoordinateZero("первая координата предела равна нулю", y=last.as_tuple())

    if place.is_infinite:
        return _real_limit(seq, points, K, offset, bits, strict)
    if isinstance(seq, EaSeq):
        raise PreconditionViolated("для E_a определён только вещественный предел")
    return _padic_limit(seq, points, K, offset, place.p)


def _real_limit(seq, points, K, offset, bits, strict) -> LimitPoint:
    r1, r2 = _ratios(points[K])
    if isinstance(seq, EaSeq):
        scale = [Fraction(p.norm()) ** 2 for p in points]
    else:
        d = delta_series(seq, INF).values
        scale = [Fraction(seq.w[j].norm()) / d[j] if d[j] else None for j in range(len(points))]
    constant = Fraction(0)
    first = 2 if isinstance(seq, EaSeq) else 1
    for j in range(first, K):
        if points[j].x0 == 0 or scale[j] is None:
            continue
        s1, s2 = _ratios(points[j])
        constant = max(constant, max(abs(r1 - s1), abs(r2 - s2)) * scale[j])
    if constant == 0:
        raise InsufficientTail("мало членов для оценки хвоста", index=K + offset)
    constant *= settings.safety_factor
    radius = constant / scale[K]
    if strict and radius > Fraction(1, 2 ** bits):
        raise InsufficientTail(
            f"индекса {K + offset} не хватает для {bits} бит", index=K + offset, radius=float(radius)
        )
    coords = (
        RealBall.exact(1, bits),
        RealBall.from_center_radius(r1, radius, bits),
        RealBall.from_center_radius(r2, radius, bits),
    )
    return LimitPoint(INF, K + offset, coords, constant)


def _padic_limit(seq, points, K, offset, p) -> LimitPoint:
    r1, r2 = _ratios(points[K])
    agree = []
    for j in (K - 1, K - 2):
        if j < 0 or points[j].x0 == 0:
            continue
        s1, s2 = _ratios(points[j])
        agree.append(min(valuation(r1 - s1, p), valuation(r2 - s2, p)))
    if not agree or min(agree) == math.inf:
        raise InsufficientTail("мало членов для p-адического предела", index=K + offset)
    margin = math.ceil(math.log(settings.safety_factor, p))
    digits = int(min(agree)) - margin
    if digits <= min(valuation(r1, p), valuation(r2, p), 0):
        raise InsufficientTail("p-адическая точность предела исчерпана", index=K + offset)
    coords = (
        PadicNumber.from_rational(1, p, digits),
        PadicNumber.from_rational(r1, p, digits),
        PadicNumber.from_rational(r2, p, digits),
    )
    return LimitPoint(Place.prime(p), K + offset, coords, Fraction(margin))


def det_triples(seq: EaSeq) -> List[int]:
    return [det3(seq.term(k), seq.term(k + 1), seq.term(k + 2)) for k in range(1, seq.upto - 1)]
