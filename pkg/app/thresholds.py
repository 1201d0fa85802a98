import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from app.errors import DomainError, InsufficientPrecision, NoSignChange
from app.models.ball import RealBall
from app.models.golden import Golden
from app.parallel import parallel_map

logger = logging.getLogger(__name__)

Value = Union[Fraction, int, RealBall, Golden]

REAL = "real"
PADIC = "padic"

INCREASING = ("theta", "delta", "phi", "psi")
DECREASING = ("f", "g")


def _ball(x: Value, bits: int) -> Union[RealBall, Golden]:
    if isinstance(x, (RealBall, Golden)):
        return x
    return RealBall.exact(Fraction(x), bits)


def _bounds(x) -> Tuple[Fraction, Fraction]:
    if isinstance(x, Golden):
        x = x.to_ball(64)
    return x.lower(), x.upper()


def ball_min(*balls: RealBall) -> RealBall:
    lo = min(b.lower() for b in balls)
    hi = min(b.upper() for b in balls)
    return RealBall.from_interval(lo, hi, min(b.bits for b in balls))


def ball_max(*balls: RealBall) -> RealBall:
    lo = max(b.lower() for b in balls)
    hi = max(b.upper() for b in balls)
    return RealBall.from_interval(lo, hi, min(b.bits for b in balls))


@dataclass(frozen=True)
class ThresholdFunctions:
    """
    Пороговые функции вещественного (0 < lambda < 1) или p-адического
    (1 < lambda < 2) варианта. Для Golden значения считаются точно
    """
    flavor: str = REAL
    bits: int = 128

    def __post_init__(self):
        if self.flavor not in (REAL, PADIC):
            raise DomainError(f"неизвестный вариант {self.flavor}")

    @property
    def domain(self) -> Tuple[Fraction, Fraction]:
        return (Fraction(0), Fraction(1)) if self.flavor == REAL else (Fraction(1), Fraction(2))

    @property
    def decreasing_domain(self) -> Tuple[Fraction, Fraction]:
        return (Fraction(1, 2), Fraction(1)) if self.flavor == REAL else (Fraction(3, 2), Fraction(2))

    def names(self) -> List[str]:
        extra = ["a", "b", "c"] if self.flavor == REAL else ["window_f", "window_g"]
        return list(INCREASING + DECREASING) + extra

    def _check(self, lam, name: str):
        lo, hi = self.decreasing_domain if name in DECREASING + ("a", "b", "c") else self.domain
        l_lo, l_hi = _bounds(lam)
        if l_lo <= lo or l_hi >= hi:
            raise DomainError(f"{name}: lambda вне ({lo}, {hi})", flavor=self.flavor, name=name)

    # ОСНОВНЫЕ ФУНКЦИИ
    def theta(self, lam):
        if self.flavor == REAL:
            return lam / (1 - lam)
        return (lam - 1) / (2 - lam)

    def delta(self, lam):
        t = self.theta(lam)
        return t * t / (t + 1)

    def phi(self, lam):
        t2 = self.theta(lam) ** 2
        return (t2 - 1) / (t2 + 1)

    def psi(self, lam):
        return 2 * lam - 1 if self.flavor == REAL else 2 * lam - 3

    def f(self, lam):
        t = self.theta(lam)
        if self.flavor == REAL:
            return 1 / (lam * (t - 1)) - t - 1
        return 1 / ((t - 1) * (lam - 1)) - t - 1

    def g(self, lam):
        t = self.theta(lam)
        return 1 - self.delta(lam) * t * (t - 1)

    # ВСПОМОГАТЕЛЬНЫЕ ДЛЯ ОКНА E_a
    def a(self, lam):
        t = self.theta(lam)
        return 2 - t ** 3 / (t + 1)

    def b(self, lam):
        t = self.theta(lam)
        return 1 / (t - 1) - 2 * t * t / (t + 1)

    def c(self, lam):
        t = self.theta(lam)
        return 1 - t * t / (t + 1) - t ** 3 / (t + 1)

    # ПАРА ДЛЯ p-АДИЧЕСКОГО ОКНА, функции от theta
    @staticmethod
    def window_f_theta(t):
        tail = 1 + t * t / (t + 1)
        return 2 + 1 / (t - 1) + 1 / t ** 2 + 1 / t ** 3 - (t + (t - 1) ** 2 + (t - 1) ** 3) * tail

    @staticmethod
    def window_g_theta(t):
        tail = 1 + t * t / (t + 1)
        return 2 + 1 / (t - 1) + 1 / t + 1 / t ** 2 - (2 + (t - 1) ** 2) * tail

    def window_f(self, lam):
        return self.window_f_theta(self.theta(lam))

    def window_g(self, lam):
        return self.window_g_theta(self.theta(lam))

    def ea_window_gap(self, lam) -> RealBall:
        """
        min{psi, 1 - a/(theta - 1), -1 - theta^2 b / lambda} - f: окно для eps непусто при > 0
        """
        t = self.theta(lam)
        upper = ball_min(self.psi(lam), 1 - self.a(lam) / (t - 1), -1 - t * t * self.b(lam) / lam)
        return upper - self.f(lam)

    def padic_window_excess(self, lam) -> RealBall:
        return ball_max(self.window_f(lam), self.window_g(lam))


def evaluate(fns: ThresholdFunctions, which: str, lam: Value):
    """
    Значение функции which в точке lambda; шар, либо точный Golden
    """
    if which not in fns.names():
        raise DomainError(f"функции {which} нет в варианте {fns.flavor}", which=which)
    x = _ball(lam, fns.bits)
    fns._check(x, which)
    try:
        return getattr(fns, which)(x)
    except (ZeroDivisionError, InsufficientPrecision) as exc:
        raise DomainError(f"{which} не определена в точке", which=which) from exc


# ПОИСК КОРНЕЙ
def _sign(fn: Callable, lam: Fraction, bits: int) -> int:
    return fn(RealBall.exact(lam, bits)).sign()


def bisect(fn: Callable, lo: Fraction, hi: Fraction, tol: Fraction, bits: int) -> RealBall:
    """
    Бисекция с сертифицированными знаками fn на концах
    """
    s_lo, s_hi = _sign(fn, lo, bits), _sign(fn, hi, bits)
    if s_lo == 0:
        return RealBall.exact(lo, bits)
    if s_hi == 0:
        return RealBall.exact(hi, bits)
    if s_lo == s_hi:
        raise NoSignChange("нет смены знака на отрезке", lo=lo, hi=hi)
    while hi - lo > 2 * tol:
        mid = (lo + hi) / 2
        try:
            s = _sign(fn, mid, bits)
        except InsufficientPrecision:
            # знак неразличим: корень в пределах точности
            logger.debug("bisect: знак в %s не определён на %d битах", mid, bits)
            bits *= 2
            continue
        if s == 0:
            return RealBall.exact(mid, bits)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return RealBall.from_interval(lo, hi, bits)


def _scan(fn: Callable, lo: Fraction, hi: Fraction, points: int, bits: int, keep: Callable[[int], bool]):
    """
    Последняя точка сетки, где keep(sign) истинно, и следующая за ней
    """
    grid = [lo + (hi - lo) * i / points for i in range(points + 1)]
    signs = parallel_map(lambda x: fn(RealBall.exact(x, bits)).sign(), grid)
    last = max((i for i, s in enumerate(signs) if keep(s)), default=None)
    if last is None or last == points:
        raise NoSignChange("на сетке нет перехода", lo=lo, hi=hi)
    return grid[last], grid[last + 1]


@dataclass(frozen=True)
class Threshold:
    name: str
    flavor: str
    equation: str
    interval: Tuple[Fraction, Fraction]
    reference: Tuple[str, ...]


THRESHOLDS: Dict[str, Threshold] = {
    "real_f_phi_root": Threshold("real_f_phi_root", REAL, "f=phi", (Fraction(51, 100), Fraction(62, 100)),
                                 ("0.60842266",)),
    "real_f_psi_root": Threshold("real_f_psi_root", REAL, "f=psi", (Fraction(51, 100), Fraction(62, 100)),
                                 ("0.61263521",)),
    "ea_window_root": Threshold("ea_window_root", REAL, "ea-window", (Fraction(55, 100), Fraction(618, 1000)),
                                ("0.61455261", "0.611455261")),
    "padic_f_phi_root": Threshold("padic_f_phi_root", PADIC, "f=phi", (Fraction(151, 100), Fraction(162, 100)),
                                  ("1.60842266",)),
    "padic_f_psi_root": Threshold("padic_f_psi_root", PADIC, "f=psi", (Fraction(151, 100), Fraction(162, 100)),
                                  ("1.61263521",)),
    "padic_window_root": Threshold("padic_window_root", PADIC, "padic-window",
                                   (Fraction(8, 5), Fraction(1618, 1000)), ("1.615358873",)),
}


def solve_threshold(
    fns: ThresholdFunctions,
    equation: str,
    tol: Union[float, Fraction] = Fraction(1, 10 ** 6),
    interval: Optional[Tuple[Fraction, Fraction]] = None,
    points: int = 200,
) -> RealBall:
    """
    Корень уравнения f=phi, f=psi, ea-window или padic-window шаром радиуса <= tol
    """
    tol = Fraction(tol).limit_denominator(10 ** 15) if isinstance(tol, float) else Fraction(tol)
    if interval is None:
        matches = [t for t in THRESHOLDS.values() if t.flavor == fns.flavor and t.equation == equation]
        if not matches:
            raise DomainError(f"уравнение {equation} не задано для варианта {fns.flavor}", equation=equation)
        interval = matches[0].interval
    lo, hi = interval
    bits = fns.bits

    if equation == "f=phi":
        root = bisect(lambda x: fns.f(x) - fns.phi(x), lo, hi, tol, bits)
    elif equation == "f=psi":
        root = bisect(lambda x: fns.f(x) - fns.psi(x), lo, hi, tol, bits)
    elif equation == "ea-window":
        if fns.flavor != REAL:
            raise DomainError("окно E_a определено только в вещественном варианте")
        # последняя точка, где окно пусто
        a, b = _scan(fns.ea_window_gap, lo, hi, points, bits, lambda s: s <= 0)
        root = bisect(fns.ea_window_gap, a, b, tol, bits)
    elif equation == "padic-window":
        if fns.flavor != PADIC:
            raise DomainError("p-адическое окно определено только в p-адическом варианте")
        a, b = _scan(fns.padic_window_excess, lo, hi, points, bits, lambda s: s >= 0)
        root = bisect(fns.padic_window_excess, a, b, tol, bits)
    else:
        raise DomainError(f"неизвестное уравнение {equation}", equation=equation)
    logger.info("%s %s: %s", fns.flavor, equation, root)
    return root


def threshold_table(which: str, tol: Union[float, Fraction] = Fraction(1, 10 ** 6), bits: int = 128) -> List[Dict]:
    """
    Строки {name, interval, value, reference, delta} для варианта which
    """
    fns = ThresholdFunctions(which, bits)
    rows = []
    for t in THRESHOLDS.values():
        if t.flavor != which:
            continue
        root = solve_threshold(fns, t.equation, tol, t.interval)
        center = root.center
        rows.append({
            "name": t.name,
            "equation": t.equation,
            "interval": [str(t.interval[0]), str(t.interval[1])],
            "value": root.decimal(12),
            "radius": root.radius_decimal(3),
            "reference": list(t.reference),
            "delta": [float(abs(center - Fraction(ref))) for ref in t.reference],
        })
    return rows


# ПРОВЕРКИ НА СЕТКЕ
CHAINS = {
    REAL: [
        ("real_f_phi_root", ["g", "f", "phi"]),
        ("real_f_psi_root", ["g", "f", "psi", "phi"]),
    ],
    PADIC: [
        ("padic_f_phi_root", ["g", "f", "phi"]),
        ("padic_f_psi_root", ["g", "f", "psi", "phi"]),
    ],
}


def _upper_end(flavor: str) -> Fraction:
    # рациональная точка чуть левее 1/gamma (или gamma)
    g = Golden.gamma() if flavor == PADIC else Golden.gamma().inverse()
    return g.to_ball(64).lower() - Fraction(1, 10 ** 9)


def grid_check(fns: ThresholdFunctions, interval: Optional[Tuple[Fraction, Fraction]] = None, points: int = 200) -> Dict:
    """
    Монотонность theta, delta, phi, psi (рост) и f, g (убывание) на сетке,
    и цепочки 0 < g <= f < phi, 0 < g <= f < psi < phi правее соответствующих корней
    """
    lo, hi = interval or fns.decreasing_domain
    inner = [lo + (hi - lo) * i / (points + 1) for i in range(1, points + 1)]

    def values_at(x: Fraction) -> Dict[str, float]:
        ball = RealBall.exact(x, fns.bits)
        return {name: float(getattr(fns, name)(ball).center) for name in INCREASING + DECREASING}

    table = parallel_map(values_at, inner)
    violations = []
    for name in INCREASING + DECREASING:
        seq = [row[name] for row in table]
        increasing = name in INCREASING
        for i in range(len(seq) - 1):
            ok = seq[i] < seq[i + 1] if increasing else seq[i] > seq[i + 1]
            if not ok:
                violations.append({"check": f"monotone_{name}", "at": float(inner[i])})
                break

    chains = {}
    top = _upper_end(fns.flavor)
    for root_name, order in CHAINS[fns.flavor]:
        t = THRESHOLDS[root_name]
        start = solve_threshold(fns, t.equation, Fraction(1, 10 ** 8), t.interval).upper()
        xs = [start + (top - start) * i / (points + 1) for i in range(1, points + 1)]
        bad = 0
        for x in xs:
            ball = RealBall.exact(x, fns.bits)
            vals = [getattr(fns, name)(ball).center for name in order]
            ok = vals[0] > 0 and vals[0] <= vals[1] and all(u < v for u, v in zip(vals[1:], vals[2:]))
            bad += not ok
        chains[root_name] = {"order": ["0"] + order, "points": len(xs), "violations": bad}
        if bad:
            violations.append({"check": f"chain_{root_name}", "count": bad})
    return {
        "flavor": fns.flavor,
        "interval": [str(lo), str(hi)],
        "points": points,
        "chains": chains,
        "violations": violations,
        "passed": not violations,
    }


def endpoint_zeros(flavor: str = REAL, bits: int = 200) -> Dict[str, object]:
    """
    f и g в точке 1/gamma (или gamma) точно и шаром
    """
    fns = ThresholdFunctions(flavor, bits)
    lam = Golden.gamma().inverse() if flavor == REAL else Golden.gamma()
    exact = {name: getattr(fns, name)(lam) for name in ("f", "g")}
    balls = {name: getattr(fns, name)(lam.to_ball(bits)) for name in ("f", "g")}
    return {
        "exact_zero": all(v == Golden.of(0) for v in exact.values()),
        "ball_contains_zero": all(b.contains_zero() for b in balls.values()),
        "radius_log2": {name: b.log2_upper_radius() for name, b in balls.items()},
    }
