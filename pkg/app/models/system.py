from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from app.errors import DomainError
from app.models.ball import RealBall
from app.models.golden import Golden
from app.models.padic import PadicNumber, PadicPoint
from app.models.place import Place
from app.models.poly import IntPoly

IntVector = Tuple[int, ...]

# показатель: рациональный или элемент Q(gamma), например 1/gamma
Exponent = Union[Fraction, Golden]


def exponent_float(lam: Exponent) -> float:
    return float(lam)


def is_minus_one(lam: Exponent) -> bool:
    return Golden.of(lam) == Golden.of(-1)


def _below(lam: Exponent, bound: int) -> bool:
    if isinstance(lam, Golden):
        if lam.is_rational():
            return lam.a < bound
        return exponent_float(lam) < bound
    return lam < bound


@dataclass(frozen=True)
class ApproxSystem:
    """
    Система приближений степени n: цель (xi_inf, xi_p), показатели lambda, константа c
    """
    n: int
    xi_inf: RealBall
    lam_inf: Exponent
    c: Fraction
    xi_p: Dict[int, PadicNumber] = field(default_factory=dict)
    lam_p: Dict[int, Exponent] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("степень n должна быть положительной", n=self.n)
        if _below(self.lam_inf, -1):
            raise DomainError("нужно lambda_inf >= -1", lam_inf=self.lam_inf)
        if self.c <= 0:
            raise DomainError("константа c должна быть положительной", c=self.c)
        if set(self.xi_p) != set(self.lam_p):
            raise DomainError("xi_p и lambda_p заданы для разных простых")
        for p, lam in self.lam_p.items():
            Place.prime(p)
            if _below(lam, 0):
                raise DomainError(f"нужно lambda_{p} >= 0", p=p, lam=lam)

    @property
    def primes(self) -> List[int]:
        return sorted(self.xi_p)

    @property
    def places(self) -> List[Place]:
        return [Place.infinity()] + [Place.prime(p) for p in self.primes]

    def total_lambda(self) -> Exponent:
        total = Golden.of(self.lam_inf)
        for lam in self.lam_p.values():
            total = total + lam
        return total.a if total.is_rational() else total

    def t_inf(self) -> List[RealBall]:
        out = [RealBall.exact(1, self.xi_inf.bits)]
        for _ in range(self.n):
            out.append(out[-1] * self.xi_inf)
        return out

    def t_p(self, p: int) -> PadicPoint:
        return PadicPoint.moment(self.xi_p[p], self.n)

    def with_c(self, c: Fraction) -> "ApproxSystem":
        return ApproxSystem(self.n, self.xi_inf, self.lam_inf, Fraction(c), dict(self.xi_p), dict(self.lam_p))


@dataclass(frozen=True)
class SolutionSet:
    X: Fraction
    solutions: Tuple[IntVector, ...]
    primitive: Tuple[IntVector, ...]
    cap: int
    truncated: bool = False

    def is_empty(self) -> bool:
        return not self.solutions

    def minimal(self) -> List[IntVector]:
        """
        Решения минимальной sup-нормы
        """
        if not self.solutions:
            return []
        best = min(max(abs(c) for c in v) for v in self.solutions)
        return [v for v in self.solutions if max(abs(c) for c in v) == best]


@dataclass(frozen=True)
class IcInterval:
    v: IntVector
    lo: Optional[Fraction]
    hi: Optional[Fraction]
    method: str = "closed"
    # верхний конец не найден в пределах поиска
    unbounded: bool = False

    def is_empty(self) -> bool:
        if self.lo is None:
            return True
        return not self.unbounded and (self.hi is None or self.lo > self.hi)

    def contains(self, X) -> bool:
        if self.is_empty() or X < self.lo:
            return False
        return self.unbounded or X <= self.hi


@dataclass(frozen=True)
class DualPoints:
    """
    n+1 независимых точек двойственной задачи при данном X.
    relax: множитель K при границах K X^lambda и K X^(lambda - lambda_inf - 1)
    """
    X: Fraction
    points: Tuple[IntVector, ...]
    relax: int
    det: int
    gauges: Tuple[Fraction, ...] = ()
    lemma: Optional[Dict[str, object]] = None

    def polynomials(self) -> List[IntPoly]:
        return [IntPoly(tuple(x)) for x in self.points]
