from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from app.models.ball import RealBall
from app.models.poly import IntPoly


@dataclass(frozen=True)
class FracSeries:
    """
    Ряд {x_{k,0} R(xi)} по индексам k; inconclusive хранит k,
    где радиус шара не меньше 10^-3 от значения
    """
    poly: IntPoly
    values: Tuple[Tuple[int, RealBall], ...]
    inconclusive: Tuple[int, ...] = ()
    xi_index: int = 0

    @property
    def period(self) -> int:
        return 6 if self.poly.degree == 4 else 3

    def as_dict(self) -> Dict[int, RealBall]:
        return dict(self.values)

    def indices(self) -> List[int]:
        return [k for k, _ in self.values]

    def conclusive(self) -> Dict[int, RealBall]:
        bad = set(self.inconclusive)
        return {k: v for k, v in self.values if k not in bad}


@dataclass(frozen=True)
class AccumulationPoint:
    l: int
    modulus: int
    limit: RealBall
    members: Tuple[int, ...]
    rate: Optional[float] = None
    converged: bool = True

    @property
    def name(self) -> str:
        return f"eta_{self.l}" if self.modulus == 6 else f"delta_{self.l}"

    @property
    def positive(self) -> bool:
        return self.limit.lower() > 0


@dataclass(frozen=True)
class ContinuedFraction:
    """
    Подтверждённые неполные частные и подходящие дроби p_m / q_m
    """
    quotients: Tuple[int, ...]
    convergents: Tuple[Tuple[int, int], ...] = field(default=())
    # True если разложение рационального числа закончилось
    finite: bool = False

    @classmethod
    def from_quotients(cls, quotients, finite: bool = False) -> "ContinuedFraction":
        p_prev, p = 1, quotients[0] if quotients else 0
        q_prev, q = 0, 1
        convergents = [(p, q)] if quotients else []
        for a in quotients[1:]:
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
            convergents.append((p, q))
        return cls(tuple(quotients), tuple(convergents), finite)

    def fractions(self) -> List[Fraction]:
        return [Fraction(p, q) for p, q in self.convergents]

    @property
    def denominators(self) -> List[int]:
        return [q for _, q in self.convergents]

    def __len__(self) -> int:
        return len(self.quotients)
