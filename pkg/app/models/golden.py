from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from app.models.ball import RealBall


@dataclass(frozen=True)
class Golden:
    """
    Точный элемент a + b*gamma поля Q(gamma), gamma^2 = gamma + 1
    """
    a: Fraction
    b: Fraction

    @classmethod
    def gamma(cls) -> "Golden":
        return cls(Fraction(0), Fraction(1))

    @classmethod
    def of(cls, value: Union[int, Fraction, "Golden"]) -> "Golden":
        if isinstance(value, Golden):
            return value
        return cls(Fraction(value), Fraction(0))

    def __add__(self, other):
        other = Golden.of(other)
        return Golden(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return Golden(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-Golden.of(other))

    def __rsub__(self, other):
        return Golden.of(other) - self

    def __mul__(self, other):
        other = Golden.of(other)
        bd = self.b * other.b
        return Golden(self.a * other.a + bd, self.a * other.b + self.b * other.a + bd)

    __rmul__ = __mul__

    def conjugate(self) -> "Golden":
        # gamma -> 1 - gamma
        return Golden(self.a + self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a + self.a * self.b - self.b * self.b

    def inverse(self) -> "Golden":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("обратного элемента нет")
        c = self.conjugate()
        return Golden(c.a / n, c.b / n)

    def __truediv__(self, other):
        return self * Golden.of(other).inverse()

    def __rtruediv__(self, other):
        return Golden.of(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Golden.of(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_rational(self) -> bool:
        return self.b == 0

    def to_ball(self, bits: int) -> RealBall:
        g = RealBall.golden(bits + 8)
        return (RealBall.exact(self.a, bits + 8) + g * RealBall.exact(self.b, bits + 8)).with_bits(bits)

    def __float__(self) -> float:
        return float(self.to_ball(64))
