import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Union

from sympy import multiplicity

from app.errors import InsufficientPrecision

Rational = Union[int, Fraction]


def valuation(x: Rational, p: int) -> Union[int, float]:
    """
    p-адическое нормирование рационального числа; для нуля math.inf
    """
    q = Fraction(x)
    if q == 0:
        return math.inf
    return int(multiplicity(p, abs(q.numerator))) - int(multiplicity(p, q.denominator))


def padic_abs(x: Rational, p: int) -> Fraction:
    v = valuation(x, p)
    if v == math.inf:
        return Fraction(0)
    return Fraction(p) ** (-v)


@dataclass(frozen=True)
class PadicNumber:
    """
    p^valuation * unit, известное по модулю p^(valuation + precision).
    Нулевой маркер: unit = 0, precision = 0, valuation = абсолютная точность
    """
    p: int
    valuation: int
    unit: int
    precision: int

    # КОНСТРУКТОРЫ
    @classmethod
    def zero(cls, p: int, absolute_precision: int) -> "PadicNumber":
        return cls(p, absolute_precision, 0, 0)

    @classmethod
    def from_rational(cls, x: Rational, p: int, absolute_precision: int) -> "PadicNumber":
        q = Fraction(x)
        v = valuation(q, p)
        if v == math.inf or v >= absolute_precision:
            return cls.zero(p, absolute_precision)
        n = absolute_precision - v
        mod = p ** n
        num = q.numerator // p ** max(v, 0)
        den = q.denominator // p ** max(-v, 0)
        unit = (num * pow(den, -1, mod)) % mod
        return cls(p, v, unit, n)

    from_int = from_rational

    # ДОСТУП
    @property
    def absolute_precision(self) -> int:
        return self.valuation + self.precision

    def is_zero_marker(self) -> bool:
        return self.unit == 0

    def is_integral(self) -> bool:
        return self.valuation >= 0

    def norm(self) -> Fraction:
        """
        |x|_p; для нулевого маркера это только верхняя оценка
        """
        return Fraction(self.p) ** (-self.valuation)

    def representative(self) -> Fraction:
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation

    def lift_int(self) -> int:
        if self.valuation < 0:
            raise InsufficientPrecision("элемент не лежит в Z_p", p=self.p)
        return self.unit * self.p ** self.valuation

    def residue(self, k: int) -> int:
        """
        Вычет по модулю p^k для целого элемента
        """
        if k > self.absolute_precision:
            raise InsufficientPrecision(
                f"нужно {k} цифр, известно {self.absolute_precision}", p=self.p
            )
        return self.lift_int() % self.p ** k

    def digits(self, count: int) -> List[int]:
        n = self.lift_int()
        out = []
        for _ in range(min(count, self.absolute_precision)):
            n, d = divmod(n, self.p)
            out.append(d)
        return out

    def agrees_with(self, other: "PadicNumber") -> bool:
        """
        Совпадение по модулю меньшей из двух точностей
        """
        ap = min(self.absolute_precision, other.absolute_precision)
        diff = self.representative() - other.representative()
        return valuation(diff, self.p) >= ap

    def with_precision(self, absolute_precision: int) -> "PadicNumber":
        ap = min(absolute_precision, self.absolute_precision)
        return PadicNumber.from_rational(self.representative(), self.p, ap)

    # АРИФМЕТИКА
    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("разные простые числа")
            return other
        if isinstance(other, (int, Fraction)):
            v = valuation(other, self.p)
            if v == math.inf:
                return PadicNumber.zero(self.p, self.absolute_precision + max(self.precision, 1) + 64)
            ap = max(self.absolute_precision, v + max(self.precision, 1)) + 1
            return PadicNumber.from_rational(other, self.p, ap)
        return NotImplemented

    def __add__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ap = min(self.absolute_precision, other.absolute_precision)
        return PadicNumber.from_rational(self.representative() + other.representative(), self.p, ap)

    __radd__ = __add__

    def __neg__(self) -> "PadicNumber":
        if self.is_zero_marker():
            return self
        mod = self.p ** self.precision
        return PadicNumber(self.p, self.valuation, (-self.unit) % mod, self.precision)

    def __sub__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "PadicNumber":
        return (-self) + other

    def __mul__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero_marker() or other.is_zero_marker():
            return PadicNumber.zero(self.p, self.valuation + other.valuation)
        n = min(self.precision, other.precision)
        mod = self.p ** n
        return PadicNumber(self.p, self.valuation + other.valuation, (self.unit * other.unit) % mod, n)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero_marker():
            raise InsufficientPrecision("делитель неотличим от нуля", p=self.p)
        if self.is_zero_marker():
            return PadicNumber.zero(self.p, self.valuation - other.valuation)
        n = min(self.precision, other.precision)
        mod = self.p ** n
        unit = (self.unit * pow(other.unit, -1, mod)) % mod
        return PadicNumber(self.p, self.valuation - other.valuation, unit, n)

    def __rtruediv__(self, other) -> "PadicNumber":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "PadicNumber":
        if n < 0:
            return 1 / (self ** (-n))
        result = self._coerce(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self) -> str:
        if self.is_zero_marker():
            return f"O({self.p}^{self.valuation})"
        return f"{self.p}^{self.valuation}*{self.unit} + O({self.p}^{self.absolute_precision})"


@dataclass(frozen=True)
class PadicPoint:
    """
    Точка с p-адическими координатами, например t_p = (1, xi_p, ..., xi_p^n)
    """
    coords: tuple

    def __post_init__(self):
        primes = {c.p for c in self.coords}
        if len(primes) > 1:
            raise ValueError("координаты с разными простыми")

    @classmethod
    def of(cls, coords: Sequence[Union[PadicNumber, Rational]], p: int, absolute_precision: int) -> "PadicPoint":
        out = []
        for c in coords:
            if isinstance(c, PadicNumber):
                out.append(c)
            else:
                out.append(PadicNumber.from_rational(c, p, absolute_precision))
        return cls(tuple(out))

    @classmethod
    def moment(cls, xi: PadicNumber, n: int) -> "PadicPoint":
        coords = [PadicNumber.from_rational(1, xi.p, max(xi.absolute_precision, 1) + 64)]
        for _ in range(n):
            coords.append(coords[-1] * xi)
        return cls(tuple(coords))

    @property
    def p(self) -> int:
        return self.coords[0].p

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def representatives(self) -> List[Fraction]:
        return [c.representative() for c in self.coords]

    def norm(self) -> Fraction:
        return max((padic_abs(c, self.p) for c in self.representatives()), default=Fraction(0))
