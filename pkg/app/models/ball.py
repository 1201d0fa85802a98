from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Tuple, Union

import mpmath

from app.errors import InsufficientPrecision

# мантисса радиуса хранится с такой точностью, округление вверх
RAD_BITS = 30

Rad = Tuple[int, int]
Number = Union[int, Fraction, "RealBall"]


def _rad_up(m: int, e: int) -> Rad:
    extra = m.bit_length() - RAD_BITS
    if extra > 0:
        m = (m >> extra) + 1
        e += extra
    return m, e


def _rad_add(a: Rad, b: Rad) -> Rad:
    (m1, e1), (m2, e2) = a, b
    if m1 == 0:
        return b
    if m2 == 0:
        return a
    e = min(e1, e2)
    return _rad_up((m1 << (e1 - e)) + (m2 << (e2 - e)), e)


def _rad_mul(a: Rad, b: Rad) -> Rad:
    if a[0] == 0 or b[0] == 0:
        return 0, 0
    return _rad_up(a[0] * b[0], a[1] + b[1])


def _rad_to_fraction(r: Rad) -> Fraction:
    m, e = r
    return Fraction(m) * Fraction(2) ** e


def _trim(man: int, exp: int, bits: int) -> Tuple[int, int, Rad]:
    extra = abs(man).bit_length() - bits
    if extra <= 0:
        return man, exp, (0, 0)
    return man >> extra, exp + extra, (1, exp + extra)


def _fraction_to_dyadic(q: Fraction, bits: int) -> Tuple[int, int, Rad]:
    num, den = q.numerator, q.denominator
    if den & (den - 1) == 0:
        return _trim(num, -(den.bit_length() - 1), bits)
    shift = bits + den.bit_length() - num.bit_length() + 2
    shift = max(shift, 0)
    man = (num << shift) // den
    man, exp, err = _trim(man, -shift, bits)
    return man, exp, _rad_add(err, (1, -shift))


@dataclass(frozen=True)
class RealBall:
    """
    Вещественный шар: центр man*2**exp и радиус rad*2**rexp.
    Все операции округляют наружу
    """
    man: int
    exp: int
    rad: int
    rexp: int
    bits: int

    # КОНСТРУКТОРЫ
    @classmethod
    def exact(cls, value: Union[int, Fraction], bits: int) -> "RealBall":
        q = Fraction(value)
        man, exp, err = _fraction_to_dyadic(q, bits)
        return cls(man, exp, err[0], err[1], bits)

    @classmethod
    def from_center_radius(cls, center: Fraction, radius: Fraction, bits: int) -> "RealBall":
        man, exp, err = _fraction_to_dyadic(Fraction(center), bits)
        r = Fraction(radius)
        if r < 0:
            raise ValueError("радиус должен быть неотрицательным")
        rm, re, rerr = _fraction_to_dyadic(r, RAD_BITS)
        rad = _rad_add(_rad_add(_rad_up(rm + 1 if rm else 0, re), rerr), err)
        return cls(man, exp, rad[0], rad[1], bits)

    @classmethod
    def from_interval(cls, lo: Fraction, hi: Fraction, bits: int) -> "RealBall":
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("пустой интервал")
        return cls.from_center_radius((lo + hi) / 2, (hi - lo) / 2, bits)

    @classmethod
    def golden(cls, bits: int) -> "RealBall":
        """
        gamma = (1 + sqrt 5) / 2 через целочисленный корень
        """
        scale = bits + 4
        s = isqrt(5 << (2 * scale))
        lo = Fraction(s, 1 << scale)
        hi = Fraction(s + 1, 1 << scale)
        return cls.from_interval((1 + lo) / 2, (1 + hi) / 2, bits)

    # ДОСТУП
    @property
    def center(self) -> Fraction:
        return Fraction(self.man) * Fraction(2) ** self.exp

    @property
    def radius(self) -> Fraction:
        return _rad_to_fraction((self.rad, self.rexp))

    def lower(self) -> Fraction:
        return self.center - self.radius

    def upper(self) -> Fraction:
        return self.center + self.radius

    def is_exact(self) -> bool:
        return self.rad == 0

    def contains(self, value: Union[int, Fraction, "RealBall"]) -> bool:
        if isinstance(value, RealBall):
            return self.lower() <= value.lower() and value.upper() <= self.upper()
        return self.lower() <= Fraction(value) <= self.upper()

    def overlaps(self, other: "RealBall") -> bool:
        return self.lower() <= other.upper() and other.lower() <= self.upper()

    def contains_zero(self) -> bool:
        return self.contains(0)

    def with_bits(self, bits: int) -> "RealBall":
        man, exp, err = _trim(self.man, self.exp, bits)
        rad = _rad_add((self.rad, self.rexp), err)
        return RealBall(man, exp, rad[0], rad[1], bits)

    def widen(self, extra: Fraction) -> "RealBall":
        rm, re, rerr = _fraction_to_dyadic(Fraction(extra), RAD_BITS)
        rad = _rad_add((self.rad, self.rexp), _rad_add(_rad_up(abs(rm) + 1, re), rerr))
        return RealBall(self.man, self.exp, rad[0], rad[1], self.bits)

    # АРИФМЕТИКА
    def _coerce(self, other: Number) -> "RealBall":
        if isinstance(other, RealBall):
            return other
        if isinstance(other, (int, Fraction)):
            return RealBall.exact(other, max(self.bits, abs(Fraction(other).numerator).bit_length() + 8))
        return NotImplemented

    def __neg__(self) -> "RealBall":
        return RealBall(-self.man, self.exp, self.rad, self.rexp, self.bits)

    def __add__(self, other: Number) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        bits = min(self.bits, other.bits)
        e = min(self.exp, other.exp)
        man = (self.man << (self.exp - e)) + (other.man << (other.exp - e))
        man, exp, err = _trim(man, e, bits)
        rad = _rad_add(_rad_add((self.rad, self.rexp), (other.rad, other.rexp)), err)
        return RealBall(man, exp, rad[0], rad[1], bits)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> "RealBall":
        return (-self) + other

    def __mul__(self, other: Number) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        bits = min(self.bits, other.bits)
        man, exp, err = _trim(self.man * other.man, self.exp + other.exp, bits)
        mag_self = _rad_up(abs(self.man), self.exp)
        mag_other = _rad_up(abs(other.man), other.exp)
        r1, r2 = (self.rad, self.rexp), (other.rad, other.rexp)
        rad = _rad_add(_rad_mul(mag_self, r2), _rad_mul(mag_other, r1))
        rad = _rad_add(rad, _rad_mul(r1, r2))
        rad = _rad_add(rad, err)
        return RealBall(man, exp, rad[0], rad[1], bits)

    __rmul__ = __mul__

    def _abs_lower(self) -> Rad:
        """
        Нижняя граница |x| в виде (m, e); m = 0 если шар содержит ноль
        """
        e = min(self.exp, self.rexp)
        diff = (abs(self.man) << (self.exp - e)) - (self.rad << (self.rexp - e))
        if diff <= 0:
            return 0, 0
        extra = diff.bit_length() - RAD_BITS
        if extra > 0:
            diff >>= extra
            e += extra
        return diff, e

    def __truediv__(self, other: Number) -> "RealBall":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        low = other._abs_lower()
        if low[0] == 0:
            raise InsufficientPrecision("делитель не отделён от нуля")
        bits = min(self.bits, other.bits)
        shift = max(bits + abs(other.man).bit_length() - abs(self.man).bit_length() + 2, 0)
        man = (self.man << shift) // other.man
        exp = self.exp - other.exp - shift
        man, exp, err = _trim(man, exp, bits)
        err = _rad_add(err, (2, self.exp - other.exp - shift))
        # |x/y - cx/cy| <= (rx + |cx/cy| ry) / (|cy| - ry)
        quot_mag = _rad_up(abs(man) + 2, exp)
        num = _rad_add((self.rad, self.rexp), _rad_mul(quot_mag, (other.rad, other.rexp)))
        if num[0]:
            s = RAD_BITS + low[0].bit_length()
            q = ((num[0] << s) // low[0]) + 1
            rad = _rad_add(_rad_up(q, num[1] - low[1] - s), err)
        else:
            rad = err
        return RealBall(man, exp, rad[0], rad[1], bits)

    def __rtruediv__(self, other: Number) -> "RealBall":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "RealBall":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / (self ** (-n))
        result = RealBall.exact(1, self.bits)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self) -> "RealBall":
        if self.lower() >= 0:
            return self
        if self.upper() <= 0:
            return -self
        hi = max(-self.lower(), self.upper())
        return RealBall.from_interval(Fraction(0), hi, self.bits)

    def sqrt(self) -> "RealBall":
        lo, hi = self.lower(), self.upper()
        if hi < 0:
            raise InsufficientPrecision("корень из отрицательного шара")
        lo = max(lo, Fraction(0))
        scale = self.bits + 4
        four = 1 << (2 * scale)
        s_lo = isqrt((lo.numerator * four) // lo.denominator)
        s_hi = isqrt(-((-hi.numerator * four) // hi.denominator)) + 1
        return RealBall.from_interval(Fraction(s_lo, 1 << scale), Fraction(s_hi, 1 << scale), self.bits)

    # СРАВНЕНИЯ С СЕРТИФИКАТОМ
    def sign(self) -> int:
        if self.lower() > 0:
            return 1
        if self.upper() < 0:
            return -1
        if self.man == 0 and self.rad == 0:
            return 0
        raise InsufficientPrecision("знак шара не определён")

    def certified_lt(self, other: Number) -> bool:
        """
        True/False если сравнение решено, иначе InsufficientPrecision
        """
        other = self._coerce(other)
        if self.upper() < other.lower():
            return True
        if self.lower() >= other.upper():
            return False
        raise InsufficientPrecision("шары пересекаются, сравнение не решено")

    def certified_le(self, other: Number) -> bool:
        other = self._coerce(other)
        if self.upper() <= other.lower():
            return True
        if self.lower() > other.upper():
            return False
        raise InsufficientPrecision("шары пересекаются, сравнение не решено")

    def floor(self) -> int:
        lo, hi = self.lower(), self.upper()
        f_lo = lo.numerator // lo.denominator
        f_hi = hi.numerator // hi.denominator
        if f_lo != f_hi:
            raise InsufficientPrecision("целая часть не определена")
        return f_lo

    def nearest_int(self) -> int:
        return (self + Fraction(1, 2)).floor()

    # ПРЕДСТАВЛЕНИЕ
    def to_mpf(self):
        return mpmath.mpf((self.man, self.exp))

    def log2_upper_radius(self) -> float:
        if self.rad == 0:
            return float("-inf")
        return self.rad.bit_length() + self.rexp

    def decimal(self, digits: int = 30) -> str:
        with mpmath.workprec(max(self.bits, 64) + 16):
            return mpmath.nstr(self.to_mpf(), digits)

    def radius_decimal(self, digits: int = 6) -> str:
        with mpmath.workprec(64):
            return mpmath.nstr(mpmath.mpf((self.rad, self.rexp)), digits)

    def __float__(self) -> float:
        return float(self.to_mpf())

    def __repr__(self) -> str:
        return f"RealBall({self.decimal(20)} +/- {self.radius_decimal(3)})"
