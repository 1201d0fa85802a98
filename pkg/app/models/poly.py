from dataclasses import dataclass
from typing import List, Sequence, Tuple


@dataclass(frozen=True)
class IntPoly:
    """
    Целочисленный многочлен c_0 + c_1 T + ... + c_n T^n.
    coeffs хранятся от младшего к старшему, без старших нулей
    """
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        cs = [int(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_high(cls, coeffs: Sequence[int]) -> "IntPoly":
        """
        Список коэффициентов от старшего к младшему, как во входных данных CLI
        """
        return cls(tuple(reversed([int(c) for c in coeffs])))

    @classmethod
    def parse(cls, text: str) -> "IntPoly":
        parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
        if not parts:
            raise ValueError("пустой список коэффициентов")
        return cls.from_high([int(p.strip()) for p in parts])

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "IntPoly":
        return cls(tuple([0] * degree + [coeff]))

    @classmethod
    def zero(cls) -> "IntPoly":
        return cls(())

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def height(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def high_first(self) -> List[int]:
        return list(reversed(self.coeffs))

    def __call__(self, x):
        # схема Горнера; работает для int, Fraction, RealBall, PadicNumber
        if not self.coeffs:
            return 0 * x
        acc = 0 * x + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def __add__(self, other: "IntPoly") -> "IntPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(tuple(self.coeff(i) + other.coeff(i) for i in range(n)))

    def __neg__(self) -> "IntPoly":
        return IntPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + (-other)

    def __mul__(self, other) -> "IntPoly":
        if isinstance(other, int):
            return IntPoly(tuple(other * c for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return IntPoly.zero()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' + mono if mono else ''}"
            terms.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]
